// Acceptance runs: one PASS/FAIL line per criterion, with the measured values.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "magnls/averaging.hpp"
#include "magnls/experiments.hpp"
#include "magnls/snapshot.hpp"

using namespace magnls;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what, double measured, const std::string& bound) {
    passed = passed && ok;
    detail << "\n    " << (ok ? "ok   " : "FAIL ") << what << " = " << format_number(measured)
           << " (" << bound << ")";
  }
  void at_most(const std::string& what, double measured, double bound) {
    require(std::isfinite(measured) && measured <= bound, what, measured,
            "<= " + format_number(bound));
  }
  void within(const std::string& what, double measured, double lo, double hi) {
    require(std::isfinite(measured) && measured >= lo && measured <= hi, what, measured,
            "in [" + format_number(lo) + ", " + format_number(hi) + "]");
  }
  void at_least(const std::string& what, double measured, double lo) {
    require(std::isfinite(measured) && measured >= lo, what, measured, ">= " + format_number(lo));
  }
};

Eigen::MatrixXcd random_coeffs(int rows, int cols, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXcd c(rows, cols);
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = scale * cplx(normal(rng), normal(rng));
  return c;
}

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

// --- 1: spectrum ---------------------------------------------------------------
void spectrum(Outcome& o) {
  const HermiteBasis b = build_hermite_basis(16, 34);
  const JointEigenStructure j = build_joint_eigenstructure(b);
  double h_err = 0, l_err = 0;
  for (int d = 0; d <= 16; ++d) {
    for (int r = 0; r <= d; ++r) {
      const int i = j.block_offset[d] + r;
      const double h = j.h_eigenvalues(i);
      h_err = std::max(h_err, std::abs(h - (std::round(h - 0.5) + 0.5)));
      l_err = std::max(l_err, std::abs(j.l_eigenvalues(i) - (-0.5 * d + r)));
    }
  }
  o.at_most("max distance of H eigenvalues from n + 1/2", h_err, 1e-10);
  o.at_most("max distance of L eigenvalues from -d/2..d/2", l_err, 1e-10);
}

// --- 2: propagator algebra -----------------------------------------------------
void propagator_algebra(Outcome& o) {
  const HermiteBasis b = build_hermite_basis(8, 18);
  const JointEigenStructure j = build_joint_eigenstructure(b);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> angle(-10.0, 10.0);
  double unit = 0, group = 0, comp = 0, anti = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXcd u = random_coeffs(4, b.mode_count(), rng);
    const double n = u.norm();
    const double t1 = angle(rng), t2 = angle(rng);
    for (Generator g : {Generator::H, Generator::H0, Generator::L}) {
      const Eigen::MatrixXcd v = apply_oscillator_propagator(j, u, t1, g);
      unit = std::max(unit, std::abs(v.norm() - n) / n);
      group = std::max(group, (apply_oscillator_propagator(j, v, t2, g) -
                               apply_oscillator_propagator(j, u, t1 + t2, g)).norm() / n);
    }
    const Eigen::MatrixXcd split = apply_oscillator_propagator(
        j, apply_oscillator_propagator(j, u, t1, Generator::L), t1, Generator::H0);
    comp = std::max(comp, (split - apply_oscillator_propagator(j, u, t1, Generator::H)).norm() / n);
    anti = std::max(anti, (apply_oscillator_propagator(j, u, 2 * M_PI, Generator::H) + u).norm() / n);
  }
  o.at_most("unitarity (relative norm change)", unit, 1e-12);
  o.at_most("group law", group, 1e-12);
  o.at_most("H0 then L equals H", comp, 1e-12);
  o.at_most("exp(-2 pi i H) + Id", anti, 1e-12);
}

// --- 3: averaging oracle ---------------------------------------------------------
void averaging_oracle(Outcome& o) {
  auto disc = make_discretization(6, 14, 8.0, 8, PotentialSpec::zero(), 1);
  std::mt19937_64 rng(3);
  double oracle = 0, doubling = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const SpectralField u(disc, Representation::modal,
                          random_coeffs(disc->axial_points(), disc->mode_count(), rng));
    const SpectralField q = eval_Fav(u, 1);
    oracle = std::max(oracle, max_abs(q.data() - eval_Fav_resonant(u, 1).data()));
    doubling = std::max(
        doubling, max_abs(q.data() - eval_Fav(u, 1, 2 * default_theta_count(1, 6)).data()));
  }
  o.at_most("max |quadrature - resonant sum| over 20 fields", oracle, 1e-10);
  o.at_most("max change under N_theta doubling", doubling, 1e-12);
}

// --- 4: averaging symmetries ----------------------------------------------------
void averaging_symmetries(Outcome& o) {
  auto disc = make_discretization(6, 14, 8.0, 8, PotentialSpec::zero(), 4);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> angle(-5.0, 5.0);
  double equiv = 0, gauge = 0, im_mass = 0, im_a = 0;
  for (int sigma = 1; sigma <= 4; ++sigma) {
    for (int trial = 0; trial < 3; ++trial) {
      const SpectralField u(disc, Representation::modal,
                            random_coeffs(disc->axial_points(), disc->mode_count(), rng, 0.3));
      const SpectralField f = eval_Fav(u, sigma);
      const double scale = max_abs(f.data());
      const double tau = angle(rng);
      const SpectralField rot(disc, Representation::modal,
                              apply_oscillator_propagator(disc->joint, u.data(), tau, Generator::H));
      equiv = std::max(equiv, max_abs(eval_Fav(rot, sigma).data() -
                                      apply_oscillator_propagator(disc->joint, f.data(), tau,
                                                                  Generator::H)) / scale);
      const cplx g = std::exp(cplx(0, angle(rng)));
      gauge = std::max(gauge, max_abs(eval_Fav(g * u, sigma).data() - g * f.data()) / scale);
      const SpectralField h0u(disc, Representation::modal,
                              u.data() * disc->basis.h0_eigenvalues().asDiagonal());
      im_mass = std::max(im_mass, std::abs(inner(f, u).imag()) / (f.data().norm() * u.data().norm()));
      im_a = std::max(im_a, std::abs(inner(f, h0u).imag()) / (f.data().norm() * h0u.data().norm()));
    }
  }
  o.at_most("equivariance under exp(-i tau H) (relative)", equiv, 1e-10);
  o.at_most("gauge covariance (relative)", gauge, 1e-10);
  o.at_most("Im<F_av(u), u> (relative)", im_mass, 1e-10);
  o.at_most("Im<F_av(u), H0 u> (relative)", im_a, 1e-10);
}

// --- 5: eps-model conservation ----------------------------------------------------
void eps_conservation(Outcome& o) {
  SimConfig c;
  c.model = ModelKind::eps_nls;
  c.epsilon = 0.1;
  c.sigma = 1;
  c.lambda = 1.0;
  c.dt = c.epsilon * c.epsilon / 20;
  c.t_final = 1.0;
  c.cutoff_degree = 8;
  c.axial_points = 64;
  c.axial_length = 16.0;
  c.potential = PotentialSpec::harmonic(1.0);
  c.initial.kind = InitialDataSpec::Kind::g2;
  c.sample_stride = 20;
  const ConservationStudy st = conservation_study(c);
  o.require(!st.guard_tripped, "run completed", st.guard_tripped ? 0 : 1, "no abort");
  o.at_most("relative mass drift", st.drift("M").coarse, 1e-12);
  o.at_most("<L psi, psi> drift (per unit mass)", st.drift("L").coarse, 1e-6);
  o.at_most("E0_eps relative drift", st.drift("E0_eps").coarse, 1e-6);
  o.within("<L psi, psi> drift ratio under dt halving", st.drift("L").ratio(), 3.5, 4.5);
  o.within("E0_eps drift ratio under dt halving", st.drift("E0_eps").ratio(), 3.5, 4.5);
}

// --- 6: limit-model conservation --------------------------------------------------
void limit_conservation(Outcome& o) {
  for (int sigma = 1; sigma <= 4; ++sigma) {
    SimConfig c;
    c.model = ModelKind::limit_nls;
    c.sigma = sigma;
    c.lambda = 1.0;
    c.dt = 1e-3;
    c.t_final = 1.0;
    c.cutoff_degree = 4;
    c.axial_points = 32;
    c.axial_length = 16.0;
    c.potential = PotentialSpec::harmonic(1.0);
    c.initial.kind = InitialDataSpec::Kind::g2;
    c.sample_stride = 50;
    // Amplitude set so ||F_av(u)|| / ||u|| = 20: a fixed nonlinear time scale across sigma.
    auto disc = make_discretization(c);
    const SpectralField u = initial_field(disc, c.initial);
    const double omega = eval_Fav(u, sigma).data().norm() / u.data().norm();
    c.initial.amplitude = std::pow(20.0 / omega, 1.0 / (2 * sigma));
    const ConservationStudy st = conservation_study(c);
    const std::string tag = " (sigma = " + std::to_string(sigma) + ")";
    o.require(!st.guard_tripped, "run completed" + tag, st.guard_tripped ? 0 : 1, "no abort");
    o.at_most("relative mass drift" + tag, st.drift("M").coarse, 1e-8);
    o.at_most("relative A drift" + tag, st.drift("A").coarse, 1e-8);
    o.within("mass drift ratio under dt halving" + tag, st.drift("M").ratio(), 12, 20);
    o.within("A drift ratio under dt halving" + tag, st.drift("A").ratio(), 12, 20);
  }
}

// --- 7: convergence ----------------------------------------------------------------
bool strictly_decreasing(const ConvergenceStudy& st, bool sigma1) {
  for (std::size_t i = 1; i < st.points.size(); ++i) {
    const auto& a = st.points[i - 1];
    const auto& b = st.points[i];
    const double ga = sigma1 ? a.gap_sigma1_max : a.gap_l2_max;
    const double gb = sigma1 ? b.gap_sigma1_max : b.gap_l2_max;
    if (!(b.epsilon < a.epsilon && gb < ga)) return false;
  }
  return true;
}

void convergence(Outcome& o) {
  LabConfig c;
  c.sim.model = ModelKind::limit_nls;
  c.sim.sigma = 1;
  c.sim.lambda = 1.0;
  c.sim.t_final = 1.0;
  c.sim.cutoff_degree = 8;
  c.sim.axial_points = 64;
  c.sim.axial_length = 16.0;
  c.sim.potential = PotentialSpec::harmonic(1.0);
  c.epsilons = {0.2, 0.1, 0.05, 0.025};
  c.reference_dt = 1e-3;
  c.sample_interval = 0.02;
  c.sim.initial.kind = InitialDataSpec::Kind::g1;
  const ConvergenceStudy smooth = convergence_study(c);
  o.require(strictly_decreasing(smooth, false), "g1: max L2 gap strictly decreasing",
            smooth.points.back().gap_l2_max, "monotone");
  o.require(strictly_decreasing(smooth, true), "g1: max Sigma1 gap strictly decreasing",
            smooth.points.back().gap_sigma1_max, "monotone");
  o.within("g1: log-log slope of the L2 gap", smooth.slope_l2, 1.7, 2.3);
  c.sim.initial.kind = InitialDataSpec::Kind::g3;
  c.sim.initial.seed = 7;
  const ConvergenceStudy rough = convergence_study(c);
  o.at_least("g3: log-log slope of the L2 gap", rough.slope_l2, 0.9);
}

// --- 8: scaling --------------------------------------------------------------------
void scaling(Outcome& o) {
  LabConfig c;
  c.sim.sigma = 4;
  c.sim.lambda = 1.0;
  c.sim.dt = 1e-3;
  c.sim.cutoff_degree = 4;
  c.sim.axial_points = 256;
  c.sim.axial_length = 24.0;
  c.sim.potential = PotentialSpec::zero();
  c.sim.initial.kind = InitialDataSpec::Kind::g2;
  c.sim.initial.amplitude = 6.0;
  c.sim.initial.z_width = 2.0;
  c.mus = {2.0, 4.0};
  c.commutation_time = 0.02;
  const ScalingStudy st = scaling_study(c);
  for (const auto& k : st.cases) {
    const std::string tag = " (mu = " + format_number(k.mu) + ")";
    o.at_most("A^3 E relative change" + tag, k.a3e_rel_error, 1e-8);
    o.at_most("solver-scaling commutation, relative L2" + tag, k.commutation_error, 1e-4);
  }
}

// --- 9: scattering probe -------------------------------------------------------------
LabConfig scatter_config() {
  LabConfig c;
  c.sim.sigma = 4;
  c.sim.lambda = 1.0;
  c.sim.dt = 0.01;
  c.sim.cutoff_degree = 4;
  c.sim.axial_points = 256;
  c.sim.axial_length = 64.0;
  c.sim.potential = PotentialSpec::zero();
  c.sim.initial.kind = InitialDataSpec::Kind::g2;
  c.sim.initial.z_width = 1.0;
  c.scatter_delta = 1.0;
  c.scatter_time = 4.0;
  return c;
}

void scattering(Outcome& o) {
  const ScatterStudy st = scatter_study(scatter_config());
  for (std::size_t k = 0; k < st.increments.size(); ++k) {
    o.detail << "\n    increment [" << format_number(st.times[k]) << ", "
             << format_number(st.times[k + 1]) << "] = " << format_number(st.increments[k]);
  }
  o.at_least("contraction factor inc[T/2,T] / inc[T,2T]", 1.0 / st.contraction, 2.0);
}

// --- 10: infrastructure --------------------------------------------------------------
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void infrastructure(Outcome& o, const std::string& cli, const fs::path& work) {
  fs::remove_all(work);
  fs::create_directories(work);

  auto disc = make_discretization(8, 18, 16.0, 64, PotentialSpec::harmonic(1.0));
  std::mt19937_64 rng(10);
  SpectralField u(disc, Representation::modal,
                  random_coeffs(disc->axial_points(), disc->mode_count(), rng));
  u.set_time(0.3);
  const std::string snap = (work / "field.mnls").string();
  write_snapshot(u, snap);
  const SpectralField back = read_snapshot(snap, disc);
  const bool exact = back.data() == u.data() && back.time() == u.time();
  o.require(exact, "snapshot round trip, max |difference|", max_abs(back.data() - u.data()),
            "bit-exact");

  LabConfig c = parse_config(
      "model = eps_nls epsilon = 0.2 T = 0.1 cutoff = 4 N_z = 32 L_z = 12 data = g3 seed = 5 "
      "potential = harmonic");
  ExperimentOptions a, b;
  a.out_dir = (work / "run_a").string();
  b.out_dir = (work / "run_b").string();
  run_experiment("conservation", c, a);
  run_experiment("conservation", c, b);
  int differing = 0, compared = 0;
  for (const auto& entry : fs::directory_iterator(a.out_dir)) {
    if (entry.path().extension() != ".csv") continue;
    ++compared;
    differing += slurp(entry.path()) != slurp(fs::path(b.out_dir) / entry.path().filename());
  }
  o.require(compared > 0 && differing == 0, "CSV files differing between repeated runs", differing,
            "== 0 of " + std::to_string(compared));

  int code = -1;
  if (!cli.empty()) {
    const fs::path cfg = work / "selftest.cfg";
    std::ofstream(cfg) << "cutoff = 8\nN_z = 64\nL_z = 16\n";
    const std::string cmd = "\"" + cli + "\" selftest --config \"" + cfg.string() + "\" --out \"" +
                            (work / "selftest").string() + "\" > \"" +
                            (work / "selftest.log").string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  o.require(code == 0, "selftest exit code", code, "== 0");
}

struct Criterion {
  int id;
  const char* title;
  double runtime_limit;  // seconds; 0 when none is stated
  std::function<void(Outcome&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"magnls acceptance runs"};
  std::vector<int> which;
  std::string cli;
  std::string work = (fs::temp_directory_path() / "magnls_acceptance").string();
  app.add_option("--criterion", which, "criteria to run (default: all)")
      ->check(CLI::Range(1, 10));
  app.add_option("--cli", cli, "path of the magnls executable (criterion 10)");
  app.add_option("--work", work, "scratch directory");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> all{
      {1, "joint spectrum at cutoff 16", 1.0, spectrum},
      {2, "propagator algebra at cutoff 8", 1.0, propagator_algebra},
      {3, "F_av quadrature vs resonant oracle", 10.0, averaging_oracle},
      {4, "F_av symmetries", 0.0, averaging_symmetries},
      {5, "eps-model conservation", 120.0, eps_conservation},
      {6, "limit-model conservation, sigma = 1..4", 300.0, limit_conservation},
      {7, "filtered-gap convergence in epsilon", 900.0, convergence},
      {8, "nonic scaling symmetry", 300.0, scaling},
      {9, "scattering probe", 300.0, scattering},
      {10, "infrastructure", 0.0,
       [&](Outcome& o) { infrastructure(o, cli, fs::path(work) / "c10"); }},
  };

  bool all_passed = true;
  for (const auto& c : all) {
    if (!which.empty() && std::find(which.begin(), which.end(), c.id) == which.end()) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail << "\n    error: " << e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.runtime_limit > 0) o.at_most("runtime [s]", secs, c.runtime_limit);
    all_passed = all_passed && o.passed;
    std::cout << (o.passed ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.title << " ("
              << format_number(std::round(secs * 1000) / 1000) << " s)" << o.detail.str() << "\n"
              << std::flush;
  }
  return all_passed ? 0 : 1;
}
