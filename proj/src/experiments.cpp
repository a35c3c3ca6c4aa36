#include "magnls/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <future>
#include <numbers>
#include <random>
#include <stdexcept>

#include "magnls/averaging.hpp"
#include "magnls/snapshot.hpp"

namespace magnls {

namespace fs = std::filesystem;

// --- conservation ------------------------------------------------------------

const DriftPair& ConservationStudy::drift(const std::string& quantity) const {
  for (const auto& d : drifts) {
    if (d.quantity == quantity) return d;
  }
  throw std::out_of_range("ConservationStudy: no drift for " + quantity);
}

namespace {

double measured_drift(const ObservableSeries& s, const std::string& q) {
  if (q != "L") return s.drift(q, true);
  const double m0 = s.rows.empty() ? 1.0 : s.rows.front()[s.column_index("M")];
  return s.drift(q, false) / (m0 > 0 ? m0 : 1.0);
}

}  // namespace

ConservationStudy conservation_study(const SimConfig& cfg) {
  ConservationStudy study;
  SimConfig fine = cfg;
  fine.dt = cfg.effective_dt() / 2.0;
  fine.sample_stride = 2 * cfg.sample_stride;
  auto run = [&](const SimConfig& c, ObservableSeries& into) {
    try {
      into = evolve(c).series;
    } catch (const EvolutionAborted& e) {
      into = e.history;
      study.guard_tripped = true;
      study.abort_message = std::string(e.what()) + " at t = " + format_number(e.time);
    }
  };
  run(cfg, study.coarse);
  if (!study.guard_tripped) run(fine, study.fine);
  const std::vector<std::string> quantities =
      cfg.model == ModelKind::eps_nls ? std::vector<std::string>{"M", "L", "E0_eps"}
                                      : std::vector<std::string>{"M", "A"};
  for (const auto& q : quantities) {
    DriftPair d;
    d.quantity = q;
    d.coarse = measured_drift(study.coarse, q);
    d.fine = study.fine.rows.empty() ? NAN : measured_drift(study.fine, q);
    study.drifts.push_back(d);
  }
  return study;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 2) return NAN;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  return denom == 0 ? NAN : (n * sxy - sx * sy) / denom;
}

// --- convergence -------------------------------------------------------------

namespace {

int stride_for(double interval, double dt, const std::string& what) {
  const double ratio = interval / dt;
  const long stride = std::lround(ratio);
  if (stride < 1 || std::abs(ratio - stride) > 1e-9 * ratio) {
    throw std::invalid_argument(what + ": sample_interval " + format_number(interval) +
                                " is not a multiple of dt " + format_number(dt));
  }
  return static_cast<int>(stride);
}

// Runs f(i) for i in [0, n) on up to `jobs` threads; results land in order.
template <typename F>
void parallel_for(int n, int jobs, F f) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::future<void>> workers;
  for (int w = 0; w < jobs; ++w) {
    workers.push_back(std::async(std::launch::async, [&] {
      for (int i = next++; i < n; i = next++) f(i);
    }));
  }
  for (auto& w : workers) w.get();
}

}  // namespace

ConvergenceStudy convergence_study(const LabConfig& cfg, int jobs) {
  SimConfig base = cfg.sim;
  base.record_observables = false;
  auto disc = make_discretization(base);
  const SpectralField psi0 = initial_field(disc, base.initial);

  SimConfig ref = base;
  ref.model = ModelKind::limit_nls;
  ref.dt = cfg.reference_dt;
  if (std::abs(ref.effective_dt() - ref.dt) > 1e-12 * ref.dt) {
    throw std::invalid_argument("converge: T is not a multiple of reference_dt");
  }
  ref.sample_stride = stride_for(cfg.sample_interval, ref.dt, "converge");
  ref.keep_snapshots = true;
  const std::vector<SpectralField> reference = evolve(ref, psi0).snapshots;

  ConvergenceStudy study;
  study.points.resize(cfg.epsilons.size());
  parallel_for(static_cast<int>(cfg.epsilons.size()), jobs, [&](int i) {
    const double eps = cfg.epsilons[i];
    SimConfig run = base;
    run.model = ModelKind::eps_nls;
    run.epsilon = eps;
    run.dt = cfg.dt_given ? cfg.sim.dt : eps * eps / 20.0;
    if (std::abs(run.effective_dt() - run.dt) > 1e-12 * run.dt) {
      throw std::invalid_argument("converge: T is not a multiple of dt for epsilon " +
                                  format_number(eps));
    }
    run.sample_stride = stride_for(cfg.sample_interval, run.dt, "converge");
    ConvergencePoint& p = study.points[i];
    p.epsilon = eps;
    std::size_t k = 0;
    evolve(run, psi0, [&](const SpectralField& psi, int) {
      if (k >= reference.size()) throw std::logic_error("converge: sample count mismatch");
      const FilteredGap g = filtered_gap(psi, reference[k++], eps);
      p.times.push_back(psi.time());
      p.gap_l2.push_back(g.l2);
      p.gap_sigma1.push_back(g.sigma1);
      p.gap_l2_max = std::max(p.gap_l2_max, g.l2);
      p.gap_sigma1_max = std::max(p.gap_sigma1_max, g.sigma1);
    });
  });
  std::vector<double> e, l2, s1;
  for (const auto& p : study.points) {
    e.push_back(p.epsilon);
    l2.push_back(p.gap_l2_max);
    s1.push_back(p.gap_sigma1_max);
  }
  study.slope_l2 = loglog_slope(e, l2);
  study.slope_sigma1 = loglog_slope(e, s1);
  return study;
}

// --- scaling and scattering --------------------------------------------------

namespace {

void require_critical_setting(const LabConfig& cfg, const char* what) {
  if (cfg.sim.sigma != 4 || cfg.sim.potential.kind != PotentialSpec::Kind::zero) {
    throw std::invalid_argument(std::string(what) +
                                " needs sigma = 4 and potential = zero (the scale-invariant case)");
  }
}

double a3e(const SpectralField& u, const SimConfig& c) {
  const double a = a_functional(u);
  return a * a * a * energy_limit(u, c.lambda, c.sigma, c.n_theta).total();
}

}  // namespace

ScalingStudy scaling_study(const LabConfig& cfg) {
  require_critical_setting(cfg, "scaling");
  SimConfig base = cfg.sim;
  base.model = ModelKind::limit_nls;
  base.record_observables = false;
  auto disc = make_discretization(base);
  const SpectralField psi0 = initial_field(disc, base.initial);
  const double a0 = a_functional(psi0);
  const double e0 = energy_limit(psi0, base.lambda, base.sigma, base.n_theta).total();
  const double q0 = a3e(psi0, base);

  ScalingStudy study;
  for (double mu : cfg.mus) {
    ScalingCase c;
    c.mu = mu;
    const SpectralField scaled = scale_field(psi0, mu, cfg.allow_interpolation);
    c.a_ratio = a_functional(scaled) / a0;
    c.e_ratio = energy_limit(scaled, base.lambda, base.sigma, base.n_theta).total() / e0;
    c.a3e_rel_error = std::abs(a3e(scaled, base) - q0) / std::abs(q0);

    // phi_mu(t) = mu^{1/4} phi(mu^2 t, x, mu z): compare after the same number of steps.
    const double t = cfg.commutation_time;
    SimConfig original = base;
    original.t_final = mu * mu * t;
    original.dt = std::min(base.dt, original.t_final);
    const SpectralField far = evolve(original, psi0).final_state;
    SimConfig fast = original;
    fast.t_final = t;
    fast.dt = original.effective_dt() / (mu * mu);
    const SpectralField evolved_scaled = evolve(fast, scaled).final_state;
    const SpectralField scaled_evolved = scale_field(far, mu, cfg.allow_interpolation);
    SpectralField diff = evolved_scaled;
    diff.data() -= scaled_evolved.data();
    c.commutation_error = diff.data().norm() / scaled_evolved.data().norm();
    study.cases.push_back(c);
  }
  return study;
}

ScatterStudy scatter_study(const LabConfig& cfg) {
  require_critical_setting(cfg, "scatter");
  SimConfig base = cfg.sim;
  base.model = ModelKind::limit_nls;
  base.record_observables = false;
  auto disc = make_discretization(base);
  InitialDataSpec unit = base.initial;
  unit.amplitude = 1.0;
  const SpectralField shape = initial_field(disc, unit);
  const double s1 = norm(shape, NormKind::Lz2Sigmax1);
  const double dz = std::sqrt(norm_parts(shape).grad_z);
  const double surrogate_unit = s1 * s1 * s1 * dz;

  ScatterStudy study;
  // The surrogate is homogeneous of degree 4 in the amplitude.
  study.amplitude = std::pow(cfg.scatter_delta / surrogate_unit, 0.25);
  SpectralField psi0 = shape;
  psi0 *= study.amplitude;
  const double s1a = norm(psi0, NormKind::Lz2Sigmax1);
  study.surrogate = s1a * s1a * s1a * std::sqrt(norm_parts(psi0).grad_z);

  const double T = cfg.scatter_time;
  for (double f : {0.125, 0.25, 0.5, 1.0, 2.0}) study.times.push_back(f * T);
  SimConfig run = base;
  run.t_final = 2.0 * T;
  const double dt = run.effective_dt();
  std::vector<int> sample_steps;
  for (double t : study.times) {
    const long s = std::lround(t / dt);
    if (std::abs(s * dt - t) > 1e-9 * t) {
      throw std::invalid_argument("scatter: T/8 is not a multiple of dt");
    }
    sample_steps.push_back(static_cast<int>(s));
  }
  run.sample_stride = sample_steps.front();
  std::vector<Eigen::MatrixXcd> w;
  evolve(run, psi0, [&](const SpectralField& phi, int step) {
    if (std::find(sample_steps.begin(), sample_steps.end(), step) == sample_steps.end()) return;
    // w(t) = e^{i t H_z} phi(t) for V = 0.
    w.push_back(free_axial_flow(disc->axial, to_node_slab(phi), phi.time()));
  });
  if (w.size() != study.times.size()) throw std::logic_error("scatter: missing samples");
  for (std::size_t k = 1; k < w.size(); ++k) {
    const SpectralField d = from_node_slab(disc, w[k] - w[k - 1]);
    study.increments.push_back(norm(d, NormKind::Sigma01));
  }
  const std::size_t n = study.increments.size();
  study.contraction = study.increments[n - 1] / study.increments[n - 2];
  study.asymptotic_error = study.increments[n - 1];
  return study;
}

// --- selftest ----------------------------------------------------------------

namespace {

Verdict check(const std::string& name, double measured, double bound) {
  Verdict v;
  v.name = name;
  v.measured = measured;
  v.tolerance = "<= " + format_number(bound);
  v.passed = std::isfinite(measured) && measured <= bound;
  return v;
}

Eigen::MatrixXcd random_coeffs(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXcd c(rows, cols);
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = cplx(normal(rng), normal(rng));
  return c;
}

}  // namespace

std::vector<Verdict> selftest_checks(const LabConfig& cfg, const std::string& scratch_dir) {
  std::vector<Verdict> out;
  std::mt19937_64 rng(cfg.sim.initial.seed);
  const int D = cfg.sim.cutoff_degree;
  const int nodes = cfg.sim.node_count > 0 ? cfg.sim.node_count : 2 * D + 2;

  // Spectrum and propagator algebra on the configured cutoff.
  {
    auto disc = make_discretization(D, nodes, cfg.sim.axial_length, 8, cfg.sim.potential, 1);
    const JointEigenStructure& j = disc->joint;
    double spec = 0, lspec = 0, unit = 0;
    for (int i = 0; i < j.mode_count(); ++i) {
      spec = std::max(spec, std::abs(j.h_eigenvalues(i) - (j.level_index[i] + 0.5)));
    }
    for (int d = 0; d <= D; ++d) {
      for (int r = 0; r <= d; ++r) {
        lspec = std::max(lspec, std::abs(j.l_eigenvalues(j.block_offset[d] + r) - (-0.5 * d + r)));
      }
      const Eigen::MatrixXcd& U = j.blocks[d];
      unit = std::max(unit, (U.adjoint() * U - Eigen::MatrixXcd::Identity(d + 1, d + 1))
                                .cwiseAbs()
                                .maxCoeff());
    }
    out.push_back(check("H spectrum in {n + 1/2}", spec, 1e-10));
    out.push_back(check("L spectrum per degree", lspec, 1e-10));
    out.push_back(check("joint blocks unitary", unit, 1e-12));

    const Eigen::MatrixXcd c = random_coeffs(8, disc->mode_count(), rng);
    const double n0 = c.norm();
    double unitarity = 0;
    for (Generator g : {Generator::H, Generator::H0, Generator::L}) {
      unitarity = std::max(
          unitarity, std::abs(apply_oscillator_propagator(j, c, 0.7, g).norm() - n0) / n0);
    }
    const Eigen::MatrixXcd ab = apply_oscillator_propagator(
        j, apply_oscillator_propagator(j, c, 0.3, Generator::H), 1.1, Generator::H);
    const double group =
        (ab - apply_oscillator_propagator(j, c, 1.4, Generator::H)).norm() / n0;
    const Eigen::MatrixXcd composed = apply_oscillator_propagator(
        j, apply_oscillator_propagator(j, c, 0.9, Generator::L), 0.9, Generator::H0);
    const double composition =
        (composed - apply_oscillator_propagator(j, c, 0.9, Generator::H)).norm() / n0;
    const double anti =
        (apply_oscillator_propagator(j, c, 2 * std::numbers::pi, Generator::H) + c).norm() / n0;
    out.push_back(check("propagator unitarity", unitarity, 1e-12));
    out.push_back(check("propagator group law", group, 1e-12));
    out.push_back(check("H = H0 + L composition", composition, 1e-12));
    out.push_back(check("exp(-2 pi i H) = -Id", anti, 1e-12));

    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(c.rows(), c.cols());
    double idempotent = 0;
    for (int n = 0; n <= D; ++n) {
      const Eigen::MatrixXcd p = project_eigenlevel(j, c, n);
      idempotent = std::max(idempotent, (project_eigenlevel(j, p, n) - p).norm() / n0);
      sum += p;
    }
    out.push_back(check("P_n idempotent", idempotent, 1e-12));
    out.push_back(check("sum of P_n = Id", (sum - c).norm() / n0, 1e-12));

    const SpectralField u(disc, Representation::modal, c);
    const SpectralField back = analyze(synthesize(u));
    out.push_back(check("transform round trip", (back.data() - c).norm() / n0, 1e-12));
    out.push_back(check("Parseval",
                        std::abs(grid_norm_sq(*disc, synthesize(u).data()) - mass(u)) / mass(u),
                        1e-12));
    const double moved = std::abs(
        mass(from_node_slab(disc, propagate_axial(disc->axial, to_node_slab(u), 0.37, 3))) -
        mass(u)) / mass(u);
    out.push_back(check("axial propagator unitarity", moved, 1e-12));
  }

  // Averaging oracle and symmetries at a cutoff the O(N^4) oracle can afford.
  {
    const int Dm = std::min(D, 6);
    auto disc = make_discretization(Dm, 2 * Dm + 2, cfg.sim.axial_length, 8, cfg.sim.potential, 1);
    const SpectralField u(disc, Representation::modal,
                          0.3 * random_coeffs(8, disc->mode_count(), rng));
    const SpectralField fav = eval_Fav(u, 1);
    const double scale = fav.data().cwiseAbs().maxCoeff();
    const SpectralField res = eval_Fav_resonant(u, 1);
    out.push_back(check("F_av quadrature vs resonant sum",
                        (fav.data() - res.data()).cwiseAbs().maxCoeff() / scale, 1e-10));
    const SpectralField fav2 = eval_Fav(u, 1, 2 * default_theta_count(1, Dm));
    out.push_back(check("F_av invariant under N_theta doubling",
                        (fav.data() - fav2.data()).cwiseAbs().maxCoeff() / scale, 1e-12));
    const SpectralField h0u(disc, Representation::modal,
                            u.data() * disc->basis.h0_eigenvalues().asDiagonal());
    const double un = u.data().norm() * fav.data().norm();
    out.push_back(check("Im<F_av(u), u> = 0", std::abs(inner(fav, u).imag()) / un, 1e-10));
    out.push_back(check("Im<F_av(u), H0 u> = 0",
                        std::abs(inner(fav, h0u).imag()) / (un * (Dm + 1)), 1e-10));
    const double tau = 0.613;
    const SpectralField rotated(disc, Representation::modal,
                                apply_oscillator_propagator(disc->joint, u.data(), tau,
                                                            Generator::H));
    const Eigen::MatrixXcd lhs = eval_Fav(rotated, 1).data();
    const Eigen::MatrixXcd rhs =
        apply_oscillator_propagator(disc->joint, fav.data(), tau, Generator::H);
    out.push_back(check("F_av equivariance", (lhs - rhs).cwiseAbs().maxCoeff() / scale, 1e-10));
  }

  // Functional identities and snapshot round trip on the configured data.
  {
    SimConfig c = cfg.sim;
    c.axial_points = std::min(c.axial_points, 32);
    if (c.potential.kind == PotentialSpec::Kind::tabulated) c.potential = PotentialSpec::zero();
    auto disc = make_discretization(c);
    const SpectralField u = initial_field(disc, c.initial);
    const double eps = c.epsilon > 0 ? c.epsilon : 0.1;
    const double lhs = e0_eps(u, eps, c.lambda, c.sigma);
    const double rhs = 2 * energy_eps(u, eps, c.lambda, c.sigma) -
                       angular_momentum(u) / (eps * eps);
    out.push_back(check("E0 = 2 E - L / eps^2", std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)),
                        1e-10));
    const NormParts p = norm_parts(u);
    out.push_back(check("2A = ||grad_x u||^2 + ||x u||^2 / 4",
                        std::abs(2 * a_functional(u) - (p.grad_x + 0.25 * p.weight_x)) /
                            std::max(1.0, a_functional(u)),
                        1e-10));
    fs::create_directories(scratch_dir);
    const std::string path = (fs::path(scratch_dir) / "selftest_snapshot.mnls").string();
    write_snapshot(u, path);
    const SpectralField r = read_snapshot(path, disc);
    Verdict v;
    v.name = "snapshot round trip bit-exact";
    v.passed = r.data() == u.data() && r.time() == u.time();
    v.measured = (r.data() - u.data()).cwiseAbs().maxCoeff();
    v.tolerance = "== 0";
    out.push_back(v);
    fs::remove(path);
  }
  return out;
}

// --- experiment drivers ------------------------------------------------------

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"selftest", "conservation", "converge", "scaling",
                                              "scatter"};
  return names;
}

namespace {

struct RunContext {
  fs::path dir;
  RunManifest manifest;

  std::string path(const std::string& file) {
    manifest.outputs.push_back(file);
    return (dir / file).string();
  }
};

Verdict band(const std::string& name, double measured, double lo, double hi) {
  Verdict v;
  v.name = name;
  v.measured = measured;
  v.tolerance = "in [" + format_number(lo) + ", " + format_number(hi) + "]";
  v.passed = std::isfinite(measured) && measured >= lo && measured <= hi;
  return v;
}

Verdict at_least(const std::string& name, double measured, double lo) {
  Verdict v;
  v.name = name;
  v.measured = measured;
  v.tolerance = ">= " + format_number(lo);
  v.passed = std::isfinite(measured) && measured >= lo;
  return v;
}

void write_series(RunContext& ctx, const std::string& stem, const ObservableSeries& s,
                  const std::string& title) {
  write_csv(ctx.path(stem + ".csv"), s.columns, s.rows);
  std::vector<PlotSeries> plots;
  const std::vector<double> t = s.column("time");
  for (std::size_t c = 1; c < s.columns.size(); ++c) {
    const std::string& name = s.columns[c];
    if (name == "Sigma1" || name == "Sigma2" || name == "Lx2Sigmaz1" || name == "boundary_mass") {
      continue;
    }
    // Plot deviations so conserved quantities are readable on one axis.
    PlotSeries p;
    p.label = name + " - " + name + "(0)";
    p.x = t;
    const std::vector<double> q = s.column(name);
    for (double v : q) p.y.push_back(v - q.front());
    plots.push_back(std::move(p));
  }
  write_svg_plot(ctx.path(stem + ".svg"), title, "t", "deviation from t = 0", plots);
}

void run_conservation(RunContext& ctx, const LabConfig& cfg) {
  const ConservationStudy st = conservation_study(cfg.sim);
  write_series(ctx, "conservation_dt", st.coarse, "observables, dt");
  if (!st.fine.rows.empty()) write_series(ctx, "conservation_dt_half", st.fine, "observables, dt/2");
  std::vector<std::vector<std::string>> rows;
  for (const auto& d : st.drifts) {
    rows.push_back({d.quantity, format_number(d.coarse), format_number(d.fine),
                    format_number(d.ratio())});
  }
  write_csv(ctx.path("conservation_drift.csv"),
            {"quantity", "drift_dt", "drift_dt_half", "ratio"}, rows);

  auto& v = ctx.manifest.verdicts;
  if (st.guard_tripped) {
    Verdict g;
    g.name = "guard tripped";
    g.detail = st.abort_message;
    g.tolerance = "no abort";
    v.push_back(g);
    return;
  }
  if (cfg.sim.model == ModelKind::eps_nls) {
    v.push_back(check("mass drift", st.drift("M").coarse, 1e-12));
    v.push_back(check("<L psi, psi> drift", st.drift("L").coarse, 1e-6));
    v.push_back(check("E0_eps drift", st.drift("E0_eps").coarse, 1e-6));
    v.push_back(band("<L psi, psi> drift ratio under dt halving", st.drift("L").ratio(), 3.5, 4.5));
    v.push_back(band("E0_eps drift ratio under dt halving", st.drift("E0_eps").ratio(), 3.5, 4.5));
  } else {
    v.push_back(check("mass drift", st.drift("M").coarse, 1e-8));
    v.push_back(check("A drift", st.drift("A").coarse, 1e-8));
    v.push_back(band("mass drift ratio under dt halving", st.drift("M").ratio(), 12, 20));
    v.push_back(band("A drift ratio under dt halving", st.drift("A").ratio(), 12, 20));
  }
}

void run_converge(RunContext& ctx, const LabConfig& cfg, int jobs) {
  const ConvergenceStudy st = convergence_study(cfg, jobs);
  std::vector<std::vector<std::string>> rows;
  for (const auto& p : st.points) {
    rows.push_back({format_number(p.epsilon), format_number(p.gap_l2_max),
                    format_number(p.gap_sigma1_max)});
  }
  rows.push_back({"slope", format_number(st.slope_l2), format_number(st.slope_sigma1)});
  write_csv(ctx.path("converge.csv"), {"epsilon", "gap_L2_max", "gap_Sigma1_max"}, rows);

  std::vector<PlotSeries> loglog(2);
  loglog[0].label = "gap_L2_max (slope " + format_number(std::round(st.slope_l2 * 100) / 100) + ")";
  loglog[1].label =
      "gap_Sigma1_max (slope " + format_number(std::round(st.slope_sigma1 * 100) / 100) + ")";
  for (const auto& p : st.points) {
    loglog[0].x.push_back(p.epsilon);
    loglog[0].y.push_back(p.gap_l2_max);
    loglog[1].x.push_back(p.epsilon);
    loglog[1].y.push_back(p.gap_sigma1_max);
  }
  write_svg_plot(ctx.path("converge_loglog.svg"), "filtered gap vs epsilon", "epsilon",
                 "max-in-time gap", loglog, true, true);
  std::vector<PlotSeries> traces;
  for (const auto& p : st.points) {
    traces.push_back({"eps = " + format_number(p.epsilon), p.times, p.gap_l2});
    std::vector<std::vector<double>> gap_rows;
    for (std::size_t k = 0; k < p.times.size(); ++k) {
      gap_rows.push_back({p.times[k], p.gap_l2[k], p.gap_sigma1[k]});
    }
    write_csv(ctx.path("converge_gap_eps_" + format_number(p.epsilon) + ".csv"),
              {"time", "gap_L2", "gap_Sigma1"}, gap_rows);
  }
  write_svg_plot(ctx.path("converge_gap_time.svg"), "filtered L2 gap along the run", "t",
                 "gap_L2", traces, false, true);

  auto& v = ctx.manifest.verdicts;
  if (st.points.size() < 2) {
    Verdict ins;
    ins.name = "log-log slope";
    ins.measured = NAN;
    ins.tolerance = "needs >= 2 epsilon values";
    ins.detail = "insufficient points";
    v.push_back(ins);
    return;
  }
  auto decreasing = [&](bool sigma1) {
    // epsilon values are sorted descending before comparing
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : st.points) pts.push_back({p.epsilon, sigma1 ? p.gap_sigma1_max : p.gap_l2_max});
    std::sort(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.first > b.first; });
    for (std::size_t i = 1; i < pts.size(); ++i) {
      if (!(pts[i].second < pts[i - 1].second)) return false;
    }
    return true;
  };
  Verdict d1;
  d1.name = "gap_L2_max strictly decreasing in epsilon";
  d1.passed = decreasing(false);
  d1.measured = d1.passed ? 1 : 0;
  d1.tolerance = "monotone";
  v.push_back(d1);
  Verdict d2 = d1;
  d2.name = "gap_Sigma1_max strictly decreasing in epsilon";
  d2.passed = decreasing(true);
  d2.measured = d2.passed ? 1 : 0;
  v.push_back(d2);
  if (cfg.sim.initial.kind == InitialDataSpec::Kind::g3) {
    v.push_back(at_least("L2 slope (rough data)", st.slope_l2, 0.9));
  } else {
    v.push_back(band("L2 slope (smooth data)", st.slope_l2, 1.7, 2.3));
  }
}

void run_scaling(RunContext& ctx, const LabConfig& cfg) {
  const ScalingStudy st = scaling_study(cfg);
  std::vector<std::vector<std::string>> rows;
  for (const auto& c : st.cases) {
    rows.push_back({format_number(c.mu), format_number(c.a_ratio), format_number(c.e_ratio),
                    format_number(c.a3e_rel_error), format_number(c.commutation_error)});
    ctx.manifest.verdicts.push_back(
        check("A^3 E invariance, mu = " + format_number(c.mu), c.a3e_rel_error, 1e-8));
    ctx.manifest.verdicts.push_back(
        check("A ratio vs mu^-1/2, mu = " + format_number(c.mu),
              std::abs(c.a_ratio - std::pow(c.mu, -0.5)) / std::pow(c.mu, -0.5), 1e-8));
    ctx.manifest.verdicts.push_back(
        check("E ratio vs mu^3/2, mu = " + format_number(c.mu),
              std::abs(c.e_ratio - std::pow(c.mu, 1.5)) / std::pow(c.mu, 1.5), 1e-8));
    ctx.manifest.verdicts.push_back(check(
        "solver-scaling commutation, mu = " + format_number(c.mu), c.commutation_error, 1e-4));
  }
  write_csv(ctx.path("scaling.csv"),
            {"mu", "A_ratio", "E_ratio", "A3E_rel_error", "commutation_rel_L2"}, rows);
}

void run_scatter(RunContext& ctx, const LabConfig& cfg) {
  const ScatterStudy st = scatter_study(cfg);
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < st.increments.size(); ++k) {
    rows.push_back({st.times[k], st.times[k + 1], st.increments[k]});
  }
  write_csv(ctx.path("scatter.csv"), {"t_start", "t_end", "increment_Sigma01"}, rows);
  PlotSeries p{"||w(t) - w(t/2)||", {}, {}};
  for (std::size_t k = 0; k < st.increments.size(); ++k) {
    p.x.push_back(st.times[k + 1]);
    p.y.push_back(st.increments[k]);
  }
  write_svg_plot(ctx.path("scatter.svg"), "interaction-picture Cauchy increments", "t",
                 "Sigma_0^1 increment", {p}, true, true);
  Verdict v = check("dyadic increment contraction (inc[T,2T] / inc[T/2,T])", st.contraction, 0.5);
  v.detail = "phi_+ ~ w(2T) with error bar " + format_number(st.asymptotic_error) +
             "; amplitude " + format_number(st.amplitude) + ", surrogate " +
             format_number(st.surrogate);
  ctx.manifest.verdicts.push_back(v);
}

void run_selftest(RunContext& ctx, const LabConfig& cfg) {
  ctx.manifest.verdicts = selftest_checks(cfg, ctx.dir.string());
  std::vector<std::vector<std::string>> rows;
  for (const auto& v : ctx.manifest.verdicts) {
    rows.push_back({v.name, format_number(v.measured), v.tolerance, v.passed ? "pass" : "fail"});
  }
  write_csv(ctx.path("selftest.csv"), {"check", "measured", "tolerance", "verdict"}, rows);
}

}  // namespace

RunManifest run_experiment(const std::string& name, LabConfig cfg, const ExperimentOptions& opt) {
  if (std::find(experiment_names().begin(), experiment_names().end(), name) ==
      experiment_names().end()) {
    throw std::invalid_argument("unknown experiment '" + name +
                                "'; choose selftest, conservation, converge, scaling or scatter");
  }
  if (opt.seed) cfg.sim.initial.seed = *opt.seed;
  RunContext ctx;
  ctx.dir = opt.out_dir;
  fs::create_directories(ctx.dir);
  ctx.manifest.experiment = name;
  ctx.manifest.config_hash = hex64(fnv1a(canonical_config(cfg)));
  ctx.manifest.start_time = utc_timestamp();

  try {
    if (name == "selftest") run_selftest(ctx, cfg);
    else if (name == "conservation") run_conservation(ctx, cfg);
    else if (name == "converge") run_converge(ctx, cfg, opt.jobs);
    else if (name == "scaling") run_scaling(ctx, cfg);
    else run_scatter(ctx, cfg);
  } catch (const EvolutionAborted& e) {
    Verdict v;
    v.name = "solver aborted";
    v.detail = std::string(e.what()) + " at t = " + format_number(e.time);
    v.tolerance = "no abort";
    v.measured = e.time;
    ctx.manifest.verdicts.push_back(v);
  }

  ctx.manifest.end_time = utc_timestamp();
  {
    std::ofstream out(ctx.dir / "manifest.json", std::ios::trunc);
    out << ctx.manifest.to_json() << '\n';
  }
  return ctx.manifest;
}

}  // namespace magnls
