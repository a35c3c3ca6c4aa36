#include "magnls/evolvers.hpp"

#include <cmath>
#include <random>

#include "magnls/averaging.hpp"

namespace magnls {

// --- configuration -----------------------------------------------------------

bool SimConfig::stiff_warning() const {
  return model == ModelKind::eps_nls && dt > epsilon * epsilon / 10.0;
}

int SimConfig::step_count() const {
  if (t_final == 0.0) return 0;
  return static_cast<int>(std::ceil(t_final / dt - 1e-9));
}

double SimConfig::effective_dt() const {
  const int n = step_count();
  return n == 0 ? dt : t_final / n;
}

void SimConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
  if (model == ModelKind::eps_nls && !(epsilon > 0)) fail("epsilon must be > 0 for eps_nls");
  if (sigma < 1 || sigma > 4) {
    fail("sigma = " + std::to_string(sigma) + " is not supported; choose from {1, 2, 3, 4}");
  }
  if (!std::isfinite(lambda)) fail("lambda must be finite");
  if (!(dt > 0)) fail("dt must be > 0");
  if (!(t_final >= 0)) fail("t_final must be >= 0");
  if (t_final > 0 && dt > t_final) fail("dt must not exceed t_final");
  if (cutoff_degree < 0) fail("cutoff must be >= 0");
  if (node_count != 0 && node_count < cutoff_degree + 1) fail("nodes must be >= cutoff + 1");
  if (sample_stride < 1) fail("stride must be >= 1");
  if (n_theta != 0 && n_theta < (sigma + 2) * cutoff_degree + 1) {
    fail("n_theta must be >= (sigma + 2) * cutoff + 1 = " +
         std::to_string((sigma + 2) * cutoff_degree + 1));
  }
  if (!(initial.amplitude >= 0)) fail("amplitude must be >= 0");
  if (!(initial.z_width > 0)) fail("z_width must be > 0");
}

std::shared_ptr<const Discretization> make_discretization(const SimConfig& cfg) {
  const int nodes = cfg.node_count > 0 ? cfg.node_count : 2 * cfg.cutoff_degree + 2;
  return make_discretization(cfg.cutoff_degree, nodes, cfg.axial_length, cfg.axial_points,
                             cfg.potential, cfg.sigma);
}

SpectralField initial_field(std::shared_ptr<const Discretization> disc,
                            const InitialDataSpec& spec) {
  const AxialGrid& g = disc->axial;
  const int rows = g.point_count;
  const int modes = disc->mode_count();
  Eigen::MatrixXcd slab = Eigen::MatrixXcd::Zero(rows, modes);
  Eigen::VectorXd envelope(rows);
  for (int j = 0; j < rows; ++j) {
    const double s = g.z(j) / spec.z_width;
    envelope(j) = std::exp(-0.5 * s * s);
  }
  switch (spec.kind) {
    case InitialDataSpec::Kind::g1:
      slab.col(0) = envelope.cast<cplx>();
      break;
    case InitialDataSpec::Kind::g2:
      for (int m = 0; m < std::min(modes, 3); ++m) slab.col(m) = envelope.cast<cplx>();
      break;
    case InitialDataSpec::Kind::g3: {
      // Random coefficients decaying like (1 + n)^-3 (1 + |k|)^-3, localized
      // by the Gaussian envelope so the field vanishes at the domain edge.
      std::mt19937_64 rng(spec.seed);
      std::normal_distribution<double> normal;
      Eigen::MatrixXcd coeffs(rows, modes);
      const auto& mode_list = disc->basis.modes;
      for (int m = 0; m < modes; ++m) {
        const double wx = std::pow(1.0 + mode_list[m].degree(), -3.0);
        for (int r = 0; r < rows; ++r) {
          const double wz = std::pow(1.0 + std::abs(g.wavenumber(r)), -3.0);
          const double re = normal(rng);
          const double im = normal(rng);
          coeffs(r, m) = wx * wz * cplx(re, im);
        }
      }
      slab = envelope.cast<cplx>().asDiagonal() * axial_to_nodes(g, coeffs);
      break;
    }
  }
  SpectralField f = from_node_slab(disc, slab, 0.0);
  const double n = f.data().norm();
  if (n > 0) f *= spec.amplitude / n;
  return f;
}

// --- steppers on node slabs --------------------------------------------------

namespace {

void eps_linear(const Discretization& disc, Eigen::MatrixXcd& slab, double tau, double epsilon) {
  propagate_oscillator_inplace(disc.joint, slab, tau / (epsilon * epsilon), Generator::H);
  propagate_axial_inplace(disc.axial, slab, tau);
}

// Implicit midpoint for i u' = lambda P(|u|^{2 sigma} u) per axial node.
void eps_nonlinear(const Discretization& disc, Eigen::MatrixXcd& slab, double dt, double lambda,
                   int sigma) {
  const double scale = slab.norm();
  if (scale == 0.0) return;
  const cplx factor(0.0, -0.5 * dt * lambda);
  Eigen::MatrixXcd mid = slab;
  double previous = INFINITY;
  double change = INFINITY;
  for (int it = 0; it < 60; ++it) {
    Eigen::MatrixXcd next = slab + factor * galerkin_power(disc, mid, sigma);
    change = (next - mid).norm();
    mid.swap(next);
    if (change <= 1e-16 * scale) break;
    // Past the contraction regime the update only reshuffles round-off.
    if (it >= 2 && change >= previous) break;
    previous = change;
  }
  if (change > 1e-10 * scale) {
    throw EvolutionAborted("implicit midpoint iteration did not converge", 0.0, -1);
  }
  slab = 2.0 * mid - slab;
}

void limit_nonlinear(const Discretization& disc, Eigen::MatrixXcd& slab, double dt, double lambda,
                     int sigma, int n_theta) {
  const double start = slab.norm();
  const cplx rate(0.0, -lambda);
  auto f = [&](const Eigen::MatrixXcd& v) -> Eigen::MatrixXcd {
    return rate * averaged_power(disc, v, sigma, n_theta);
  };
  auto guard = [&](const Eigen::MatrixXcd& v) {
    if (v.norm() > 1.1 * start) {
      throw EvolutionAborted("blow-up guard tripped: stage norm grew by more than 10%", 0.0, -1);
    }
  };
  const Eigen::MatrixXcd k1 = f(slab);
  Eigen::MatrixXcd y = slab + 0.5 * dt * k1;
  guard(y);
  const Eigen::MatrixXcd k2 = f(y);
  y = slab + 0.5 * dt * k2;
  guard(y);
  const Eigen::MatrixXcd k3 = f(y);
  y = slab + dt * k3;
  guard(y);
  const Eigen::MatrixXcd k4 = f(y);
  slab += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  guard(slab);
}

void step_slab(const Discretization& disc, Eigen::MatrixXcd& slab, const SimConfig& cfg,
               double dt) {
  if (cfg.model == ModelKind::eps_nls) {
    eps_linear(disc, slab, 0.5 * dt, cfg.epsilon);
    if (cfg.nonlinearity) eps_nonlinear(disc, slab, dt, cfg.lambda, cfg.sigma);
    eps_linear(disc, slab, 0.5 * dt, cfg.epsilon);
  } else {
    propagate_axial_inplace(disc.axial, slab, 0.5 * dt);
    if (cfg.nonlinearity) limit_nonlinear(disc, slab, dt, cfg.lambda, cfg.sigma, cfg.n_theta);
    propagate_axial_inplace(disc.axial, slab, 0.5 * dt);
  }
}

SpectralField step_field(const SpectralField& state, const SimConfig& cfg, ModelKind expected,
                         const char* what) {
  if (cfg.model != expected) throw std::invalid_argument(std::string(what) + ": wrong model");
  Eigen::MatrixXcd slab = to_node_slab(state);
  try {
    step_slab(state.disc(), slab, cfg, cfg.dt);
  } catch (EvolutionAborted& e) {
    e.time = state.time();
    throw;
  }
  return from_node_slab(state.disc_ptr(), slab, state.time() + cfg.dt);
}

}  // namespace

SpectralField step_eps(const SpectralField& state, const SimConfig& cfg) {
  return step_field(state, cfg, ModelKind::eps_nls, "step_eps");
}

SpectralField step_limit(const SpectralField& state, const SimConfig& cfg) {
  return step_field(state, cfg, ModelKind::limit_nls, "step_limit");
}

// --- driver ------------------------------------------------------------------

EvolutionResult evolve(const SimConfig& cfg, const SampleObserver& observer) {
  cfg.validate();
  auto disc = make_discretization(cfg);
  return evolve(cfg, initial_field(disc, cfg.initial), observer);
}

EvolutionResult evolve(const SimConfig& cfg, const SpectralField& initial,
                       const SampleObserver& observer) {
  cfg.validate();
  const Discretization& disc = initial.disc();
  const int steps = cfg.step_count();
  const double dt = cfg.effective_dt();
  EvolutionResult result;
  result.series.columns = observable_columns(cfg.model);

  auto sample = [&](const SpectralField& f, int step) {
    if (cfg.record_observables) {
      result.series.rows.push_back(
          sample_observables(f, cfg.model, cfg.epsilon, cfg.lambda, cfg.sigma, cfg.n_theta));
    }
    if (cfg.keep_snapshots) result.snapshots.push_back(f);
    if (observer) observer(f, step);
  };

  Eigen::MatrixXcd slab = to_node_slab(initial);
  sample(initial, 0);
  for (int s = 1; s <= steps; ++s) {
    try {
      step_slab(disc, slab, cfg, dt);
    } catch (EvolutionAborted& e) {
      e.time = (s - 1) * dt;
      e.step = s;
      e.history = result.series;
      throw;
    }
    if (s % cfg.sample_stride == 0 || s == steps) {
      sample(from_node_slab(initial.disc_ptr(), slab, s * dt), s);
    }
  }
  result.final_state =
      steps == 0 ? initial : from_node_slab(initial.disc_ptr(), slab, steps * dt);
  return result;
}

FilteredGap filtered_gap(const SpectralField& psi_eps, const SpectralField& phi, double epsilon) {
  if (psi_eps.disc_ptr() != phi.disc_ptr()) {
    throw std::invalid_argument("filtered_gap: fields live on different discretizations");
  }
  const double t = psi_eps.time();
  if (std::abs(t - phi.time()) > 1e-9 * std::max(1.0, std::abs(t))) {
    throw std::invalid_argument("filtered_gap: fields are at different times");
  }
  SpectralField diff = psi_eps;
  propagate_oscillator_inplace(psi_eps.disc().joint, diff.data(), -t / (epsilon * epsilon),
                               Generator::H);
  diff -= phi;
  return {norm(diff, NormKind::L2), norm(diff, NormKind::Sigma1)};
}

}  // namespace magnls
