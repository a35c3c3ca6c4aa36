#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "magnls/functionals.hpp"

namespace magnls {

struct InitialDataSpec {
  enum class Kind { g1, g2, g3 };
  Kind kind = Kind::g1;
  /// Data are normalized to unit mass, then multiplied by amplitude.
  double amplitude = 1.0;
  /// Gaussian width in z: exp(-z^2 / (2 width^2)).
  double z_width = 1.0;
  std::uint64_t seed = 1;
};

struct SimConfig {
  ModelKind model = ModelKind::limit_nls;
  double epsilon = 0.0;  // eps_nls only
  int sigma = 1;
  double lambda = 1.0;
  double dt = 1e-3;
  double t_final = 1.0;
  int cutoff_degree = 8;
  int node_count = 0;  // 0: 2 * cutoff + 2
  int axial_points = 64;
  double axial_length = 16.0;
  PotentialSpec potential = PotentialSpec::harmonic(1.0);
  int n_theta = 0;  // 0: averaging default
  InitialDataSpec initial;
  int sample_stride = 1;    // observables every `sample_stride` steps (and at the end)
  bool keep_snapshots = false;  // store the field at every sample
  bool nonlinearity = true;     // diagnostic switch for step_eps
  bool record_observables = true;

  /// Set when an eps-model step exceeds eps^2 / 10.
  bool stiff_warning() const;
  int step_count() const;
  double effective_dt() const;
  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

std::shared_ptr<const Discretization> make_discretization(const SimConfig& cfg);

SpectralField initial_field(std::shared_ptr<const Discretization> disc, const InitialDataSpec& spec);

/// Raised by step_limit when a stage norm grows by more than 10 % in a step,
/// and forwarded by evolve with the history gathered so far.
struct EvolutionAborted : std::runtime_error {
  EvolutionAborted(const std::string& what, double t, int s)
      : std::runtime_error(what), time(t), step(s) {}
  double time;
  int step;
  ObservableSeries history;
};

/// Strang step of the eps-model. The linear half steps are exact; the
/// nonlinear substep solves the Galerkin system i u' = lambda P(|u|^{2 sigma} u)
/// by the implicit midpoint rule, which conserves mass and <L u, u> exactly.
SpectralField step_eps(const SpectralField& state, const SimConfig& cfg);

/// Strang step of the limit model: half axial flow, classical RK4 for
/// i phi' = lambda F_av(phi), half axial flow.
SpectralField step_limit(const SpectralField& state, const SimConfig& cfg);

struct EvolutionResult {
  SpectralField final_state;
  ObservableSeries series;
  std::vector<SpectralField> snapshots;  // one per sample when keep_snapshots
};

using SampleObserver = std::function<void(const SpectralField&, int step)>;

/// Runs from t = 0 to t_final starting at `initial` (or the configured data).
EvolutionResult evolve(const SimConfig& cfg, const SampleObserver& observer = {});
EvolutionResult evolve(const SimConfig& cfg, const SpectralField& initial,
                       const SampleObserver& observer = {});

struct FilteredGap {
  double l2 = 0;
  double sigma1 = 0;
};

/// Norms of e^{i t H / eps^2} psi - phi. Throws on different
/// discretizations or times.
FilteredGap filtered_gap(const SpectralField& psi_eps, const SpectralField& phi, double epsilon);

}  // namespace magnls
