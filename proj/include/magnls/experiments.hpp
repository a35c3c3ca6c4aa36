#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "magnls/config.hpp"
#include "magnls/report.hpp"

namespace magnls {

// --- studies (no file output) -------------------------------------------------

struct DriftPair {
  std::string quantity;
  double coarse = 0;  // drift at dt
  double fine = 0;    // drift at dt / 2
  double ratio() const { return fine > 0 ? coarse / fine : INFINITY; }
};

struct ConservationStudy {
  ObservableSeries coarse;
  ObservableSeries fine;
  std::vector<DriftPair> drifts;  // eps: M, L, E0_eps; limit: M, A
  bool guard_tripped = false;
  std::string abort_message;
  const DriftPair& drift(const std::string& quantity) const;
};

/// Runs `cfg` at dt and dt / 2 (sampling stride doubled so both runs sample
/// the same instants). Mass and energies are relative to their initial value,
/// L is absolute per unit mass.
ConservationStudy conservation_study(const SimConfig& cfg);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct ConvergencePoint {
  double epsilon = 0;
  double gap_l2_max = 0;
  double gap_sigma1_max = 0;
  std::vector<double> times;
  std::vector<double> gap_l2;
  std::vector<double> gap_sigma1;
};

struct ConvergenceStudy {
  std::vector<ConvergencePoint> points;  // in the configured order
  double slope_l2 = NAN;
  double slope_sigma1 = NAN;
};

/// eps-model runs at dt = eps^2 / 20 (or the configured dt) against one
/// limit-model reference at reference_dt; same data, basis and grids.
ConvergenceStudy convergence_study(const LabConfig& cfg, int jobs = 1);

struct ScalingCase {
  double mu = 0;
  double a_ratio = 0;        // A[u_mu] / A[u], expect mu^{-1/2}
  double e_ratio = 0;        // E[u_mu] / E[u], expect mu^{3/2}
  double a3e_rel_error = 0;  // |A^3 E (u_mu) - A^3 E (u)| / |A^3 E (u)|
  double commutation_error = 0;  // relative L^2
};

struct ScalingStudy {
  std::vector<ScalingCase> cases;
};

/// Requires sigma = 4 and zero potential.
ScalingStudy scaling_study(const LabConfig& cfg);

struct ScatterStudy {
  double amplitude = 0;   // applied to unit-mass data so the surrogate equals delta
  double surrogate = 0;
  std::vector<double> times;        // dyadic sample times, ending at 2T
  std::vector<double> increments;   // ||w(t_k) - w(t_{k-1})||_{Sigma_0^1}, k >= 1
  double contraction = 0;           // increment on [T, 2T] / increment on [T/2, T]
  double asymptotic_error = 0;      // last increment, the error bar of phi_+ ~ w(2T)
};

/// Requires sigma = 4 and zero potential.
ScatterStudy scatter_study(const LabConfig& cfg);

/// Unitarity, spectrum, oracle and round-trip suites on the configured grid.
std::vector<Verdict> selftest_checks(const LabConfig& cfg, const std::string& scratch_dir);

// --- experiments (files + manifest) ------------------------------------------

struct ExperimentOptions {
  std::string out_dir = "magnls_out";
  int jobs = 1;
  std::optional<std::uint64_t> seed;
};

const std::vector<std::string>& experiment_names();

/// Writes CSVs, SVG plots and manifest.json into out_dir. Solver aborts
/// become failed verdicts; invalid configurations throw.
RunManifest run_experiment(const std::string& name, LabConfig cfg, const ExperimentOptions& opt);

}  // namespace magnls
