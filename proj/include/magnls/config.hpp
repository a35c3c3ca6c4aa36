#pragma once

#include <string>
#include <vector>

#include "magnls/evolvers.hpp"

namespace magnls {

/// SimConfig plus the parameters of the canned experiments.
struct LabConfig {
  SimConfig sim;
  bool dt_given = false;
  std::vector<double> epsilons{0.2, 0.1, 0.05, 0.025};  // converge
  double reference_dt = 1e-3;                           // converge: limit-model step
  double sample_interval = 0.02;                        // converge: gap sampling period
  std::vector<double> mus{2.0, 4.0};                    // scaling
  double commutation_time = 0.02;                       // scaling: t in phi_mu(t) vs phi(mu^2 t)
  bool allow_interpolation = false;                     // scaling: non-dyadic mu
  double scatter_delta = 1e-3;                          // scatter: smallness surrogate
  double scatter_time = 4.0;                            // scatter: T in T/2, T, 2T
};

/// Parses `key = value` lines. `[section]` headers and `#` comments are
/// allowed; several pairs may share a line separated by whitespace. Unknown
/// keys, malformed values and out-of-range settings throw
/// std::invalid_argument naming the key.
LabConfig parse_config(const std::string& text);
LabConfig load_config(const std::string& path);

/// Canonical `key=value` rendering of every setting (used for hashing).
std::string canonical_config(const LabConfig& cfg);

}  // namespace magnls
