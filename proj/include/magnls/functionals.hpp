#pragma once

#include <string>
#include <vector>

#include "magnls/field_state.hpp"

namespace magnls {

double mass(const SpectralField& u);

/// <L u, u> from the joint-mode L eigenvalues.
double angular_momentum(const SpectralField& u);

/// <H0 u, u> = 1/2 ||grad_x u||^2 + 1/8 ||x u||^2.
double a_functional(const SpectralField& u);

/// <H_z u, u> split into the kinetic part 1/2 ||d_z u||^2 and the potential part.
double axial_kinetic(const SpectralField& u);
double axial_potential(const SpectralField& u);

/// Hamiltonian of the eps-model:
/// 1/2 (eps^-2 <H u, u> + <H_z u, u>) + lambda / (2 (sigma + 1)) ||u||_{2 sigma + 2}^{2 sigma + 2}.
double energy_eps(const SpectralField& u, double epsilon, double lambda, int sigma);

/// eps^-2 (1/2 ||grad_x u||^2 + 1/8 ||x u||^2) + 1/2 ||d_z u||^2 + int V |u|^2
///   + lambda / (sigma + 1) ||u||_{2 sigma + 2}^{2 sigma + 2}
/// which equals 2 energy_eps - eps^-2 angular_momentum.
double e0_eps(const SpectralField& u, double epsilon, double lambda, int sigma);

struct LimitEnergy {
  double b1 = 0;         // 1/2 ||d_z u||^2
  double b2 = 0;         // int V |u|^2
  double nonlinear = 0;  // lambda / (sigma + 1) * theta-average of ||e^{-i theta H} u||^{2 sigma + 2}
  double total() const { return b1 + b2 + nonlinear; }
};

/// n_theta <= 0 selects the averaging default.
LimitEnergy energy_limit(const SpectralField& u, double lambda, int sigma, int n_theta = 0);

/// mu^{1/4} u(x, mu z). Powers of two mu >= 1 resample exactly on the grid;
/// any other mu needs allow_interpolation (band-limited trigonometric
/// interpolation). Throws for mu <= 0 or when the scaled field would carry
/// more than 1e-8 of its mass into the outer tenth of the domain.
SpectralField scale_field(const SpectralField& u, double mu, bool allow_interpolation = false);

/// Named columns of sampled observables; rows strictly increasing in time.
struct ObservableSeries {
  std::vector<std::string> columns;  // first column is "time"
  std::vector<std::vector<double>> rows;

  int column_index(const std::string& name) const;
  std::vector<double> column(const std::string& name) const;
  /// max_t |q(t) - q(0)| / scale, with scale = |q(0)| or 1 when q(0) == 0 and relative.
  double drift(const std::string& name, bool relative = true) const;
};

enum class ModelKind { eps_nls, limit_nls };

std::vector<std::string> observable_columns(ModelKind model);

/// One row matching observable_columns(model).
std::vector<double> sample_observables(const SpectralField& u, ModelKind model, double epsilon,
                                       double lambda, int sigma, int n_theta);

}  // namespace magnls
