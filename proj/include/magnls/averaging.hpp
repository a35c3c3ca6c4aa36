#pragma once

#include "magnls/field_state.hpp"

namespace magnls {

/// F(theta, u) = e^{i theta H} P(|e^{-i theta H} u|^{2 sigma} e^{-i theta H} u), where P is
/// the (exact) Galerkin projection onto the truncated basis. u is modal.
SpectralField eval_F(double theta, const SpectralField& u, int sigma);

/// Smallest admissible theta rule and the default one (threshold rounded up to even).
int theta_threshold(int sigma, int cutoff_degree);
int default_theta_count(int sigma, int cutoff_degree);

/// Trapezoidal average of eval_F over [0, 2 pi) with n_theta nodes. The
/// integrand is a trigonometric polynomial of degree <= (sigma + 1) D, so the
/// rule is exact. n_theta <= 0 selects the default. Throws
/// std::invalid_argument below the threshold.
SpectralField eval_Fav(const SpectralField& u, int sigma, int n_theta = 0);

/// Node-slab kernel of eval_Fav (rows: axial nodes, cols: modes). Used by the
/// integrators, which stay in node space between axial steps.
Eigen::MatrixXcd averaged_power(const Discretization& disc, const Eigen::MatrixXcd& slab,
                                int sigma, int n_theta);

/// Independent cubic oracle: sum over levels n1 + n2 = n3 + n4 of
/// P_{n4}(P_{n1}u P_{n2}u conj(P_{n3}u)). Only sigma = 1 and cutoff <= 10.
SpectralField eval_Fav_resonant(const SpectralField& u, int sigma = 1);

}  // namespace magnls
