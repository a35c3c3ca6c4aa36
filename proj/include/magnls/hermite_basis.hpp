#pragma once

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace magnls {

/// Cartesian Hermite mode (k1, k2); degree = k1 + k2.
struct Mode {
  int k1 = 0;
  int k2 = 0;
  int degree() const { return k1 + k2; }
  bool operator==(const Mode&) const = default;
};

/// Modes with k1 + k2 <= cutoff, degree-major, k1 ascending inside a degree.
std::vector<Mode> triangular_modes(int cutoff_degree);

/// Index of (k1, k2) in the triangular ordering.
inline int mode_index(int k1, int k2) {
  const int d = k1 + k2;
  return d * (d + 1) / 2 + k1;
}

/// Orthonormal Hermite functions phi_k(x) = a^{1/4} psi_k(sqrt(a) x), where
/// psi_k are the standard functions with weight e^{-y^2}. phi_k^2 carries the
/// Gaussian e^{-a x^2}. Returns a (max_degree + 1) x x.size() table.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> hermite_functions(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x, int max_degree, Scalar a) {
  using std::exp;
  using std::sqrt;
  const Eigen::Index n = x.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> table(max_degree + 1, n);
  const Scalar sa = sqrt(a);
  const Scalar norm0 = sqrt(sa) / sqrt(sqrt(Scalar(std::numbers::pi)));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar y = sa * x(i);
    table(0, i) = norm0 * exp(-y * y / 2);
    if (max_degree >= 1) table(1, i) = sqrt(Scalar(2)) * y * table(0, i);
    for (int k = 2; k <= max_degree; ++k) {
      table(k, i) = sqrt(Scalar(2) / k) * y * table(k - 1, i) -
                    sqrt(Scalar(k - 1) / k) * table(k - 2, i);
    }
  }
  return table;
}

/// Gauss rule for integrals of e^{-a x^2} p(x) written as plain integrals:
/// sum_i weights(i) f(x_i) = int f dx exactly whenever f = e^{-a x^2} p with
/// deg p <= 2 n - 1.
struct GaussRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

GaussRule gauss_hermite_rule(int node_count, double a);

/// Truncated 2D Hermite collocation system for H0 = -1/2 Laplacian + |x|^2/8
/// (oscillator frequency omega = 1/2).
struct HermiteBasis {
  int cutoff_degree = 0;
  int node_count = 0;
  std::vector<Mode> modes;
  Eigen::VectorXd nodes;          // per axis
  Eigen::VectorXd weights;        // per axis, plain-integral weights
  Eigen::MatrixXd functions_1d;   // (cutoff + 2) x node_count
  Eigen::VectorXd weights_2d;     // node_count^2, index i1 * n + i2
  Eigen::MatrixXd sample_matrix;  // node_count^2 x modes
  Eigen::MatrixXd analysis_matrix;  // modes x node_count^2

  int mode_count() const { return static_cast<int>(modes.size()); }
  int grid_size() const { return node_count * node_count; }
  /// Eigenvalue of H0 on a Cartesian mode: (k1 + k2 + 1) / 2.
  Eigen::VectorXd h0_eigenvalues() const;
};

/// Throws std::invalid_argument when node_count < cutoff_degree + 1.
HermiteBasis build_hermite_basis(int cutoff_degree, int node_count);

/// Tensor quadrature on which the Galerkin projection of the 2 sigma + 1 power
/// nonlinearity is exact: the integrand h_k |v|^{2 sigma} v is a polynomial of
/// per-axis degree <= (2 sigma + 2) D times e^{-(sigma + 1)|x|^2 / 2}.
/// sigma = 0 yields a grid exact for bilinear forms.
struct ProductGrid {
  int sigma = 0;
  int node_count = 0;
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights_2d;     // n^2
  Eigen::MatrixXd sample_matrix;  // n^2 x modes
  Eigen::MatrixXd synthesis;      // modes x n^2, the transpose (used as C * synthesis)
  Eigen::MatrixXd projector;      // n^2 x modes, weights_2d * sample (used as V * projector)
  Eigen::VectorXd radius_sq;      // |x|^2 at each node
};

/// `extra_degree` adds polynomial weight degree per axis (e.g. 4 for the
/// |x|^4 moments of the Sigma^2 norm with sigma = 0).
ProductGrid build_product_grid(int cutoff_degree, int sigma, int extra_degree = 0);

}  // namespace magnls
