#include "magnls/hermite_basis.hpp"

#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace magnls {

std::vector<Mode> triangular_modes(int cutoff_degree) {
  std::vector<Mode> modes;
  modes.reserve((cutoff_degree + 1) * (cutoff_degree + 2) / 2);
  for (int d = 0; d <= cutoff_degree; ++d) {
    for (int k1 = 0; k1 <= d; ++k1) modes.push_back({k1, d - k1});
  }
  return modes;
}

namespace {

// psi_n(y) and psi_n'(y) for the standard orthonormal Hermite functions.
std::pair<double, double> psi_and_derivative(int n, double y) {
  double prev = 0.0;
  double cur = std::exp(-y * y / 2) / std::sqrt(std::sqrt(std::numbers::pi));
  for (int k = 1; k <= n; ++k) {
    const double next = std::sqrt(2.0 / k) * y * cur - std::sqrt(double(k - 1) / k) * prev;
    prev = cur;
    cur = next;
  }
  // psi_n' = sqrt(2n) psi_{n-1} - y psi_n
  return {cur, std::sqrt(2.0 * n) * prev - y * cur};
}

}  // namespace

GaussRule gauss_hermite_rule(int node_count, double a) {
  if (node_count < 1) throw std::invalid_argument("gauss_hermite_rule: node_count must be >= 1");
  if (!(a > 0)) throw std::invalid_argument("gauss_hermite_rule: weight exponent must be positive");
  const int n = node_count;

  // Golub-Welsch for the physicists' weight e^{-y^2}, then Newton polish.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(k / 2.0);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi, Eigen::EigenvaluesOnly);
  Eigen::VectorXd y = solver.eigenvalues();
  for (int i = 0; i < n; ++i) {
    for (int it = 0; it < 4; ++it) {
      const auto [p, dp] = psi_and_derivative(n, y(i));
      if (dp == 0.0) break;
      y(i) -= p / dp;
    }
  }
  // Symmetrize: the rule is even.
  for (int i = 0; i < n / 2; ++i) {
    const double m = 0.5 * (y(n - 1 - i) - y(i));
    y(i) = -m;
    y(n - 1 - i) = m;
  }
  if (n % 2 == 1) y(n / 2) = 0.0;

  GaussRule rule;
  rule.nodes = y / std::sqrt(a);
  // Christoffel weights with functions orthonormal in plain L^2.
  const Eigen::MatrixXd phi = hermite_functions<double>(rule.nodes, n - 1, a);
  rule.weights = phi.colwise().squaredNorm().cwiseInverse().transpose();
  for (int i = 0; i < n / 2; ++i) {
    const double w = 0.5 * (rule.weights(i) + rule.weights(n - 1 - i));
    rule.weights(i) = rule.weights(n - 1 - i) = w;
  }
  return rule;
}

Eigen::VectorXd HermiteBasis::h0_eigenvalues() const {
  Eigen::VectorXd ev(mode_count());
  for (int m = 0; m < mode_count(); ++m) ev(m) = 0.5 * (modes[m].degree() + 1);
  return ev;
}

namespace {

Eigen::MatrixXd tensor_samples(const Eigen::MatrixXd& f1d, const std::vector<Mode>& modes) {
  const Eigen::Index n = f1d.cols();
  Eigen::MatrixXd s(n * n, static_cast<Eigen::Index>(modes.size()));
  for (std::size_t m = 0; m < modes.size(); ++m) {
    for (Eigen::Index i1 = 0; i1 < n; ++i1) {
      for (Eigen::Index i2 = 0; i2 < n; ++i2) {
        s(i1 * n + i2, m) = f1d(modes[m].k1, i1) * f1d(modes[m].k2, i2);
      }
    }
  }
  return s;
}

Eigen::VectorXd tensor_weights(const Eigen::VectorXd& w) {
  const Eigen::Index n = w.size();
  Eigen::VectorXd w2(n * n);
  for (Eigen::Index i1 = 0; i1 < n; ++i1) {
    for (Eigen::Index i2 = 0; i2 < n; ++i2) w2(i1 * n + i2) = w(i1) * w(i2);
  }
  return w2;
}

}  // namespace

HermiteBasis build_hermite_basis(int cutoff_degree, int node_count) {
  if (cutoff_degree < 0) throw std::invalid_argument("build_hermite_basis: negative cutoff_degree");
  if (node_count < cutoff_degree + 1) {
    throw std::invalid_argument("build_hermite_basis: node_count " + std::to_string(node_count) +
                                " < cutoff_degree + 1 = " + std::to_string(cutoff_degree + 1) +
                                " makes the transform rank deficient");
  }
  HermiteBasis b;
  b.cutoff_degree = cutoff_degree;
  b.node_count = node_count;
  b.modes = triangular_modes(cutoff_degree);
  // omega = 1/2: h_k^2 carries e^{-x^2/2}.
  const GaussRule rule = gauss_hermite_rule(node_count, 0.5);
  b.nodes = rule.nodes;
  b.weights = rule.weights;
  b.functions_1d = hermite_functions<double>(b.nodes, cutoff_degree + 1, 0.5);
  b.weights_2d = tensor_weights(b.weights);
  b.sample_matrix = tensor_samples(b.functions_1d, b.modes);

  // Weighted pseudo-inverse of the synthesis. With node_count >= cutoff + 1 the
  // quadrature integrates every h_j h_k exactly, so S^T W S = I and S^T W is
  // already the exact left inverse.
  b.analysis_matrix = b.sample_matrix.transpose() * b.weights_2d.asDiagonal();
  return b;
}

ProductGrid build_product_grid(int cutoff_degree, int sigma, int extra_degree) {
  if (sigma < 0) throw std::invalid_argument("build_product_grid: negative sigma");
  ProductGrid g;
  g.sigma = sigma;
  const int degree = (2 * sigma + 2) * cutoff_degree + extra_degree;
  g.node_count = degree / 2 + 1;
  const GaussRule rule = gauss_hermite_rule(g.node_count, 0.5 * (sigma + 1));
  g.nodes = rule.nodes;
  g.weights_2d = tensor_weights(rule.weights);
  const Eigen::MatrixXd f1d = hermite_functions<double>(g.nodes, cutoff_degree, 0.5);
  g.sample_matrix = tensor_samples(f1d, triangular_modes(cutoff_degree));
  g.synthesis = g.sample_matrix.transpose();
  g.projector = g.weights_2d.asDiagonal() * g.sample_matrix;
  const Eigen::Index n = g.node_count;
  g.radius_sq.resize(n * n);
  for (Eigen::Index i1 = 0; i1 < n; ++i1) {
    for (Eigen::Index i2 = 0; i2 < n; ++i2) {
      g.radius_sq(i1 * n + i2) = g.nodes(i1) * g.nodes(i1) + g.nodes(i2) * g.nodes(i2);
    }
  }
  return g;
}

}  // namespace magnls
