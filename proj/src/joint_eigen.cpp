#include "magnls/joint_eigen.hpp"

#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace magnls {

namespace {

// d/dx h_k = (sqrt(k) h_{k-1} - sqrt(k+1) h_{k+1}) / 2 at the basis nodes.
Eigen::MatrixXd derivative_table(const HermiteBasis& basis) {
  const int D = basis.cutoff_degree;
  const Eigen::MatrixXd& f = basis.functions_1d;
  Eigen::MatrixXd df(D + 1, basis.node_count);
  for (int k = 0; k <= D; ++k) {
    df.row(k) = -0.5 * std::sqrt(double(k + 1)) * f.row(k + 1);
    if (k > 0) df.row(k) += 0.5 * std::sqrt(double(k)) * f.row(k - 1);
  }
  return df;
}

}  // namespace

JointEigenStructure build_joint_eigenstructure(const HermiteBasis& basis) {
  const int D = basis.cutoff_degree;
  const int n = basis.node_count;
  const Eigen::MatrixXd& f = basis.functions_1d;
  const Eigen::MatrixXd df = derivative_table(basis);
  const Eigen::VectorXd& x = basis.nodes;
  const Eigen::VectorXd& w = basis.weights;

  JointEigenStructure joint;
  joint.cutoff_degree = D;
  const int M = basis.mode_count();
  joint.l_eigenvalues.resize(M);
  joint.h_eigenvalues.resize(M);
  joint.level_index.resize(M);

  for (int d = 0; d <= D; ++d) {
    const int offset = d * (d + 1) / 2;
    joint.block_offset.push_back(offset);
    // <h_j, L h_k> = -(i/2) int h_j (-x2 d1 + x1 d2) h_k, separable per axis.
    Eigen::MatrixXcd block(d + 1, d + 1);
    for (int a = 0; a <= d; ++a) {
      const int j1 = a, j2 = d - a;
      for (int b = 0; b <= d; ++b) {
        const int k1 = b, k2 = d - b;
        double d1_x1 = 0, x_h_1 = 0, x_h_2 = 0, d2_x2 = 0;
        for (int i = 0; i < n; ++i) {
          d1_x1 += w(i) * f(j1, i) * df(k1, i);
          x_h_1 += w(i) * f(j1, i) * x(i) * f(k1, i);
          x_h_2 += w(i) * f(j2, i) * x(i) * f(k2, i);
          d2_x2 += w(i) * f(j2, i) * df(k2, i);
        }
        const double rotation = -d1_x1 * x_h_2 + x_h_1 * d2_x2;
        block(a, b) = cplx(0.0, -0.5) * rotation;
      }
    }
    const double asym = (block - block.adjoint()).cwiseAbs().maxCoeff();
    if (asym > 1e-10) {
      throw std::runtime_error("build_joint_eigenstructure: degree " + std::to_string(d) +
                               " block of L departs from self-adjointness by " +
                               std::to_string(asym));
    }
    const Eigen::MatrixXcd herm = 0.5 * (block + block.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm);
    joint.l_blocks.push_back(herm);
    joint.blocks.push_back(solver.eigenvectors());
    for (int r = 0; r <= d; ++r) {
      const double l = solver.eigenvalues()(r);
      joint.l_eigenvalues(offset + r) = l;
      joint.h_eigenvalues(offset + r) = 0.5 * (d + 1) + l;
      joint.level_index[offset + r] = static_cast<int>(std::lround(0.5 * d + l));
    }
  }
  return joint;
}

namespace {

template <typename PhaseFn>
void apply_block_diagonal(const JointEigenStructure& joint, Eigen::MatrixXcd& coeffs,
                          PhaseFn phase) {
  for (std::size_t d = 0; d < joint.blocks.size(); ++d) {
    const int off = joint.block_offset[d];
    const int size = static_cast<int>(d) + 1;
    const Eigen::MatrixXcd& U = joint.blocks[d];
    Eigen::VectorXcd diag(size);
    for (int r = 0; r < size; ++r) diag(r) = phase(off + r, static_cast<int>(d));
    // row-vector convention: c^T <- c^T (U diag U^H)^T
    const Eigen::MatrixXcd op = (U * diag.asDiagonal() * U.adjoint()).transpose();
    coeffs.middleCols(off, size) = coeffs.middleCols(off, size) * op;
  }
}

}  // namespace

void propagate_oscillator_inplace(const JointEigenStructure& joint, Eigen::MatrixXcd& coeffs,
                                  double theta, Generator generator) {
  if (coeffs.cols() != joint.mode_count()) {
    throw std::invalid_argument("apply_oscillator_propagator: coefficient width mismatch");
  }
  if (theta == 0.0) return;
  switch (generator) {
    case Generator::H0:
      for (std::size_t d = 0; d < joint.blocks.size(); ++d) {
        const cplx ph = std::exp(cplx(0.0, -theta * 0.5 * (double(d) + 1)));
        coeffs.middleCols(joint.block_offset[d], d + 1) *= ph;
      }
      return;
    case Generator::L:
      apply_block_diagonal(joint, coeffs, [&](int j, int) {
        return std::exp(cplx(0.0, -theta * joint.l_eigenvalues(j)));
      });
      return;
    case Generator::H:
      apply_block_diagonal(joint, coeffs, [&](int j, int) {
        return std::exp(cplx(0.0, -theta * joint.h_eigenvalues(j)));
      });
      return;
  }
}

Eigen::MatrixXcd apply_oscillator_propagator(const JointEigenStructure& joint,
                                             const Eigen::MatrixXcd& coeffs, double theta,
                                             Generator generator) {
  Eigen::MatrixXcd out = coeffs;
  propagate_oscillator_inplace(joint, out, theta, generator);
  return out;
}

Eigen::MatrixXcd project_eigenlevel(const JointEigenStructure& joint,
                                    const Eigen::MatrixXcd& coeffs, int n) {
  if (n < 0) throw std::invalid_argument("project_eigenlevel: negative level");
  Eigen::MatrixXcd out = coeffs;
  apply_block_diagonal(joint, out, [&](int j, int) {
    return joint.level_index[j] == n ? cplx(1.0) : cplx(0.0);
  });
  return out;
}

Eigen::MatrixXcd to_joint(const JointEigenStructure& joint, const Eigen::MatrixXcd& coeffs) {
  Eigen::MatrixXcd out(coeffs.rows(), coeffs.cols());
  for (std::size_t d = 0; d < joint.blocks.size(); ++d) {
    const int off = joint.block_offset[d];
    out.middleCols(off, d + 1) = coeffs.middleCols(off, d + 1) * joint.blocks[d].conjugate();
  }
  return out;
}

Eigen::MatrixXcd from_joint(const JointEigenStructure& joint,
                            const Eigen::MatrixXcd& joint_coeffs) {
  Eigen::MatrixXcd out(joint_coeffs.rows(), joint_coeffs.cols());
  for (std::size_t d = 0; d < joint.blocks.size(); ++d) {
    const int off = joint.block_offset[d];
    out.middleCols(off, d + 1) = joint_coeffs.middleCols(off, d + 1) * joint.blocks[d].transpose();
  }
  return out;
}

Eigen::MatrixXcd apply_angular_momentum(const JointEigenStructure& joint,
                                        const Eigen::MatrixXcd& coeffs) {
  Eigen::MatrixXcd out(coeffs.rows(), coeffs.cols());
  for (std::size_t d = 0; d < joint.l_blocks.size(); ++d) {
    const int off = joint.block_offset[d];
    out.middleCols(off, d + 1) = coeffs.middleCols(off, d + 1) * joint.l_blocks[d].transpose();
  }
  return out;
}

}  // namespace magnls
