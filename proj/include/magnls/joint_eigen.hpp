#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "magnls/hermite_basis.hpp"

namespace magnls {

using cplx = std::complex<double>;

/// Simultaneous eigenbasis of H0 and the angular momentum L = -(i/2) x^perp . grad
/// obtained by diagonalizing L on every H0 degree block.
///
/// Coefficient matrices throughout the library keep Hermite modes along the
/// columns (Cartesian triangular order) and any other index (axial node or
/// wavenumber) along the rows, so every operator here acts by right
/// multiplication on column blocks.
struct JointEigenStructure {
  int cutoff_degree = 0;
  /// Degree-d change of basis: column r is the joint eigenvector with
  /// L-eigenvalue -d/2 + r expressed in Cartesian modes of degree d.
  std::vector<Eigen::MatrixXcd> blocks;
  /// Matrix of L restricted to each degree block (Cartesian modes).
  std::vector<Eigen::MatrixXcd> l_blocks;
  Eigen::VectorXd l_eigenvalues;  // per joint mode
  Eigen::VectorXd h_eigenvalues;  // per joint mode: (d + 1)/2 + l
  std::vector<int> level_index;   // n with h = n + 1/2
  std::vector<int> block_offset;  // first mode index of each degree

  int mode_count() const { return static_cast<int>(level_index.size()); }
};

/// Throws std::runtime_error when a degree block of L is not Hermitian to
/// 1e-10 (symptom of an under-resolved quadrature).
JointEigenStructure build_joint_eigenstructure(const HermiteBasis& basis);

enum class Generator { H, H0, L };

/// Multiplies each joint eigenmode coefficient by exp(-i theta lambda) for the
/// generator's eigenvalue lambda.
Eigen::MatrixXcd apply_oscillator_propagator(const JointEigenStructure& joint,
                                             const Eigen::MatrixXcd& coeffs, double theta,
                                             Generator generator);

/// In-place variant of apply_oscillator_propagator.
void propagate_oscillator_inplace(const JointEigenStructure& joint, Eigen::MatrixXcd& coeffs,
                                  double theta, Generator generator);

/// Orthogonal projection onto the H-eigenspace with eigenvalue n + 1/2.
Eigen::MatrixXcd project_eigenlevel(const JointEigenStructure& joint,
                                    const Eigen::MatrixXcd& coeffs, int n);

/// Cartesian -> joint coefficients (and back).
Eigen::MatrixXcd to_joint(const JointEigenStructure& joint, const Eigen::MatrixXcd& coeffs);
Eigen::MatrixXcd from_joint(const JointEigenStructure& joint, const Eigen::MatrixXcd& joint_coeffs);

/// Applies L itself (not its exponential).
Eigen::MatrixXcd apply_angular_momentum(const JointEigenStructure& joint,
                                        const Eigen::MatrixXcd& coeffs);

}  // namespace magnls
