#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace magnls {

/// Sub-quadratic axial potential V(z).
struct PotentialSpec {
  enum class Kind { zero, harmonic, cosine, tabulated };
  Kind kind = Kind::zero;
  double kappa = 1.0;      // harmonic: kappa z^2 / 2; cosine: amplitude cos(kappa z)
  double amplitude = 1.0;  // cosine only
  std::vector<double> table;

  static PotentialSpec zero() { return {}; }
  static PotentialSpec harmonic(double kappa) { return {Kind::harmonic, kappa, 1.0, {}}; }
  static PotentialSpec cosine(double amplitude, double kappa) {
    return {Kind::cosine, kappa, amplitude, {}};
  }
  static PotentialSpec tabulated(std::vector<double> samples) {
    return {Kind::tabulated, 1.0, 1.0, std::move(samples)};
  }
  std::string describe() const;
};

/// Periodic Fourier collocation of the z line on [-L/2, L/2).
struct AxialGrid {
  double length = 0.0;
  int point_count = 0;
  PotentialSpec potential_spec;
  Eigen::VectorXd z;           // z_j = -L/2 + j dz (sawtooth coordinate)
  Eigen::VectorXd wavenumber;  // ascending: 2 pi m / L, m = -N/2 .. N/2 - 1
  Eigen::VectorXd potential;   // V(z_j)

  double spacing() const { return length / point_count; }
  /// Wavenumber used for odd operators (d/dz): the Nyquist entry is zeroed.
  double derivative_wavenumber(int row) const { return row == 0 ? 0.0 : wavenumber(row); }
};

/// Throws std::invalid_argument for L_z <= 0, N_z < 8 or not a power of two,
/// tabulated length != N_z, or non-finite samples.
AxialGrid build_axial_grid(double length, int point_count, const PotentialSpec& potential);

/// Columnwise transforms between axial nodes (rows j) and L^2-normalized
/// Fourier coefficients (rows ascending in wavenumber). The coefficient
/// 2-norm equals the discrete L^2(dz) norm of the node values.
Eigen::MatrixXcd axial_to_wavenumbers(const AxialGrid& grid, const Eigen::MatrixXcd& node_values);
Eigen::MatrixXcd axial_to_nodes(const AxialGrid& grid, const Eigen::MatrixXcd& coefficients);

/// `substeps` Strang steps of e^{-i tau H_z}, H_z = -1/2 d^2/dz^2 + V, on node
/// values: half potential phase, kinetic phase in Fourier space, half
/// potential phase. Exactly unitary. Throws for substeps < 1.
Eigen::MatrixXcd propagate_axial(const AxialGrid& grid, const Eigen::MatrixXcd& node_values,
                                 double tau, int substeps = 1);
void propagate_axial_inplace(const AxialGrid& grid, Eigen::MatrixXcd& node_values, double tau,
                             int substeps = 1);

/// Free kinetic flow run backwards, e^{i tau H_free} = e^{-i tau d^2/dz^2 / 2}
/// (no potential), exact. free_axial_flow(v, t) undoes t of free propagation.
Eigen::MatrixXcd free_axial_flow(const AxialGrid& grid, const Eigen::MatrixXcd& node_values,
                                 double tau);

/// Fraction of the mass within `fraction` of the domain edge, per column sum.
double boundary_mass_fraction(const AxialGrid& grid, const Eigen::MatrixXcd& node_values,
                              double fraction = 0.1);

}  // namespace magnls
