#pragma once

#include <complex>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "magnls/axial_line.hpp"
#include "magnls/hermite_basis.hpp"
#include "magnls/joint_eigen.hpp"

namespace magnls {

/// Everything a field needs to interpret its coefficients. Immutable once
/// built; fields share it through shared_ptr.
struct Discretization {
  HermiteBasis basis;
  JointEigenStructure joint;
  AxialGrid axial;
  /// product_grids[s] is exact for the power-(2s+1) Galerkin products, s = 1..max.
  std::vector<ProductGrid> product_grids;
  /// Exact for |x|^4 moments of bilinear forms (Sigma^2 weights).
  ProductGrid moment_grid;

  int cutoff() const { return basis.cutoff_degree; }
  int mode_count() const { return basis.mode_count(); }
  int axial_points() const { return axial.point_count; }
  int max_sigma() const { return static_cast<int>(product_grids.size()) - 1; }
  const ProductGrid& product_grid(int sigma) const;
};

std::shared_ptr<const Discretization> make_discretization(int cutoff_degree, int node_count,
                                                          double axial_length, int axial_points,
                                                          const PotentialSpec& potential,
                                                          int max_sigma = 4);

enum class Representation {
  modal,        // rows: axial wavenumbers (ascending), cols: Cartesian Hermite modes
  collocation,  // rows: axial nodes, cols: basis grid points (i1 * n + i2)
};

/// Complex field on (Hermite modes) x (axial grid). Value type.
class SpectralField {
 public:
  SpectralField() = default;
  SpectralField(std::shared_ptr<const Discretization> disc, Representation rep,
                Eigen::MatrixXcd data, double time = 0.0);

  static SpectralField zero(std::shared_ptr<const Discretization> disc, double time = 0.0);

  const Discretization& disc() const { return *disc_; }
  const std::shared_ptr<const Discretization>& disc_ptr() const { return disc_; }
  Representation representation() const { return rep_; }
  const Eigen::MatrixXcd& data() const { return data_; }
  Eigen::MatrixXcd& data() { return data_; }
  double time() const { return time_; }
  void set_time(double t) { time_ = t; }

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(std::complex<double> s);

 private:
  std::shared_ptr<const Discretization> disc_;
  Representation rep_ = Representation::modal;
  Eigen::MatrixXcd data_;
  double time_ = 0.0;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(std::complex<double> s, SpectralField a);

/// Collocation values -> modal field. Throws on dimension mismatch.
SpectralField analyze(std::shared_ptr<const Discretization> disc, const Eigen::MatrixXcd& values,
                      double time = 0.0);
SpectralField analyze(const SpectralField& collocation_field);
/// Modal field -> collocation values on (axial node) x (basis grid).
SpectralField synthesize(const SpectralField& field);

/// Hermite coefficients at each axial node (rows: nodes, cols: modes) and back.
Eigen::MatrixXcd to_node_slab(const SpectralField& field);
SpectralField from_node_slab(std::shared_ptr<const Discretization> disc,
                             const Eigen::MatrixXcd& slab, double time = 0.0);

/// <a, b> = int a conj(b); both modal.
std::complex<double> inner(const SpectralField& a, const SpectralField& b);

/// Weighted grid L^2 norm squared of collocation values.
double grid_norm_sq(const Discretization& disc, const Eigen::MatrixXcd& values);

enum class NormKind { L2, Sigma1, Sigma2, Lx2Sigmaz1, Lz2Sigmax1, Sigma01 };

/// Squared building blocks of the weighted Sobolev norms.
struct NormParts {
  double mass = 0;        // ||u||^2
  double grad_x = 0;      // ||grad_x u||^2 (spectral)
  double grad_z = 0;      // ||d_z u||^2 (spectral)
  double weight_x = 0;    // || |x| u ||^2 (grid)
  double weight_z = 0;    // || z u ||^2 (grid, sawtooth z)
};

NormParts norm_parts(const SpectralField& field);
double norm(const SpectralField& field, NormKind which);

/// Pointwise exact flow of i du/dt = lambda |u|^{2 sigma} u on collocation
/// values: u_j -> exp(-i dt lambda |u_j|^{2 sigma}) u_j.
SpectralField nonlinear_phase(const SpectralField& collocation_field, double lambda, int sigma,
                              double dt);

/// Galerkin projection of |v|^{2 sigma} v per axial node, exact on the
/// truncated basis. Input and output are node slabs.
Eigen::MatrixXcd galerkin_power(const Discretization& disc, const Eigen::MatrixXcd& slab,
                                int sigma);

/// Galerkin projection of v_a v_b conj(v_c) (cubic, exact) on node slabs.
Eigen::MatrixXcd galerkin_cubic_product(const Discretization& disc, const Eigen::MatrixXcd& a,
                                        const Eigen::MatrixXcd& b, const Eigen::MatrixXcd& c);

/// int |v|^{2 sigma + 2} over x and z (exact in x, trapezoid in z).
double power_integral(const Discretization& disc, const Eigen::MatrixXcd& slab, int sigma);

/// A * B for complex A and real B without promoting B.
Eigen::MatrixXcd times_real(const Eigen::MatrixXcd& a, const Eigen::MatrixXd& b);

}  // namespace magnls
