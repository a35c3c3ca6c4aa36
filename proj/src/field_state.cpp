#include "magnls/field_state.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace magnls {

const ProductGrid& Discretization::product_grid(int sigma) const {
  if (sigma < 1 || sigma > max_sigma()) {
    throw std::invalid_argument("product_grid: sigma " + std::to_string(sigma) +
                                " outside the prepared range 1.." + std::to_string(max_sigma()));
  }
  return product_grids[sigma];
}

std::shared_ptr<const Discretization> make_discretization(int cutoff_degree, int node_count,
                                                          double axial_length, int axial_points,
                                                          const PotentialSpec& potential,
                                                          int max_sigma) {
  auto d = std::make_shared<Discretization>();
  d->basis = build_hermite_basis(cutoff_degree, node_count);
  d->joint = build_joint_eigenstructure(d->basis);
  d->axial = build_axial_grid(axial_length, axial_points, potential);
  d->product_grids.resize(max_sigma + 1);
  for (int s = 1; s <= max_sigma; ++s) d->product_grids[s] = build_product_grid(cutoff_degree, s);
  d->moment_grid = build_product_grid(cutoff_degree, 0, 4);
  return d;
}

// --- SpectralField -----------------------------------------------------------

SpectralField::SpectralField(std::shared_ptr<const Discretization> disc, Representation rep,
                             Eigen::MatrixXcd data, double time)
    : disc_(std::move(disc)), rep_(rep), data_(std::move(data)), time_(time) {
  if (!disc_) throw std::invalid_argument("SpectralField: null discretization");
  const Eigen::Index cols =
      rep_ == Representation::modal ? disc_->mode_count() : disc_->basis.grid_size();
  if (data_.rows() != disc_->axial_points() || data_.cols() != cols) {
    throw std::invalid_argument("SpectralField: data is " + std::to_string(data_.rows()) + "x" +
                                std::to_string(data_.cols()) + ", expected " +
                                std::to_string(disc_->axial_points()) + "x" +
                                std::to_string(cols));
  }
}

SpectralField SpectralField::zero(std::shared_ptr<const Discretization> disc, double time) {
  const int rows = disc->axial_points();
  const int cols = disc->mode_count();
  return SpectralField(std::move(disc), Representation::modal,
                       Eigen::MatrixXcd::Zero(rows, cols), time);
}

namespace {

void require_compatible(const SpectralField& a, const SpectralField& b, const char* what) {
  if (a.disc_ptr() != b.disc_ptr() || a.representation() != b.representation()) {
    throw std::invalid_argument(std::string(what) + ": fields use different discretizations");
  }
}

void require_modal(const SpectralField& f, const char* what) {
  if (f.representation() != Representation::modal) {
    throw std::invalid_argument(std::string(what) + ": expected a modal field");
  }
}

}  // namespace

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_compatible(*this, other, "operator+=");
  data_ += other.data_;
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_compatible(*this, other, "operator-=");
  data_ -= other.data_;
  return *this;
}

SpectralField& SpectralField::operator*=(std::complex<double> s) {
  data_ *= s;
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(std::complex<double> s, SpectralField a) { return a *= s; }

// --- transforms --------------------------------------------------------------

Eigen::MatrixXcd times_real(const Eigen::MatrixXcd& a, const Eigen::MatrixXd& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("times_real: inner dimension mismatch");
  Eigen::MatrixXcd out(a.rows(), b.cols());
  // std::complex<double> is layout-compatible with double[2]; a column-major
  // r x k complex matrix is a 2r x k real matrix with interleaved rows.
  Eigen::Map<const Eigen::MatrixXd> ar(reinterpret_cast<const double*>(a.data()), 2 * a.rows(),
                                       a.cols());
  Eigen::Map<Eigen::MatrixXd> outr(reinterpret_cast<double*>(out.data()), 2 * a.rows(), b.cols());
  outr.noalias() = ar * b;
  return out;
}

Eigen::MatrixXcd to_node_slab(const SpectralField& field) {
  require_modal(field, "to_node_slab");
  return axial_to_nodes(field.disc().axial, field.data());
}

SpectralField from_node_slab(std::shared_ptr<const Discretization> disc,
                             const Eigen::MatrixXcd& slab, double time) {
  Eigen::MatrixXcd modal = axial_to_wavenumbers(disc->axial, slab);
  return SpectralField(std::move(disc), Representation::modal, std::move(modal), time);
}

SpectralField analyze(std::shared_ptr<const Discretization> disc, const Eigen::MatrixXcd& values,
                      double time) {
  if (values.rows() != disc->axial_points() || values.cols() != disc->basis.grid_size()) {
    throw std::invalid_argument("analyze: collocation values have wrong dimensions");
  }
  const Eigen::MatrixXd forward = disc->basis.analysis_matrix.transpose();
  return from_node_slab(disc, times_real(values, forward), time);
}

SpectralField analyze(const SpectralField& collocation_field) {
  if (collocation_field.representation() != Representation::collocation) {
    throw std::invalid_argument("analyze: expected collocation values");
  }
  return analyze(collocation_field.disc_ptr(), collocation_field.data(), collocation_field.time());
}

SpectralField synthesize(const SpectralField& field) {
  require_modal(field, "synthesize");
  const Eigen::MatrixXd synth = field.disc().basis.sample_matrix.transpose();
  return SpectralField(field.disc_ptr(), Representation::collocation,
                       times_real(to_node_slab(field), synth), field.time());
}

std::complex<double> inner(const SpectralField& a, const SpectralField& b) {
  require_compatible(a, b, "inner");
  require_modal(a, "inner");
  return (b.data().conjugate().cwiseProduct(a.data())).sum();
}

double grid_norm_sq(const Discretization& disc, const Eigen::MatrixXcd& values) {
  const double dz = disc.axial.spacing();
  return dz * (values.cwiseAbs2() * disc.basis.weights_2d).sum();
}

// --- norms -------------------------------------------------------------------

namespace {

// Applies x_axis (or d/dx_axis) to triangular coefficients of cutoff D; the
// result lives on cutoff D + 1. lower/raise are the ladder factors.
template <typename Lower, typename Raise>
Eigen::MatrixXcd ladder(const Eigen::MatrixXcd& c, int cutoff, int axis, Lower lower, Raise raise) {
  const int ext = (cutoff + 2) * (cutoff + 3) / 2;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(c.rows(), ext);
  const auto modes = triangular_modes(cutoff);
  for (std::size_t m = 0; m < modes.size(); ++m) {
    const int k1 = modes[m].k1, k2 = modes[m].k2;
    const int k = axis == 0 ? k1 : k2;
    if (k > 0) {
      const int target = axis == 0 ? mode_index(k1 - 1, k2) : mode_index(k1, k2 - 1);
      out.col(target) += lower(k) * c.col(m);
    }
    const int target = axis == 0 ? mode_index(k1 + 1, k2) : mode_index(k1, k2 + 1);
    out.col(target) += raise(k) * c.col(m);
  }
  return out;
}

double d_lower(int k) { return 0.5 * std::sqrt(double(k)); }
double d_raise(int k) { return -0.5 * std::sqrt(double(k + 1)); }

double gradient_x_sq(const Eigen::MatrixXcd& modal, int cutoff) {
  return ladder(modal, cutoff, 0, d_lower, d_raise).squaredNorm() +
         ladder(modal, cutoff, 1, d_lower, d_raise).squaredNorm();
}

double second_derivative_x_sq(const Eigen::MatrixXcd& modal, int cutoff) {
  double total = 0.0;
  for (int axis = 0; axis < 2; ++axis) {
    const Eigen::MatrixXcd once = ladder(modal, cutoff, axis, d_lower, d_raise);
    total += ladder(once, cutoff + 1, axis, d_lower, d_raise).squaredNorm();
  }
  return total;
}

// sum k^{2 power} |c_k|^2. The Nyquist row keeps its full k^2: ||d_z u||^2 is
// read as <-d_z^2 u, u>, the quadratic form the axial propagator conserves.
double gradient_z_sq(const AxialGrid& axial, const Eigen::MatrixXcd& modal, int power) {
  double total = 0.0;
  for (Eigen::Index r = 0; r < modal.rows(); ++r) {
    const double k = axial.wavenumber(r);
    total += std::pow(k * k, power) * modal.row(r).squaredNorm();
  }
  return total;
}

}  // namespace

NormParts norm_parts(const SpectralField& field) {
  require_modal(field, "norm");
  const Discretization& disc = field.disc();
  const Eigen::MatrixXcd& modal = field.data();
  NormParts p;
  p.mass = modal.squaredNorm();
  p.grad_x = gradient_x_sq(modal, disc.cutoff());
  p.grad_z = gradient_z_sq(disc.axial, modal, 1);

  const ProductGrid& g = disc.moment_grid;
  const Eigen::MatrixXcd vx = times_real(modal, g.synthesis);
  p.weight_x = (vx.cwiseAbs2() * g.weights_2d.cwiseProduct(g.radius_sq)).sum();

  const Eigen::MatrixXcd slab = to_node_slab(field);
  const double dz = disc.axial.spacing();
  for (int j = 0; j < disc.axial_points(); ++j) {
    const double z = disc.axial.z(j);
    p.weight_z += dz * z * z * slab.row(j).squaredNorm();
  }
  return p;
}

namespace {

double sigma2_sq(const SpectralField& field) {
  const Discretization& disc = field.disc();
  const Eigen::MatrixXcd& modal = field.data();
  double total = second_derivative_x_sq(modal, disc.cutoff()) + gradient_z_sq(disc.axial, modal, 2);
  const ProductGrid& g = disc.moment_grid;
  const Eigen::MatrixXcd slab = to_node_slab(field);
  const Eigen::MatrixXcd v = times_real(slab, g.synthesis);
  const double dz = disc.axial.spacing();
  for (int j = 0; j < disc.axial_points(); ++j) {
    const double z2 = disc.axial.z(j) * disc.axial.z(j);
    for (Eigen::Index i = 0; i < v.cols(); ++i) {
      const double r4 = (g.radius_sq(i) + z2) * (g.radius_sq(i) + z2);
      total += dz * g.weights_2d(i) * r4 * std::norm(v(j, i));
    }
  }
  return total;
}

}  // namespace

double norm(const SpectralField& field, NormKind which) {
  if (which == NormKind::L2) {
    require_modal(field, "norm");
    return field.data().norm();
  }
  if (which == NormKind::Sigma2) {
    require_modal(field, "norm");
    return std::sqrt(sigma2_sq(field));
  }
  const NormParts p = norm_parts(field);
  switch (which) {
    case NormKind::Sigma1: return std::sqrt(p.grad_x + p.grad_z + p.weight_x + p.weight_z);
    case NormKind::Lx2Sigmaz1: return std::sqrt(p.grad_z + p.weight_z);
    case NormKind::Lz2Sigmax1: return std::sqrt(p.grad_x + p.weight_x);
    case NormKind::Sigma01: return std::sqrt(p.grad_x + p.grad_z + p.weight_x);
    default: break;
  }
  throw std::logic_error("norm: unhandled norm kind");
}

// --- nonlinearity ------------------------------------------------------------

SpectralField nonlinear_phase(const SpectralField& collocation_field, double lambda, int sigma,
                              double dt) {
  if (collocation_field.representation() != Representation::collocation) {
    throw std::invalid_argument("nonlinear_phase: expected collocation values");
  }
  Eigen::MatrixXcd out = collocation_field.data();
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const std::complex<double> u = out(i);
    const double rho = std::pow(std::norm(u), sigma);
    out(i) = std::polar(1.0, -dt * lambda * rho) * u;
  }
  return SpectralField(collocation_field.disc_ptr(), Representation::collocation, std::move(out),
                       collocation_field.time());
}

Eigen::MatrixXcd galerkin_power(const Discretization& disc, const Eigen::MatrixXcd& slab,
                                int sigma) {
  const ProductGrid& g = disc.product_grid(sigma);
  Eigen::MatrixXcd v = times_real(slab, g.synthesis);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double rho = std::norm(v(i));
    double p = rho;
    for (int s = 1; s < sigma; ++s) p *= rho;
    v(i) *= p;
  }
  return times_real(v, g.projector);
}

Eigen::MatrixXcd galerkin_cubic_product(const Discretization& disc, const Eigen::MatrixXcd& a,
                                        const Eigen::MatrixXcd& b, const Eigen::MatrixXcd& c) {
  const ProductGrid& g = disc.product_grid(1);
  const Eigen::MatrixXd& st = g.synthesis;
  const Eigen::MatrixXcd va = times_real(a, st);
  const Eigen::MatrixXcd vb = times_real(b, st);
  const Eigen::MatrixXcd vc = times_real(c, st);
  const Eigen::MatrixXcd prod = va.cwiseProduct(vb).cwiseProduct(vc.conjugate());
  return times_real(prod, g.projector);
}

double power_integral(const Discretization& disc, const Eigen::MatrixXcd& slab, int sigma) {
  const ProductGrid& g = disc.product_grid(sigma);
  const Eigen::MatrixXcd v = times_real(slab, g.synthesis);
  const Eigen::MatrixXd rho = v.cwiseAbs2();
  const Eigen::MatrixXd powered = rho.array().pow(sigma + 1).matrix();
  return disc.axial.spacing() * (powered * g.weights_2d).sum();
}

}  // namespace magnls
