#include "magnls/axial_line.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

namespace magnls {

using cplx = std::complex<double>;

std::string PotentialSpec::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::zero: os << "zero"; break;
    case Kind::harmonic: os << "harmonic(kappa=" << kappa << ")"; break;
    case Kind::cosine: os << "cosine(amplitude=" << amplitude << ",kappa=" << kappa << ")"; break;
    case Kind::tabulated: os << "tabulated(" << table.size() << ")"; break;
  }
  return os.str();
}

AxialGrid build_axial_grid(double length, int point_count, const PotentialSpec& potential) {
  if (!(length > 0) || !std::isfinite(length)) {
    throw std::invalid_argument("build_axial_grid: L_z must be positive and finite");
  }
  if (point_count < 8 || (point_count & (point_count - 1)) != 0) {
    throw std::invalid_argument("build_axial_grid: N_z must be a power of two >= 8, got " +
                                std::to_string(point_count));
  }
  AxialGrid g;
  g.length = length;
  g.point_count = point_count;
  g.potential_spec = potential;
  const double dz = length / point_count;
  g.z.resize(point_count);
  g.wavenumber.resize(point_count);
  g.potential.resize(point_count);
  for (int j = 0; j < point_count; ++j) {
    g.z(j) = -0.5 * length + j * dz;
    g.wavenumber(j) = 2.0 * std::numbers::pi * (j - point_count / 2) / length;
  }
  switch (potential.kind) {
    case PotentialSpec::Kind::zero:
      g.potential.setZero();
      break;
    case PotentialSpec::Kind::harmonic:
      g.potential = 0.5 * potential.kappa * g.z.array().square();
      break;
    case PotentialSpec::Kind::cosine:
      g.potential = potential.amplitude * (potential.kappa * g.z.array()).cos();
      break;
    case PotentialSpec::Kind::tabulated:
      if (static_cast<int>(potential.table.size()) != point_count) {
        throw std::invalid_argument("build_axial_grid: tabulated potential has " +
                                    std::to_string(potential.table.size()) + " samples, N_z is " +
                                    std::to_string(point_count));
      }
      for (int j = 0; j < point_count; ++j) g.potential(j) = potential.table[j];
      break;
  }
  for (int j = 0; j < point_count; ++j) {
    if (!std::isfinite(g.potential(j))) {
      throw std::invalid_argument("build_axial_grid: non-finite potential sample at node " +
                                  std::to_string(j));
    }
  }
  return g;
}

namespace {

// kissfft keeps its twiddle tables per object; one engine per thread reuses them.
Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> engine;
  return engine;
}

// (-1)^m for the ascending row r = m + N/2.
double centering_sign(int row, int n) { return ((row - n / 2) % 2 == 0) ? 1.0 : -1.0; }

}  // namespace

Eigen::MatrixXcd axial_to_wavenumbers(const AxialGrid& grid, const Eigen::MatrixXcd& node_values) {
  const int n = grid.point_count;
  if (node_values.rows() != n) throw std::invalid_argument("axial_to_wavenumbers: row mismatch");
  Eigen::FFT<double>& fft = fft_engine();
  Eigen::MatrixXcd out(n, node_values.cols());
  Eigen::VectorXcd in(n), spec(n);
  const double scale = std::sqrt(grid.length) / n;
  for (Eigen::Index c = 0; c < node_values.cols(); ++c) {
    in = node_values.col(c);
    fft.fwd(spec, in);
    for (int r = 0; r < n; ++r) {
      const int q = (r - n / 2 + n) % n;
      out(r, c) = scale * centering_sign(r, n) * spec(q);
    }
  }
  return out;
}

Eigen::MatrixXcd axial_to_nodes(const AxialGrid& grid, const Eigen::MatrixXcd& coefficients) {
  const int n = grid.point_count;
  if (coefficients.rows() != n) throw std::invalid_argument("axial_to_nodes: row mismatch");
  Eigen::FFT<double>& fft = fft_engine();
  Eigen::MatrixXcd out(n, coefficients.cols());
  Eigen::VectorXcd spec(n), vals(n);
  const double scale = n / std::sqrt(grid.length);
  for (Eigen::Index c = 0; c < coefficients.cols(); ++c) {
    for (int r = 0; r < n; ++r) {
      const int q = (r - n / 2 + n) % n;
      spec(q) = centering_sign(r, n) * coefficients(r, c);
    }
    fft.inv(vals, spec);
    out.col(c) = scale * vals;
  }
  return out;
}

namespace {

// Multiplies each column's spectrum by `multiplier` (indexed by FFT bin).
void spectral_multiply(Eigen::MatrixXcd& values, const Eigen::VectorXcd& multiplier) {
  const Eigen::Index n = values.rows();
  Eigen::FFT<double>& fft = fft_engine();
  Eigen::VectorXcd col(n), spec(n);
  for (Eigen::Index c = 0; c < values.cols(); ++c) {
    col = values.col(c);
    fft.fwd(spec, col);
    spec.array() *= multiplier.array();
    fft.inv(col, spec);
    values.col(c) = col;
  }
}

Eigen::VectorXcd kinetic_phase(const AxialGrid& grid, double tau) {
  const int n = grid.point_count;
  Eigen::VectorXcd m(n);
  for (int r = 0; r < n; ++r) {
    const int q = (r - n / 2 + n) % n;
    const double k = grid.wavenumber(r);
    m(q) = std::exp(cplx(0.0, -0.5 * tau * k * k));
  }
  return m;
}

}  // namespace

void propagate_axial_inplace(const AxialGrid& grid, Eigen::MatrixXcd& values, double tau,
                             int substeps) {
  if (substeps < 1) throw std::invalid_argument("propagate_axial: substeps must be >= 1");
  if (values.rows() != grid.point_count) {
    throw std::invalid_argument("propagate_axial: row mismatch");
  }
  const double h = tau / substeps;
  const bool has_potential = grid.potential.cwiseAbs().maxCoeff() > 0.0;
  Eigen::VectorXcd half_v(grid.point_count);
  for (int j = 0; j < grid.point_count; ++j) {
    half_v(j) = std::exp(cplx(0.0, -0.5 * h * grid.potential(j)));
  }
  const Eigen::VectorXcd kinetic = kinetic_phase(grid, h);
  for (int s = 0; s < substeps; ++s) {
    if (has_potential) values = half_v.asDiagonal() * values;
    spectral_multiply(values, kinetic);
    if (has_potential) values = half_v.asDiagonal() * values;
  }
}

Eigen::MatrixXcd propagate_axial(const AxialGrid& grid, const Eigen::MatrixXcd& node_values,
                                 double tau, int substeps) {
  Eigen::MatrixXcd out = node_values;
  propagate_axial_inplace(grid, out, tau, substeps);
  return out;
}

Eigen::MatrixXcd free_axial_flow(const AxialGrid& grid, const Eigen::MatrixXcd& node_values,
                                 double tau) {
  Eigen::MatrixXcd out = node_values;
  // e^{i tau H_free} = e^{-i(-tau) H_free}
  spectral_multiply(out, kinetic_phase(grid, -tau));
  return out;
}

double boundary_mass_fraction(const AxialGrid& grid, const Eigen::MatrixXcd& node_values,
                              double fraction) {
  const double edge = 0.5 * grid.length * (1.0 - fraction);
  double total = 0.0, outer = 0.0;
  for (int j = 0; j < grid.point_count; ++j) {
    const double m = node_values.row(j).squaredNorm();
    total += m;
    if (std::abs(grid.z(j)) >= edge) outer += m;
  }
  return total > 0.0 ? outer / total : 0.0;
}

}  // namespace magnls
