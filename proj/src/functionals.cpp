#include "magnls/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "magnls/averaging.hpp"

namespace magnls {

double mass(const SpectralField& u) { return u.data().squaredNorm(); }

double angular_momentum(const SpectralField& u) {
  const Eigen::MatrixXcd j = to_joint(u.disc().joint, u.data());
  return (j.cwiseAbs2() * u.disc().joint.l_eigenvalues).sum();
}

double a_functional(const SpectralField& u) {
  return (u.data().cwiseAbs2() * u.disc().basis.h0_eigenvalues()).sum();
}

double axial_kinetic(const SpectralField& u) { return 0.5 * norm_parts(u).grad_z; }

double axial_potential(const SpectralField& u) {
  const AxialGrid& g = u.disc().axial;
  const Eigen::MatrixXcd slab = to_node_slab(u);
  return g.spacing() * (slab.rowwise().squaredNorm().cwiseProduct(g.potential)).sum();
}

namespace {

// The linear terms exactly as displayed: gradient, weight, rotation, axial.
struct LinearTerms {
  double gradient_x = 0;  // ||grad_x u||^2
  double weight_x = 0;    // || |x| u ||^2
  double rotation = 0;    // <L u, u>
  double axial_kinetic = 0;
  double axial_potential = 0;
};

LinearTerms linear_terms(const SpectralField& u) {
  const NormParts p = norm_parts(u);
  LinearTerms t;
  t.gradient_x = p.grad_x;
  t.weight_x = p.weight_x;
  t.rotation = angular_momentum(u);
  t.axial_kinetic = 0.5 * p.grad_z;
  t.axial_potential = axial_potential(u);
  return t;
}

double power_term(const SpectralField& u, int sigma) {
  return power_integral(u.disc(), to_node_slab(u), sigma);
}

}  // namespace

double energy_eps(const SpectralField& u, double epsilon, double lambda, int sigma) {
  const LinearTerms t = linear_terms(u);
  const double inv_e2 = 1.0 / (epsilon * epsilon);
  const double linear = inv_e2 * (0.5 * t.gradient_x + 0.125 * t.weight_x + t.rotation) +
                        t.axial_kinetic + t.axial_potential;
  return 0.5 * linear + lambda / (2.0 * (sigma + 1)) * power_term(u, sigma);
}

double e0_eps(const SpectralField& u, double epsilon, double lambda, int sigma) {
  const LinearTerms t = linear_terms(u);
  const double inv_e2 = 1.0 / (epsilon * epsilon);
  return inv_e2 * (0.5 * t.gradient_x + 0.125 * t.weight_x) + t.axial_kinetic +
         t.axial_potential + lambda / (sigma + 1) * power_term(u, sigma);
}

LimitEnergy energy_limit(const SpectralField& u, double lambda, int sigma, int n_theta) {
  const Discretization& disc = u.disc();
  if (n_theta <= 0) n_theta = default_theta_count(sigma, disc.cutoff());
  if (n_theta < theta_threshold(sigma, disc.cutoff())) {
    throw std::invalid_argument("energy_limit: N_theta below the exactness threshold");
  }
  LimitEnergy e;
  e.b1 = axial_kinetic(u);
  e.b2 = axial_potential(u);
  const Eigen::MatrixXcd slab = to_node_slab(u);
  double avg = 0.0;
  for (int j = 0; j < n_theta; ++j) {
    const double theta = 2.0 * std::numbers::pi * j / n_theta;
    avg += power_integral(disc, apply_oscillator_propagator(disc.joint, slab, theta, Generator::H),
                          sigma);
  }
  e.nonlinear = lambda / (sigma + 1) * avg / n_theta;
  return e;
}

namespace {

bool is_power_of_two_at_least_one(double mu) {
  if (mu < 1.0) return false;
  double m = mu;
  while (m > 1.0) m *= 0.5;
  return m == 1.0 && mu <= 1 << 20;
}

// Trigonometric interpolant of the node values, evaluated at arbitrary z.
Eigen::MatrixXcd interpolate_axial(const AxialGrid& g, const Eigen::MatrixXcd& slab,
                                   const Eigen::VectorXd& at) {
  const Eigen::MatrixXcd coeffs = axial_to_wavenumbers(g, slab);
  const int n = g.point_count;
  Eigen::MatrixXcd basis(at.size(), n);
  for (Eigen::Index i = 0; i < at.size(); ++i) {
    for (int r = 0; r < n; ++r) {
      const double phase = g.wavenumber(r) * at(i);
      // The Nyquist row stands for a cosine so the interpolant stays real for real data.
      basis(i, r) = r == 0 ? cplx(std::cos(phase), 0.0) : std::polar(1.0, phase);
    }
  }
  return basis * coeffs / std::sqrt(g.length);
}

}  // namespace

SpectralField scale_field(const SpectralField& u, double mu, bool allow_interpolation) {
  if (!(mu > 0) || !std::isfinite(mu)) {
    throw std::invalid_argument("scale_field: mu must be positive and finite");
  }
  if (mu == 1.0) return u;
  const AxialGrid& g = u.disc().axial;
  const int n = g.point_count;
  const Eigen::MatrixXcd slab = to_node_slab(u);
  const double amplitude = std::pow(mu, 0.25);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, slab.cols());

  if (is_power_of_two_at_least_one(mu)) {
    const int m = static_cast<int>(mu);
    for (int j = 0; j < n; ++j) {
      const long source = n / 2 + static_cast<long>(m) * (j - n / 2);
      if (source >= 0 && source < n) out.row(j) = amplitude * slab.row(source);
    }
  } else {
    if (!allow_interpolation) {
      throw std::invalid_argument(
          "scale_field: mu must be a power of two >= 1 unless interpolation is enabled");
    }
    // Mass of u beyond |z| = mu L / 2 has no image on the grid.
    const double reach = 0.5 * mu * g.length;
    double lost = 0.0, total = 0.0;
    for (int j = 0; j < n; ++j) {
      const double m = slab.row(j).squaredNorm();
      total += m;
      if (std::abs(g.z(j)) >= reach) lost += m;
    }
    if (total > 0 && lost / total > 1e-8) {
      throw std::invalid_argument("scale_field: stretched field leaves the axial domain");
    }
    out = amplitude * interpolate_axial(g, slab, mu * g.z);
    // Points whose preimage lies outside the domain would see the periodic
    // image of u; the lost-mass check above says u is negligible there.
    for (int j = 0; j < n; ++j) {
      if (std::abs(mu * g.z(j)) >= 0.5 * g.length) out.row(j).setZero();
    }
  }
  const double edge = boundary_mass_fraction(g, out, 0.1);
  if (edge > 1e-8) {
    throw std::invalid_argument("scale_field: scaled field has boundary mass fraction " +
                                std::to_string(edge) + " > 1e-8");
  }
  return from_node_slab(u.disc_ptr(), out, u.time());
}

// --- ObservableSeries --------------------------------------------------------

int ObservableSeries::column_index(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw std::out_of_range("ObservableSeries: no column " + name);
  return static_cast<int>(it - columns.begin());
}

std::vector<double> ObservableSeries::column(const std::string& name) const {
  const int c = column_index(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

double ObservableSeries::drift(const std::string& name, bool relative) const {
  const std::vector<double> q = column(name);
  if (q.empty()) return 0.0;
  double worst = 0.0;
  for (double v : q) worst = std::max(worst, std::abs(v - q.front()));
  const double scale = relative && q.front() != 0.0 ? std::abs(q.front()) : 1.0;
  return worst / scale;
}

std::vector<std::string> observable_columns(ModelKind model) {
  if (model == ModelKind::eps_nls) {
    return {"time", "M", "L", "E_eps", "E0_eps", "Sigma1", "Sigma2", "Lx2Sigmaz1",
            "boundary_mass"};
  }
  return {"time", "M", "A", "E", "B1", "B2", "Sigma1", "Sigma2", "Lx2Sigmaz1", "boundary_mass"};
}

std::vector<double> sample_observables(const SpectralField& u, ModelKind model, double epsilon,
                                       double lambda, int sigma, int n_theta) {
  std::vector<double> row{u.time(), mass(u)};
  if (model == ModelKind::eps_nls) {
    row.push_back(angular_momentum(u));
    row.push_back(energy_eps(u, epsilon, lambda, sigma));
    row.push_back(e0_eps(u, epsilon, lambda, sigma));
  } else {
    const LimitEnergy e = energy_limit(u, lambda, sigma, n_theta);
    row.push_back(a_functional(u));
    row.push_back(e.total());
    row.push_back(e.b1);
    row.push_back(e.b2);
  }
  row.push_back(norm(u, NormKind::Sigma1));
  row.push_back(norm(u, NormKind::Sigma2));
  row.push_back(norm(u, NormKind::Lx2Sigmaz1));
  row.push_back(boundary_mass_fraction(u.disc().axial, to_node_slab(u)));
  return row;
}

}  // namespace magnls
