#include <doctest.h>

#include <cmath>

#include "magnls/averaging.hpp"
#include "magnls/functionals.hpp"
#include "test_support.hpp"

using namespace magnls;
using namespace magnls::testing;

namespace {

std::shared_ptr<const Discretization> disc_for(int cutoff, int nz, double lz,
                                               PotentialSpec v = PotentialSpec::zero()) {
  return make_discretization(cutoff, 2 * cutoff + 2, lz, nz, v);
}

// Ground mode in x times e^{-z^2 / (2 w^2)} with unit mass on the grid.
SpectralField ground_times_gaussian(const std::shared_ptr<const Discretization>& disc, double w,
                                    int mode = 0, cplx coefficient = 1.0) {
  const AxialGrid& g = disc->axial;
  Eigen::MatrixXcd slab = Eigen::MatrixXcd::Zero(g.point_count, disc->mode_count());
  for (int j = 0; j < g.point_count; ++j) {
    slab(j, mode) = coefficient * std::exp(-0.5 * g.z(j) * g.z(j) / (w * w));
  }
  SpectralField u = from_node_slab(disc, slab);
  return cplx(1.0 / u.data().norm()) * u;
}

SpectralField h_flow(const SpectralField& u, double theta, Generator g = Generator::H) {
  return SpectralField(u.disc_ptr(), Representation::modal,
                       apply_oscillator_propagator(u.disc().joint, u.data(), theta, g), u.time());
}

SpectralField axial_flow(const SpectralField& u, double tau) {
  return from_node_slab(u.disc_ptr(), propagate_axial(u.disc().axial, to_node_slab(u), tau, 4),
                        u.time());
}

}  // namespace

TEST_CASE("mass") {
  const auto disc = disc_for(4, 32, 12.0);
  const SpectralField u = ground_times_gaussian(disc, 1.0);
  CHECK(mass(u) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(mass(cplx(2.0) * u) == doctest::Approx(4.0).epsilon(1e-14));
  const SpectralField r = random_field(disc, 3);
  for (Generator g : {Generator::H, Generator::H0, Generator::L}) {
    CHECK(mass(h_flow(r, 0.77, g)) == doctest::Approx(mass(r)).epsilon(1e-12));
  }
}

TEST_CASE("angular momentum") {
  const auto disc = disc_for(4, 32, 12.0);
  CHECK(std::abs(angular_momentum(ground_times_gaussian(disc, 1.0))) < 1e-15);
  // Joint mode with eigenvalue +1/2 in the degree-1 block, unit mass.
  const JointEigenStructure& j = disc->joint;
  Eigen::MatrixXcd joint_row = Eigen::MatrixXcd::Zero(1, disc->mode_count());
  joint_row(0, 2) = 1.0;
  REQUIRE(j.l_eigenvalues(2) == doctest::Approx(0.5));
  const Eigen::MatrixXcd cart = from_joint(j, joint_row);
  SpectralField u = ground_times_gaussian(disc, 1.0);
  u.data() = u.data().col(0) * cart;
  CHECK(mass(u) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(angular_momentum(u) == doctest::Approx(0.5).epsilon(1e-13));

  const SpectralField r = random_field(disc, 8);
  CHECK(angular_momentum(h_flow(r, 1.9)) == doctest::Approx(angular_momentum(r)).epsilon(1e-12));
  // Agrees with <L u, u> computed from the L matrix, whose imaginary part vanishes.
  SpectralField lu = r;
  lu.data() = apply_angular_momentum(j, r.data());
  const cplx direct = inner(lu, r);
  CHECK(std::abs(direct.imag()) < 1e-12 * std::abs(direct.real()) + 1e-12);
  CHECK(direct.real() == doctest::Approx(angular_momentum(r)).epsilon(1e-12));
}

TEST_CASE("A functional") {
  const auto disc = disc_for(4, 32, 12.0, PotentialSpec::harmonic(1.0));
  CHECK(a_functional(ground_times_gaussian(disc, 1.0)) == doctest::Approx(0.5).epsilon(1e-14));
  const SpectralField r = random_localized_field(disc, 5);
  const double a = a_functional(r);
  CHECK(a_functional(h_flow(r, 2.3)) == doctest::Approx(a).epsilon(1e-12));
  CHECK(a_functional(axial_flow(r, 0.3)) == doctest::Approx(a).epsilon(1e-12));
}

TEST_CASE("eps energies") {
  const auto disc = disc_for(4, 32, 12.0, PotentialSpec::harmonic(1.0));
  CHECK(energy_eps(SpectralField::zero(disc), 0.1, 1.0, 1) == 0.0);
  CHECK(e0_eps(SpectralField::zero(disc), 0.1, 1.0, 1) == 0.0);
  for (int sigma = 1; sigma <= 4; ++sigma) {
    for (double lambda : {1.0, -1.0}) {
      const SpectralField u = random_localized_field(disc, 10 + sigma, 1.2);
      const double eps = 0.1;
      const double lhs = e0_eps(u, eps, lambda, sigma);
      const double rhs = 2 * energy_eps(u, eps, lambda, sigma) - angular_momentum(u) / (eps * eps);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }
  // Without nonlinearity the Hamiltonian is <H u, u>/(2 eps^2) + <H_z u, u>/2.
  const SpectralField g = ground_times_gaussian(disc, 1.0);
  const double expect = 0.5 / (0.04) * 0.5 + 0.5 * (axial_kinetic(g) + axial_potential(g));
  CHECK(energy_eps(g, 0.2, 0.0, 1) == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("axial parts of the energy") {
  // g = e^{-z^2/2} normalized: 1/2 ||g'||^2 = 1/4, int z^2/2 |g|^2 = 1/4.
  const auto disc = disc_for(2, 128, 24.0, PotentialSpec::harmonic(1.0));
  const SpectralField g = ground_times_gaussian(disc, 1.0);
  CHECK(axial_kinetic(g) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(axial_potential(g) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("limit energy parts") {
  const auto disc0 = disc_for(4, 32, 12.0);
  const SpectralField u = random_localized_field(disc0, 3);
  const LimitEnergy e = energy_limit(u, 1.0, 2);
  CHECK(e.b2 == 0.0);
  const LimitEnergy lin = energy_limit(u, 0.0, 2);
  CHECK(lin.nonlinear == 0.0);
  CHECK(lin.total() == doctest::Approx(e.b1 + e.b2));
  CHECK(energy_limit(u, -1.0, 2).nonlinear == doctest::Approx(-e.nonlinear));
  // The average is invariant under the H flow (shift of the theta origin).
  CHECK(energy_limit(h_flow(u, 0.6), 1.0, 2).nonlinear ==
        doctest::Approx(e.nonlinear).epsilon(1e-12));
  // The nonlinear part is the average of power integrals of e^{-i theta H} u.
  const int n = default_theta_count(2, 4);
  double avg = 0;
  for (int k = 0; k < n; ++k) {
    avg += power_integral(*disc0, to_node_slab(h_flow(u, 2 * M_PI * k / n)), 2) / n;
  }
  CHECK(e.nonlinear == doctest::Approx(avg / 3.0).epsilon(1e-12));
}

TEST_CASE("scale_field") {
  const auto disc = disc_for(2, 128, 32.0);
  const SpectralField u = random_localized_field(disc, 4, 2.0);
  CHECK((scale_field(u, 1.0).data() - u.data()).norm() == 0.0);
  CHECK_THROWS_AS(scale_field(u, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(scale_field(u, -2.0), std::invalid_argument);
  CHECK_THROWS_AS(scale_field(u, 1.5), std::invalid_argument);
  // Stretching (mu < 1) pushes mass to the boundary.
  CHECK_THROWS_AS(scale_field(u, 0.25, true), std::invalid_argument);

  const SpectralField s = scale_field(u, 2.0);
  CHECK(a_functional(s) == doctest::Approx(std::pow(2.0, -0.5) * a_functional(u)).epsilon(1e-8));
  CHECK(mass(s) == doctest::Approx(std::pow(2.0, -0.5) * mass(u)).epsilon(1e-8));
  const LimitEnergy e = energy_limit(u, 1.0, 4), es = energy_limit(s, 1.0, 4);
  CHECK(es.total() == doctest::Approx(std::pow(2.0, 1.5) * e.total()).epsilon(1e-8));
  const double inv = std::pow(a_functional(u), 3) * e.total();
  const double inv_s = std::pow(a_functional(s), 3) * es.total();
  CHECK(inv_s == doctest::Approx(inv).epsilon(1e-8));

  // Interpolated scaling agrees with the exact resampling on a dyadic factor.
  const SpectralField si = scale_field(u, 1.5, true);
  CHECK(a_functional(si) == doctest::Approx(std::pow(1.5, -0.5) * a_functional(u)).epsilon(1e-8));
}

TEST_CASE("observable series") {
  ObservableSeries s;
  s.columns = {"time", "M"};
  s.rows = {{0.0, 2.0}, {0.5, 2.5}, {1.0, 1.0}};
  CHECK(s.column_index("M") == 1);
  CHECK_THROWS_AS(s.column_index("nope"), std::out_of_range);
  CHECK(s.drift("M") == doctest::Approx(0.5));
  CHECK(s.drift("M", false) == doctest::Approx(1.0));
  CHECK(observable_columns(ModelKind::limit_nls).front() == "time");
  const auto disc = disc_for(2, 16, 12.0);
  const auto row = sample_observables(random_localized_field(disc, 1), ModelKind::eps_nls, 0.1, 1.0,
                                      1, 0);
  CHECK(row.size() == observable_columns(ModelKind::eps_nls).size());
}
