#include "magnls/averaging.hpp"

#include <numbers>
#include <stdexcept>
#include <string>

namespace magnls {

namespace {

void require_modal(const SpectralField& u, const char* what) {
  if (u.representation() != Representation::modal) {
    throw std::invalid_argument(std::string(what) + ": expected a modal field");
  }
}

}  // namespace

SpectralField eval_F(double theta, const SpectralField& u, int sigma) {
  require_modal(u, "eval_F");
  const Discretization& disc = u.disc();
  Eigen::MatrixXcd slab = to_node_slab(u);
  propagate_oscillator_inplace(disc.joint, slab, theta, Generator::H);
  Eigen::MatrixXcd g = galerkin_power(disc, slab, sigma);
  propagate_oscillator_inplace(disc.joint, g, -theta, Generator::H);
  return from_node_slab(u.disc_ptr(), g, u.time());
}

int theta_threshold(int sigma, int cutoff_degree) { return (sigma + 2) * cutoff_degree + 1; }

int default_theta_count(int sigma, int cutoff_degree) {
  const int n = theta_threshold(sigma, cutoff_degree);
  return n % 2 == 0 ? n : n + 1;
}

Eigen::MatrixXcd averaged_power(const Discretization& disc, const Eigen::MatrixXcd& slab,
                                int sigma, int n_theta) {
  if (n_theta <= 0) n_theta = default_theta_count(sigma, disc.cutoff());
  if (n_theta < theta_threshold(sigma, disc.cutoff())) {
    throw std::invalid_argument("eval_Fav: N_theta = " + std::to_string(n_theta) +
                                " is below the exactness threshold " +
                                std::to_string(theta_threshold(sigma, disc.cutoff())));
  }
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(slab.rows(), slab.cols());
  Eigen::MatrixXcd v(slab.rows(), slab.cols());
  for (int j = 0; j < n_theta; ++j) {
    const double theta = 2.0 * std::numbers::pi * j / n_theta;
    v = slab;
    propagate_oscillator_inplace(disc.joint, v, theta, Generator::H);
    Eigen::MatrixXcd g = galerkin_power(disc, v, sigma);
    propagate_oscillator_inplace(disc.joint, g, -theta, Generator::H);
    acc += g;
  }
  return acc / double(n_theta);
}

SpectralField eval_Fav(const SpectralField& u, int sigma, int n_theta) {
  require_modal(u, "eval_Fav");
  const Eigen::MatrixXcd avg = averaged_power(u.disc(), to_node_slab(u), sigma, n_theta);
  return from_node_slab(u.disc_ptr(), avg, u.time());
}

SpectralField eval_Fav_resonant(const SpectralField& u, int sigma) {
  require_modal(u, "eval_Fav_resonant");
  if (sigma != 1) {
    throw std::invalid_argument("eval_Fav_resonant: only sigma = 1 is supported, got " +
                                std::to_string(sigma));
  }
  const Discretization& disc = u.disc();
  const int D = disc.cutoff();
  if (D > 10) {
    throw std::invalid_argument("eval_Fav_resonant: cutoff " + std::to_string(D) +
                                " exceeds the oracle bound 10");
  }
  const Eigen::MatrixXcd slab = to_node_slab(u);
  std::vector<Eigen::MatrixXcd> level(D + 1);
  for (int n = 0; n <= D; ++n) level[n] = project_eigenlevel(disc.joint, slab, n);

  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(slab.rows(), slab.cols());
  for (int n4 = 0; n4 <= D; ++n4) {
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(slab.rows(), slab.cols());
    for (int n1 = 0; n1 <= D; ++n1) {
      for (int n2 = 0; n2 <= D; ++n2) {
        const int n3 = n1 + n2 - n4;
        if (n3 < 0 || n3 > D) continue;
        sum += galerkin_cubic_product(disc, level[n1], level[n2], level[n3]);
      }
    }
    out += project_eigenlevel(disc.joint, sum, n4);
  }
  return from_node_slab(u.disc_ptr(), out, u.time());
}

}  // namespace magnls
