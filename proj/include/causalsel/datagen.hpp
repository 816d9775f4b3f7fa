#pragma once

#include <cstdint>
#include <optional>

#include "causalsel/dataset.hpp"

namespace causalsel {

// Nystroem-style Gaussian-kernel basis: z(x) = [K(x, b_d)]_d * Z^T with
// K(x, y) = exp(-gamma * |x - y|^2) and Z the inverse square root of the
// representers' Gram matrix.
struct RbfBasis {
  Matrix representers;  // D x d
  double gamma = 1.0;
  Matrix z_norm;        // D x D, symmetric

  std::size_t size() const { return static_cast<std::size_t>(representers.rows()); }
  // Gram matrix K(b_i, b_j).
  Matrix gram() const;
  // Raw kernel vectors K(x_i, b_d), n x D.
  Matrix kernel(const Matrix& x) const;
};

RbfBasis make_rbf_basis(Matrix representers, double gamma);

// n x D transformed features. Throws ShapeError on a column mismatch.
Matrix rbf_featurize(const Matrix& x, const RbfBasis& basis);

// Ground-truth response: mu0(x) = [z(x), 1] . beta_mu and
// tau(x) = [z(x), 1] . beta_tau.
struct ResponseSurface {
  RbfBasis basis;
  Vector beta_mu;   // D + 1, intercept last
  Vector beta_tau;  // D + 1, intercept last

  Vector mu0(const Matrix& x) const;
  Vector cate(const Matrix& x) const;
};

// Two-component Gaussian mixture for the covariates: P(x | A=a) is
// W * N(((1 - 2a) theta, 0, ...), diag(sigma0_sq, sigma1_sq, ...)).
struct GaussianMixture {
  Matrix rotation;   // W, d x d orthogonal
  Vector axis_var;   // diagonal of the unrotated covariance
  double theta = 0.0;
  double p_a = 0.5;

  // Unrotated center of arm `a`.
  Vector center(int arm) const;
  // Log-density of arm `arm` at x, up to the constant shared by both arms.
  double log_density_kernel(const Eigen::Ref<const Vector>& x, int arm) const;
};

struct SimConfig {
  std::uint64_t seed = 0;
  double theta = 1.0;
  double p_a = 0.5;
  std::size_t n = 1000;
  std::size_t dim = 2;
  std::size_t d_basis = 2;
  double gamma = 1.0;
  // When unset the noise s.d. is noise_fraction * sd(mu0) on the instance.
  std::optional<double> sigma_noise;
  double noise_fraction = 0.1;
  double sigma0_sq = 2.0;
  double sigma1_sq = 5.0;
  // Scale of the standard-normal response coefficients.
  double coef_scale = 1.0;

  // Throws ConfigError.
  void validate() const;
};

struct CaussimInstance {
  Dataset data;
  ResponseSurface surface;
  GaussianMixture mixture;
};

// Full simulation including the generating surface and mixture.
CaussimInstance simulate_instance(const SimConfig& cfg);

// Pure function of cfg: same cfg gives a bit-identical dataset.
Dataset simulate(const SimConfig& cfg);

// p_a N1(x) / (p_a N1(x) + (1 - p_a) N0(x)), clamped to
// [1e-300, 1 - 1e-16] so it never reaches 0 or 1.
double oracle_propensity(const Eigen::Ref<const Vector>& x_row,
                         const GaussianMixture& mixture);

// Random rotation: uniform angle in 2-d, orthogonalized Gaussian otherwise.
class Rng;
Matrix random_rotation(std::size_t dim, Rng& rng);

}  // namespace causalsel
