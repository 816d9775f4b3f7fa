#include "causalsel/datagen.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "causalsel/errors.hpp"
#include "causalsel/rng.hpp"

namespace causalsel {

namespace {

constexpr double kGramEigenFloor = 1e-12;
constexpr double kPropensityFloor = 1e-300;
constexpr double kPropensityCeil = 1.0 - 1e-16;

double sample_sd(const Vector& v) {
  if (v.size() < 2) return 0.0;
  const double mean = v.mean();
  return std::sqrt((v.array() - mean).square().sum() /
                   static_cast<double>(v.size() - 1));
}

Vector draw_mixture_point(const GaussianMixture& mixture, int arm, Rng& rng) {
  const Vector center = mixture.center(arm);
  Vector unrotated(center.size());
  for (Eigen::Index k = 0; k < center.size(); ++k) {
    unrotated[k] = center[k] + std::sqrt(mixture.axis_var[k]) * rng.normal();
  }
  return mixture.rotation * unrotated;
}

Vector linear_in_features(const Matrix& features, const Vector& beta) {
  const auto d = features.cols();
  return (features * beta.head(d)).array() + beta[d];
}

}  // namespace

Matrix RbfBasis::gram() const { return kernel(representers); }

Matrix RbfBasis::kernel(const Matrix& x) const {
  if (x.cols() != representers.cols()) {
    throw ShapeError("rbf basis: x has " + std::to_string(x.cols()) +
                     " columns, representers have " +
                     std::to_string(representers.cols()));
  }
  Matrix k(x.rows(), representers.rows());
  for (Eigen::Index j = 0; j < representers.rows(); ++j) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const double sq = (x.row(i) - representers.row(j)).squaredNorm();
      k(i, j) = std::exp(-gamma * sq);
    }
  }
  return k;
}

RbfBasis make_rbf_basis(Matrix representers, double gamma) {
  if (representers.rows() < 1) {
    throw ConfigError("rbf basis: need at least one representer");
  }
  if (!(gamma > 0.0)) throw ConfigError("rbf basis: gamma must be positive");
  RbfBasis basis;
  basis.representers = std::move(representers);
  basis.gamma = gamma;
  const Matrix gram = basis.gram();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(gram);
  const Vector inv_sqrt =
      solver.eigenvalues().cwiseMax(kGramEigenFloor).cwiseSqrt().cwiseInverse();
  basis.z_norm = solver.eigenvectors() * inv_sqrt.asDiagonal() *
                 solver.eigenvectors().transpose();
  // Symmetrize away rounding noise.
  basis.z_norm = 0.5 * (basis.z_norm + basis.z_norm.transpose()).eval();
  return basis;
}

Matrix rbf_featurize(const Matrix& x, const RbfBasis& basis) {
  if (basis.z_norm.rows() != basis.representers.rows() ||
      basis.z_norm.cols() != basis.representers.rows()) {
    throw ShapeError("rbf basis: normalizer does not match representers");
  }
  return basis.kernel(x) * basis.z_norm.transpose();
}

Vector ResponseSurface::mu0(const Matrix& x) const {
  return linear_in_features(rbf_featurize(x, basis), beta_mu);
}

Vector ResponseSurface::cate(const Matrix& x) const {
  return linear_in_features(rbf_featurize(x, basis), beta_tau);
}

Vector GaussianMixture::center(int arm) const {
  Vector c = Vector::Zero(axis_var.size());
  c[0] = (1.0 - 2.0 * arm) * theta;
  return c;
}

double GaussianMixture::log_density_kernel(const Eigen::Ref<const Vector>& x,
                                           int arm) const {
  const Vector unrotated = rotation.transpose() * x;
  const Vector c = center(arm);
  double acc = 0.0;
  for (Eigen::Index k = 0; k < unrotated.size(); ++k) {
    const double diff = unrotated[k] - c[k];
    acc += diff * diff / axis_var[k];
  }
  return -0.5 * acc;
}

double oracle_propensity(const Eigen::Ref<const Vector>& x_row,
                         const GaussianMixture& mixture) {
  const double p = mixture.p_a;
  const double log_ratio = mixture.log_density_kernel(x_row, 1) -
                           mixture.log_density_kernel(x_row, 0);
  double e;
  if (log_ratio > 0.0) {
    e = p / (p + (1.0 - p) * std::exp(-log_ratio));
  } else {
    const double r = std::exp(log_ratio);
    e = p * r / (p * r + (1.0 - p));
  }
  return std::clamp(e, kPropensityFloor, kPropensityCeil);
}

Matrix random_rotation(std::size_t dim, Rng& rng) {
  const auto d = static_cast<Eigen::Index>(dim);
  if (dim == 1) return Matrix::Identity(1, 1);
  if (dim == 2) {
    const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
    Matrix w(2, 2);
    w << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    return w;
  }
  Matrix g(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) g(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < d; ++k) {
    if (r(k, k) < 0.0) q.col(k) *= -1.0;
  }
  if (q.determinant() < 0.0) q.col(0) *= -1.0;
  return q;
}

void SimConfig::validate() const {
  if (n < 2) throw ConfigError("simulate: n must be at least 2");
  if (!(p_a > 0.0 && p_a < 1.0)) {
    throw ConfigError("simulate: p_a must lie in (0, 1)");
  }
  if (!(theta >= 0.0) || !std::isfinite(theta)) {
    throw ConfigError("simulate: theta must be finite and >= 0");
  }
  if (dim < 1) throw ConfigError("simulate: dim must be at least 1");
  if (d_basis < 1) throw ConfigError("simulate: d_basis must be at least 1");
  if (!(gamma > 0.0)) throw ConfigError("simulate: gamma must be positive");
  if (!(sigma0_sq > 0.0) || !(sigma1_sq > 0.0)) {
    throw ConfigError("simulate: axis variances must be positive");
  }
  if (sigma_noise && !(*sigma_noise >= 0.0)) {
    throw ConfigError("simulate: sigma_noise must be >= 0");
  }
  if (!(noise_fraction >= 0.0)) {
    throw ConfigError("simulate: noise_fraction must be >= 0");
  }
  if (!(coef_scale >= 0.0)) {
    throw ConfigError("simulate: coef_scale must be >= 0");
  }
}

CaussimInstance simulate_instance(const SimConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const auto d = static_cast<Eigen::Index>(cfg.dim);
  const auto n = static_cast<Eigen::Index>(cfg.n);
  const auto n_basis = static_cast<Eigen::Index>(cfg.d_basis);

  CaussimInstance inst;
  GaussianMixture& mixture = inst.mixture;
  mixture.rotation = random_rotation(cfg.dim, rng);
  mixture.axis_var = Vector::Constant(d, cfg.sigma1_sq);
  mixture.axis_var[0] = cfg.sigma0_sq;
  mixture.theta = cfg.theta;
  mixture.p_a = cfg.p_a;

  // Representers follow the covariate distribution.
  Matrix representers(n_basis, d);
  for (Eigen::Index k = 0; k < n_basis; ++k) {
    const int arm = rng.bernoulli(cfg.p_a) ? 1 : 0;
    representers.row(k) = draw_mixture_point(mixture, arm, rng).transpose();
  }
  inst.surface.basis = make_rbf_basis(std::move(representers), cfg.gamma);
  inst.surface.beta_mu.resize(n_basis + 1);
  inst.surface.beta_tau.resize(n_basis + 1);
  for (Eigen::Index k = 0; k <= n_basis; ++k) {
    inst.surface.beta_mu[k] = cfg.coef_scale * rng.normal();
  }
  for (Eigen::Index k = 0; k <= n_basis; ++k) {
    inst.surface.beta_tau[k] = cfg.coef_scale * rng.normal();
  }

  Dataset& data = inst.data;
  data.x.resize(n, d);
  data.a.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int arm = rng.bernoulli(cfg.p_a) ? 1 : 0;
    data.a[i] = arm;
    data.x.row(i) = draw_mixture_point(mixture, arm, rng).transpose();
  }

  OracleColumns oracle;
  oracle.mu0 = inst.surface.mu0(data.x);
  oracle.cate = inst.surface.cate(data.x);
  oracle.mu1 = oracle.mu0 + oracle.cate;
  // Keep cate == mu1 - mu0 bit-exact.
  oracle.cate = oracle.mu1 - oracle.mu0;
  oracle.e.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    oracle.e[i] = oracle_propensity(data.x.row(i).transpose(), mixture);
  }

  const double sigma =
      cfg.sigma_noise ? *cfg.sigma_noise : cfg.noise_fraction * sample_sd(oracle.mu0);
  data.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mean = data.a[i] == 1 ? oracle.mu1[i] : oracle.mu0[i];
    data.y[i] = mean + sigma * rng.normal();
  }
  data.sigma_noise = sigma;
  data.oracle = std::move(oracle);
  return inst;
}

Dataset simulate(const SimConfig& cfg) { return simulate_instance(cfg).data; }

}  // namespace causalsel
