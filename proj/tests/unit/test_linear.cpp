#include <gtest/gtest.h>

#include <cmath>

#include "causalsel/errors.hpp"
#include "causalsel/learners/linear.hpp"
#include "causalsel/rng.hpp"

using namespace causalsel;

TEST(Ridge, ExactInterpolation) {
  Matrix x(2, 1);
  x << 1, 2;
  Vector y(2);
  y << 1, 2;
  const RidgeModel m = ridge_fit(x, y, 0.0);
  EXPECT_NEAR(m.weights[0], 1.0, 1e-12);
  EXPECT_NEAR(m.intercept, 0.0, 1e-12);
}

TEST(Ridge, InfiniteShrinkage) {
  Rng rng(1);
  Matrix x(30, 3);
  Vector y(30);
  for (int i = 0; i < 30; ++i) {
    for (int j = 0; j < 3; ++j) x(i, j) = rng.normal();
    y[i] = rng.normal() + 2.0;
  }
  const RidgeModel m = ridge_fit(x, y, 1e12);
  EXPECT_LT(m.weights.norm(), 1e-6);
  EXPECT_NEAR(m.intercept, y.mean(), 1e-6);
}

TEST(Ridge, MatchesNormalEquations) {
  Rng rng(2);
  Matrix x(20, 3);
  Vector y(20);
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 3; ++j) x(i, j) = rng.normal();
    y[i] = rng.normal();
  }
  const double lambda = 0.7;
  // Centered normal equations: (Xc'Xc + lambda I) w = Xc'yc.
  const Vector xm = x.colwise().mean();
  const Matrix xc = x.rowwise() - xm.transpose();
  const Vector yc = y.array() - y.mean();
  const Vector w = (xc.transpose() * xc + lambda * Matrix::Identity(3, 3)).inverse() *
                   (xc.transpose() * yc);
  const RidgeModel m = ridge_fit(x, y, lambda);
  EXPECT_LE((m.weights - w).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_NEAR(m.intercept, y.mean() - xm.dot(w), 1e-8);
}

TEST(Ridge, RejectsBadInput) {
  EXPECT_THROW(ridge_fit(Matrix::Zero(3, 1), Vector::Zero(4), 1.0), ShapeError);
  EXPECT_THROW(ridge_fit(Matrix::Zero(3, 1), Vector::Zero(3), -1.0), DomainError);
}

TEST(Logistic, InterceptOnlyMatchesBaseRate) {
  const int n = 100;
  Matrix x(n, 0);
  Vector a = Vector::Zero(n);
  for (int i = 0; i < 30; ++i) a[i] = 1.0;
  LogisticOptions opt;
  opt.l2 = 1.0;
  const LogisticModel m = logistic_fit(x, a, opt);
  const Vector p = m.predict_proba(x);
  for (int i = 0; i < n; ++i) EXPECT_NEAR(p[i], 0.3, 1e-9);
}

TEST(Logistic, HeavyPenaltyShrinksWeights) {
  Rng rng(3);
  const int n = 200;
  Matrix x(n, 2);
  Vector a(n);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = rng.normal();
    x(i, 1) = rng.normal();
    a[i] = rng.bernoulli(0.5) ? 1.0 : 0.0;
  }
  LogisticOptions opt;
  opt.l2 = 1e6;
  EXPECT_LT(logistic_fit(x, a, opt).weights.norm(), 1e-3);
}

TEST(Logistic, MatchesGridSearch) {
  Rng rng(4);
  const int n = 200;
  Matrix x(n, 1);
  Vector a(n);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = rng.normal();
    a[i] = rng.bernoulli(sigmoid(1.5 * x(i, 0) - 0.3)) ? 1.0 : 0.0;
  }
  const double l2 = 0.5;
  auto loss = [&](double w, double b) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double z = w * x(i, 0) + b;
      s += std::log1p(std::exp(-std::abs(z))) + std::max(z, 0.0) - a[i] * z;
    }
    return s + 0.5 * l2 * w * w;
  };
  double best = 1e300;
  for (double w = -1.0; w <= 4.0; w += 0.01) {
    for (double b = -2.0; b <= 2.0; b += 0.01) best = std::min(best, loss(w, b));
  }
  LogisticOptions opt;
  opt.l2 = l2;
  const LogisticModel m = logistic_fit(x, a, opt);
  const double fitted = loss(m.weights[0], m.intercept);
  EXPECT_LE(fitted, best + 1e-6);
  EXPECT_TRUE(m.converged);
}

TEST(Logistic, RejectsNonBinaryLabels) {
  Vector a(3);
  a << 0, 1, 2;
  EXPECT_THROW(logistic_fit(Matrix::Zero(3, 1), a, {}), DataError);
}
