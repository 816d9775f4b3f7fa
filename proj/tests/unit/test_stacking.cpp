#include <gtest/gtest.h>

#include <cmath>

#include "causalsel/errors.hpp"
#include "causalsel/learners/calibration.hpp"
#include "causalsel/learners/folds.hpp"
#include "causalsel/learners/serialize.hpp"
#include "causalsel/learners/stacking.hpp"
#include "causalsel/rng.hpp"

using namespace causalsel;

namespace {

void linear_data(Rng& rng, int n, Matrix& x, Vector& y) {
  x.resize(n, 2);
  y.resize(n);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = rng.normal();
    x(i, 1) = rng.normal();
    y[i] = 1.0 + 2.0 * x(i, 0) - x(i, 1);
  }
}

}  // namespace

TEST(Stacking, SingleBaseEqualsBase) {
  Rng rng(1);
  Matrix x;
  Vector y;
  linear_data(rng, 100, x, y);
  const std::vector<BaseSpec> specs{RidgeSpec{0.1}};
  const StackedModel m = stack_fit(specs, x, y, Task::kRegression, 5, 3);
  ASSERT_EQ(m.meta_weights.size(), 1);
  EXPECT_DOUBLE_EQ(m.meta_weights[0], 1.0);
  const Vector base = predict_base(fit_base(specs[0], x, y), x);
  EXPECT_LE((m.predict(x) - base).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Stacking, IdenticalBasesGiveBasePrediction) {
  Rng rng(2);
  Matrix x;
  Vector y;
  linear_data(rng, 100, x, y);
  const std::vector<BaseSpec> specs{RidgeSpec{0.1}, RidgeSpec{0.1}};
  const StackedModel m = stack_fit(specs, x, y, Task::kRegression, 5, 3);
  const Vector base = predict_base(fit_base(specs[0], x, y), x);
  EXPECT_LE((m.predict(x) - base).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(m.meta_weights.sum(), 1.0, 1e-12);
}

TEST(Stacking, PerfectBaseGetsTheWeight) {
  Rng rng(3);
  Matrix x;
  Vector y;
  linear_data(rng, 200, x, y);
  GbtParams constant;
  constant.n_rounds = 0;
  const std::vector<BaseSpec> specs{RidgeSpec{1e-8}, constant};
  const StackedModel m = stack_fit(specs, x, y, Task::kRegression, 5, 4);
  EXPECT_GE(m.meta_weights[0], 0.99);
}

TEST(Stacking, SimplexSolverMatchesGrid) {
  Rng rng(4);
  const int n = 60;
  Matrix p(n, 3);
  Vector y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 3; ++j) p(i, j) = rng.normal();
    y[i] = 0.2 * p(i, 0) + 0.5 * p(i, 1) + rng.normal();
  }
  const Vector w = simplex_least_squares(p, y);
  EXPECT_NEAR(w.sum(), 1.0, 1e-12);
  EXPECT_GE(w.minCoeff(), 0.0);
  const double got = (p * w - y).squaredNorm();
  double best = 1e300;
  for (int a = 0; a <= 200; ++a) {
    for (int b = 0; a + b <= 200; ++b) {
      Vector v(3);
      v << a / 200.0, b / 200.0, (200 - a - b) / 200.0;
      best = std::min(best, (p * v - y).squaredNorm());
    }
  }
  EXPECT_LE(got, best + 1e-9);
}

TEST(Folds, StratifiedBalancesClasses) {
  Vector labels(100);
  for (int i = 0; i < 100; ++i) labels[i] = i < 30 ? 1.0 : 0.0;
  const auto folds = stratified_kfold_assignment(labels, 5, 9);
  std::vector<int> pos(5, 0), all(5, 0);
  for (int i = 0; i < 100; ++i) {
    ++all[folds[i]];
    pos[folds[i]] += labels[i] == 1.0;
  }
  for (int k = 0; k < 5; ++k) {
    EXPECT_EQ(all[k], 20);
    EXPECT_EQ(pos[k], 6);
  }
  EXPECT_THROW(kfold_assignment(3, 5, 1), ConfigError);
}

TEST(Platt, ConstantScoresGiveBaseRate) {
  Rng rng(5);
  const int n = 1000;
  Vector s = Vector::Constant(n, 0.3);
  Vector labels(n);
  for (int i = 0; i < n; ++i) labels[i] = rng.bernoulli(0.3) ? 1.0 : 0.0;
  const PlattMap map = platt_calibrate(s, labels);
  EXPECT_NEAR(map.apply(0.3), labels.mean(), 0.01);
  EXPECT_NEAR(map.apply(-5.0), map.apply(5.0), 1e-6);
}

TEST(Platt, MonotoneAndRecoversSlope) {
  Rng rng(6);
  const int n = 10000;
  Vector s(n), labels(n);
  for (int i = 0; i < n; ++i) {
    s[i] = rng.normal();
    labels[i] = rng.bernoulli(1.0 / (1.0 + std::exp(-(2.0 * s[i] - 1.0)))) ? 1.0 : 0.0;
  }
  const PlattMap map = platt_calibrate(s, labels);
  EXPECT_NEAR(map.slope, 2.0, 0.3);
  for (double v = -3.0; v < 3.0; v += 0.25) EXPECT_LE(map.apply(v), map.apply(v + 0.25));
}

TEST(Platt, SingleClassThrows) {
  EXPECT_THROW(platt_calibrate(Vector::Zero(5), Vector::Ones(5)), DegenerateInputError);
}

TEST(Serialize, RoundTripPreservesPredictions) {
  Rng rng(7);
  Matrix x;
  Vector y;
  linear_data(rng, 150, x, y);
  y += Vector::NullaryExpr(150, [&] { return 0.5 * rng.normal(); });
  GbtParams g;
  g.n_rounds = 5;
  const std::vector<BaseSpec> specs{RidgeSpec{0.1}, g};
  const StackedModel m = stack_fit(specs, x, y, Task::kRegression, 3, 1);
  const StackedModel back = load_stacked_model(save_model(m));
  EXPECT_TRUE(back.predict(x) == m.predict(x));
  Vector a = (x.col(0).array() > 0).cast<double>();
  LogisticSpec ls;
  ls.l2 = 0.5;
  const BaseModel lm = fit_base(ls, x, a);
  EXPECT_TRUE(predict_base(load_base_model(save_model(lm)), x) == predict_base(lm, x));
}

TEST(Serialize, RejectsUnknownSchema) {
  EXPECT_THROW(load_base_model("{\"schema_version\": 99, \"type\": \"ridge\"}"), Error);
  EXPECT_THROW(load_base_model("not json"), Error);
}
