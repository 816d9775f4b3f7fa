#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "causalsel/learners/gbt.hpp"
#include "causalsel/learners/linear.hpp"

namespace causalsel {

enum class Task { kRegression, kClassification };

struct RidgeSpec {
  double lambda = 1.0;
};

struct LogisticSpec {
  double l2 = 1.0;
};

using BaseSpec = std::variant<RidgeSpec, LogisticSpec, GbtParams>;
using BaseModel = std::variant<RidgeModel, LogisticModel, GbtModel>;

// Fits one base learner. Classification targets are 0/1.
BaseModel fit_base(const BaseSpec& spec, const Matrix& x, const Vector& y);

// Response-scale prediction: value for regressors, P(y = 1) for
// classifiers.
Vector predict_base(const BaseModel& model, const Matrix& x);

// Convex combination of base models. Weights are fitted on out-of-fold base
// predictions only; base models are then refitted on all rows.
struct StackedModel {
  Task task = Task::kRegression;
  std::vector<BaseModel> base_models;
  Vector meta_weights;
  int oof_folds = 5;

  Vector predict(const Matrix& x) const;
};

// Out-of-fold predictions of `spec` for the given fold assignment.
Vector oof_predictions(const BaseSpec& spec, const Matrix& x, const Vector& y,
                       const std::vector<int>& folds, int n_folds);

// argmin_w |y - P w|^2 over the probability simplex (exact, by enumerating
// supports). Squared error on the probability scale is the Brier score.
Vector simplex_least_squares(const Matrix& predictions, const Vector& y);

// Folds are stratified for classification. Throws ConfigError when
// oof_folds < 2 or there are fewer rows than folds.
StackedModel stack_fit(const std::vector<BaseSpec>& specs, const Matrix& x,
                       const Vector& y, Task task, int oof_folds,
                       std::uint64_t seed = 0);

// Stack from already computed out-of-fold predictions (one column per spec).
StackedModel stack_from_oof(const std::vector<BaseSpec>& specs,
                            const Matrix& x, const Vector& y, Task task,
                            int oof_folds, const Matrix& oof);

std::vector<int> make_folds(const Vector& y, Task task, int n_folds,
                            std::uint64_t seed);

}  // namespace causalsel
