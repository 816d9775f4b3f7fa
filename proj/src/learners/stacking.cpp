#include "causalsel/learners/stacking.hpp"

#include <Eigen/QR>
#include <limits>
#include <string>

#include "causalsel/errors.hpp"
#include "causalsel/learners/folds.hpp"

namespace causalsel {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

BaseModel fit_base(const BaseSpec& spec, const Matrix& x, const Vector& y) {
  return std::visit(
      Overloaded{
          [&](const RidgeSpec& s) -> BaseModel { return ridge_fit(x, y, s.lambda); },
          [&](const LogisticSpec& s) -> BaseModel {
            LogisticOptions options;
            options.l2 = s.l2;
            return logistic_fit(x, y, options);
          },
          [&](const GbtParams& s) -> BaseModel { return gbt_fit(x, y, s); },
      },
      spec);
}

Vector predict_base(const BaseModel& model, const Matrix& x) {
  return std::visit(
      Overloaded{
          [&](const RidgeModel& m) { return m.predict(x); },
          [&](const LogisticModel& m) { return m.predict_proba(x); },
          [&](const GbtModel& m) { return m.predict(x); },
      },
      model);
}

Vector StackedModel::predict(const Matrix& x) const {
  Vector out = Vector::Zero(x.rows());
  for (std::size_t k = 0; k < base_models.size(); ++k) {
    const double w = meta_weights[static_cast<Eigen::Index>(k)];
    if (w == 0.0) continue;
    out += w * predict_base(base_models[k], x);
  }
  return out;
}

std::vector<int> make_folds(const Vector& y, Task task, int n_folds,
                            std::uint64_t seed) {
  if (task == Task::kClassification) {
    return stratified_kfold_assignment(y, n_folds, seed);
  }
  return kfold_assignment(static_cast<std::size_t>(y.size()), n_folds, seed);
}

Vector oof_predictions(const BaseSpec& spec, const Matrix& x, const Vector& y,
                       const std::vector<int>& folds, int n_folds) {
  Vector out(y.size());
  for (int fold = 0; fold < n_folds; ++fold) {
    const FoldSplit split = fold_split(folds, fold);
    if (split.test.empty()) continue;
    const BaseModel model =
        fit_base(spec, select_rows(x, split.train), select_rows(y, split.train));
    const Vector pred = predict_base(model, select_rows(x, split.test));
    for (std::size_t r = 0; r < split.test.size(); ++r) {
      out[static_cast<Eigen::Index>(split.test[r])] = pred[static_cast<Eigen::Index>(r)];
    }
  }
  return out;
}

Vector simplex_least_squares(const Matrix& predictions, const Vector& y) {
  const auto k = predictions.cols();
  if (k < 1) throw DomainError("simplex_least_squares: no base predictions");
  if (k > 16) throw DomainError("simplex_least_squares: too many base models");
  if (predictions.rows() != y.size()) {
    throw ShapeError("simplex_least_squares: row mismatch");
  }
  const Matrix gram = predictions.transpose() * predictions;
  const Vector cross = predictions.transpose() * y;
  const double yy = y.squaredNorm();
  auto objective = [&](const Vector& w) {
    return yy - 2.0 * cross.dot(w) + w.dot(gram * w);
  };

  Vector best = Vector::Zero(k);
  double best_value = std::numeric_limits<double>::infinity();
  const double scale = std::max(yy, 1.0);
  for (unsigned mask = 1; mask < (1u << k); ++mask) {
    std::vector<Eigen::Index> support;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (mask & (1u << j)) support.push_back(j);
    }
    const auto s = static_cast<Eigen::Index>(support.size());
    // KKT system of min w'Gw - 2c'w subject to sum(w) = 1 on the support.
    Matrix kkt = Matrix::Zero(s + 1, s + 1);
    Vector rhs(s + 1);
    for (Eigen::Index a = 0; a < s; ++a) {
      for (Eigen::Index b = 0; b < s; ++b) kkt(a, b) = 2.0 * gram(support[a], support[b]);
      kkt(a, s) = 1.0;
      kkt(s, a) = 1.0;
      rhs[a] = 2.0 * cross[support[a]];
    }
    rhs[s] = 1.0;
    const Vector sol = kkt.completeOrthogonalDecomposition().solve(rhs);
    Vector w = Vector::Zero(k);
    bool feasible = sol.allFinite();
    for (Eigen::Index a = 0; a < s && feasible; ++a) {
      if (sol[a] < -1e-12) feasible = false;
      w[support[a]] = std::max(sol[a], 0.0);
    }
    if (!feasible) continue;
    const double total = w.sum();
    if (!(total > 0.0)) continue;
    w /= total;
    const double value = objective(w);
    if (value < best_value - 1e-13 * scale) {
      best_value = value;
      best = w;
    }
  }
  return best;
}

StackedModel stack_from_oof(const std::vector<BaseSpec>& specs,
                            const Matrix& x, const Vector& y, Task task,
                            int oof_folds, const Matrix& oof) {
  StackedModel model;
  model.task = task;
  model.oof_folds = oof_folds;
  model.meta_weights = simplex_least_squares(oof, y);
  model.base_models.reserve(specs.size());
  for (const auto& spec : specs) model.base_models.push_back(fit_base(spec, x, y));
  return model;
}

StackedModel stack_fit(const std::vector<BaseSpec>& specs, const Matrix& x,
                       const Vector& y, Task task, int oof_folds,
                       std::uint64_t seed) {
  if (specs.empty()) throw ConfigError("stack_fit: no base models");
  if (oof_folds < 2) throw ConfigError("stack_fit: oof_folds must be >= 2");
  if (y.size() < oof_folds) {
    throw ConfigError("stack_fit: " + std::to_string(y.size()) +
                      " samples for " + std::to_string(oof_folds) + " folds");
  }
  if (x.rows() != y.size()) throw ShapeError("stack_fit: row mismatch");
  if (task == Task::kClassification) require_binary_labels(y, "stack_fit");
  const auto folds = make_folds(y, task, oof_folds, seed);
  Matrix oof(y.size(), static_cast<Eigen::Index>(specs.size()));
  for (std::size_t k = 0; k < specs.size(); ++k) {
    oof.col(static_cast<Eigen::Index>(k)) = oof_predictions(specs[k], x, y, folds, oof_folds);
  }
  return stack_from_oof(specs, x, y, task, oof_folds, oof);
}

}  // namespace causalsel
