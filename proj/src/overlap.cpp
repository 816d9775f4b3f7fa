#include "causalsel/overlap.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "causalsel/errors.hpp"
#include "causalsel/learners/calibration.hpp"
#include "causalsel/learners/folds.hpp"
#include "causalsel/learners/gbt.hpp"
#include "causalsel/learners/linear.hpp"
#include "causalsel/rng.hpp"

namespace causalsel {

double ntv(const Vector& e_values, double p_a) {
  if (!(p_a > 0.0 && p_a < 1.0)) throw DomainError("ntv: p_a must be in (0, 1)");
  if (e_values.size() == 0) throw DomainError("ntv: empty propensity vector");
  double total = 0.0;
  for (const double e : e_values) {
    if (!(e >= 0.0 && e <= 1.0)) throw DomainError("ntv: propensity outside [0, 1]");
    total += std::abs(e / p_a - (1.0 - e) / (1.0 - p_a));
  }
  const double value = total / (2.0 * static_cast<double>(e_values.size()));
  return std::clamp(value, 0.0, 1.0);
}

std::string_view to_string(OverlapSource source) {
  switch (source) {
    case OverlapSource::kOracle:
      return "oracle";
    case OverlapSource::kPluginLinear:
      return "plugin_linear";
    case OverlapSource::kPluginGbt:
      return "plugin_gbt";
  }
  return "unknown";
}

namespace {

double max_ipw(const Vector& e, const Eigen::VectorXi& a) {
  double out = 0.0;
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    out = std::max(out, a[i] == 1 ? 1.0 / e[i] : 1.0 / (1.0 - e[i]));
  }
  return out;
}

using Scorer = std::function<Vector(const Matrix& x_fit, const Vector& a_fit,
                                    const Matrix& x_eval)>;

// Margins (log-odds) of a classifier on x_eval.
Scorer logistic_scorer(double l2) {
  return [l2](const Matrix& x_fit, const Vector& a_fit, const Matrix& x_eval) {
    LogisticOptions options;
    options.l2 = l2;
    return logistic_fit(x_fit, a_fit, options).decision_function(x_eval);
  };
}

Scorer gbt_scorer(double lr, int min_samples_leaf, const PluginOptions& options) {
  GbtParams params;
  params.loss = GbtLoss::kLogistic;
  params.learning_rate = lr;
  params.min_samples_leaf = min_samples_leaf;
  params.n_rounds = options.gbt_rounds;
  params.max_leaf_nodes = options.gbt_leaves;
  return [params](const Matrix& x_fit, const Vector& a_fit, const Matrix& x_eval) {
    return gbt_fit(x_fit, a_fit, params).raw_predict(x_eval);
  };
}

Vector oof_margins(const Scorer& scorer, const Matrix& x, const Vector& a,
                   const std::vector<int>& folds, int n_folds) {
  Vector out(a.size());
  for (int fold = 0; fold < n_folds; ++fold) {
    const FoldSplit split = fold_split(folds, fold);
    if (split.test.empty()) continue;
    const Vector margins =
        scorer(select_rows(x, split.train), select_rows(a, split.train), select_rows(x, split.test));
    for (std::size_t r = 0; r < split.test.size(); ++r) {
      out[static_cast<Eigen::Index>(split.test[r])] = margins[static_cast<Eigen::Index>(r)];
    }
  }
  return out;
}

Vector to_probability(const Vector& margins) {
  return margins.unaryExpr([](double z) { return sigmoid(z); });
}

}  // namespace

OverlapReport ntv_oracle(const Dataset& data, double p_a) {
  if (!data.has_oracle()) throw DataError("ntv_oracle: dataset has no oracle propensity");
  OverlapReport report;
  report.source = OverlapSource::kOracle;
  report.p_a_hat = p_a;
  report.ntv = ntv(data.oracle->e, p_a);
  report.max_ipw = max_ipw(data.oracle->e, data.a);
  return report;
}

OverlapReport ntv_oracle(const Dataset& data) {
  if (!data.has_both_arms()) throw DegenerateInputError("ntv_oracle: single treatment arm");
  return ntv_oracle(data, static_cast<double>(data.treated_count()) /
                              static_cast<double>(data.size()));
}

OverlapReport ntv_plugin(const Dataset& data, OverlapSource model, bool calibrate,
                         const PluginOptions& options) {
  if (model == OverlapSource::kOracle) throw ConfigError("ntv_plugin: oracle is not a plug-in model");
  if (!data.has_both_arms()) throw DegenerateInputError("ntv_plugin: single treatment arm");
  if (!(options.holdout_fraction > 0.0 && options.holdout_fraction < 1.0)) {
    throw ConfigError("ntv_plugin: holdout_fraction must be in (0, 1)");
  }
  Rng rng(options.seed);
  const IndexList order = rng.permutation(data.size());
  const auto n_eval = static_cast<std::size_t>(
      std::llround(options.holdout_fraction * static_cast<double>(data.size())));
  if (n_eval == 0 || n_eval >= data.size()) {
    throw DomainError("ntv_plugin: too few rows for the holdout split");
  }
  const IndexList fit_rows(order.begin(), order.end() - static_cast<std::ptrdiff_t>(n_eval));
  const IndexList eval_rows(order.end() - static_cast<std::ptrdiff_t>(n_eval), order.end());
  const Dataset fit = subset(data, fit_rows);
  const Dataset eval = subset(data, eval_rows);
  if (!fit.has_both_arms()) throw DegenerateInputError("ntv_plugin: fitting half has a single arm");
  const Vector a_fit = fit.treatment();

  std::vector<Scorer> scorers;
  if (model == OverlapSource::kPluginLinear) {
    for (const double l2 : options.logistic_l2) scorers.push_back(logistic_scorer(l2));
  } else {
    for (const double lr : options.gbt_learning_rates) {
      for (const int leaf : options.gbt_min_samples_leaf) {
        scorers.push_back(gbt_scorer(lr, leaf, options));
      }
    }
  }
  if (scorers.empty()) throw ConfigError("ntv_plugin: empty hyper-parameter grid");

  const auto folds = stratified_kfold_assignment(a_fit, options.cv_folds, child_seed(options.seed, 1));
  std::size_t best = 0;
  double best_loss = std::numeric_limits<double>::infinity();
  Vector best_oof;
  for (std::size_t s = 0; s < scorers.size(); ++s) {
    const Vector oof = oof_margins(scorers[s], fit.x, a_fit, folds, options.cv_folds);
    double loss = 0.0;
    if (options.score == PluginScore::kBrier) {
      loss = (to_probability(oof) - a_fit).squaredNorm();
    } else {
      for (Eigen::Index i = 0; i < oof.size(); ++i) loss += (oof[i] > 0.0) != (a_fit[i] == 1.0);
    }
    if (loss < best_loss) {
      best_loss = loss;
      best = s;
      best_oof = oof;
    }
  }

  const Vector margins = scorers[best](fit.x, a_fit, eval.x);
  Vector e_hat;
  if (calibrate) {
    e_hat = platt_calibrate(best_oof, a_fit).apply(margins);
  } else {
    e_hat = to_probability(margins);
  }
  OverlapReport report;
  report.source = model;
  report.calibrated = calibrate;
  report.p_a_hat = static_cast<double>(data.treated_count()) / static_cast<double>(data.size());
  report.ntv = ntv(e_hat, report.p_a_hat);
  report.max_ipw = max_ipw(e_hat, eval.a);
  return report;
}

std::string_view to_string(OverlapBucket bucket) {
  switch (bucket) {
    case OverlapBucket::kStrong:
      return "strong";
    case OverlapBucket::kMedium:
      return "medium";
    case OverlapBucket::kWeak:
      return "weak";
  }
  return "unknown";
}

std::vector<OverlapBucket> tertile_bucket(const std::vector<double>& ntv_values) {
  const std::size_t n = ntv_values.size();
  if (n < 3) throw DomainError("tertile_bucket: needs at least three values");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return ntv_values[i] < ntv_values[j];
  });
  std::vector<OverlapBucket> out(n);
  std::size_t group_bucket = 0;
  for (std::size_t r = 0; r < n; ++r) {
    if (r == 0 || ntv_values[order[r]] != ntv_values[order[r - 1]]) group_bucket = 3 * r / n;
    out[order[r]] = static_cast<OverlapBucket>(group_bucket);
  }
  return out;
}

}  // namespace causalsel
