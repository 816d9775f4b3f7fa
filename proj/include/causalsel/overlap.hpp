#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "causalsel/dataset.hpp"

namespace causalsel {

// (1 / 2N) sum |e_i / p_a - (1 - e_i) / (1 - p_a)|, clamped to [0, 1].
// Throws DomainError unless 0 < p_a < 1 and every e_i is in [0, 1].
double ntv(const Vector& e_values, double p_a);

enum class OverlapSource { kOracle, kPluginLinear, kPluginGbt };

std::string_view to_string(OverlapSource source);

struct OverlapReport {
  double ntv = 0.0;
  OverlapSource source = OverlapSource::kOracle;
  bool calibrated = false;
  double p_a_hat = 0.0;
  // Largest inverse-propensity weight on the evaluated rows.
  double max_ipw = 0.0;
};

// NTV of the oracle propensities, with p_a the population prevalence when
// known and the empirical treatment rate otherwise. Throws DataError without
// oracle columns.
OverlapReport ntv_oracle(const Dataset& data, double p_a);
OverlapReport ntv_oracle(const Dataset& data);

// Cross-validation score used to pick the plug-in hyper-parameters.
enum class PluginScore { kAccuracy, kBrier };

struct PluginOptions {
  double holdout_fraction = 0.5;
  int cv_folds = 5;
  PluginScore score = PluginScore::kAccuracy;
  // Grids searched on the fitting half; ties keep the earlier grid point.
  std::vector<double> logistic_l2{1e-3, 1e-2, 1e-1, 1.0};
  std::vector<double> gbt_learning_rates{1e-3, 1e-2, 1e-1, 1.0};
  std::vector<int> gbt_min_samples_leaf{2, 10, 50, 100, 200};
  int gbt_rounds = 100;
  int gbt_leaves = 31;
  std::uint64_t seed = 0;
};

// Fits a propensity classifier on one half of `data` and evaluates NTV on
// the other half. With `calibrate`, a Platt map fitted on out-of-fold
// scores of the fitting half is applied before evaluation. p_a_hat is the
// empirical treatment rate. Throws DegenerateInputError on single-arm data.
OverlapReport ntv_plugin(const Dataset& data, OverlapSource model, bool calibrate,
                         const PluginOptions& options = {});

enum class OverlapBucket { kStrong, kMedium, kWeak };

std::string_view to_string(OverlapBucket bucket);

// Rank tertiles: strong = lowest NTV third, weak = highest. Equal values
// share the bucket of their first occurrence in stable sorted order.
// Throws DomainError for fewer than three values.
std::vector<OverlapBucket> tertile_bucket(const std::vector<double>& ntv_values);

}  // namespace causalsel
