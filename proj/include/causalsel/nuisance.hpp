#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "causalsel/dataset.hpp"
#include "causalsel/learners/stacking.hpp"

namespace causalsel {

enum class NuisanceProvenance { kOracle, kLinear, kStacked };

std::string_view to_string(NuisanceProvenance provenance);

inline constexpr double kDefaultClip = 1e-10;

// Nuisance values evaluated on one set of rows: clipped propensity e and
// conditional mean outcome m.
struct NuisanceValues {
  Vector e;
  Vector m;
};

// Fitted (e, m) pair. Oracle pairs hold no model and read the oracle
// columns of whatever dataset they are evaluated on.
struct NuisancePair {
  NuisanceProvenance provenance = NuisanceProvenance::kOracle;
  double eta = kDefaultClip;
  std::optional<StackedModel> e_model;
  std::optional<StackedModel> m_model;
  // Hyper-parameters retained by the search, for logs.
  std::string e_choice;
  std::string m_choice;

  // Clipped to [eta, 1 - eta].
  Vector predict_e(const Dataset& data) const;
  Vector predict_m(const Dataset& data) const;
  NuisanceValues evaluate(const Dataset& data) const;
};

struct NuisanceGrid {
  std::vector<double> ridge_lambdas{1e-4, 1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2};
  // Inverse regularization strength; the logistic penalty is 1 / C.
  std::vector<double> logistic_cs{1e-4, 1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2};
  std::vector<double> gbt_learning_rates{0.01, 0.1, 1.0};
  std::vector<int> gbt_leaves{10, 20, 30, 50};
  int gbt_rounds = 100;
  int gbt_min_samples_leaf = 20;
};

enum class NuisanceVariant { kLinear, kStacked };

struct NuisanceOptions {
  NuisanceVariant variant = NuisanceVariant::kStacked;
  int hp_budget = 10;
  int cv_folds = 5;
  double eta = kDefaultClip;
  NuisanceGrid grid;
  std::uint64_t seed = 0;
};

// Randomized search over the grid scored by cross-validated Brier score (e)
// and MSE (m), then refit on all of `train`. The linear variant searches
// logistic C and ridge lambda; the stacked variant draws joint
// (linear penalty, learning rate, leaves) points and stacks the linear model
// with boosted trees. m is regressed on x alone.
// Throws DegenerateInputError when `train` lacks an arm.
NuisancePair fit_nuisances(const Dataset& train, const NuisanceOptions& options);

// min(max(v, eta), 1 - eta) elementwise. Throws DomainError unless
// 0 < eta < 0.5.
Vector clip_propensity(const Vector& values, double eta);

// e = oracle e, m = e mu1 + (1 - e) mu0. Throws DataError when `data` has no
// oracle columns.
NuisancePair oracle_nuisances(const Dataset& data, double eta = kDefaultClip);

// m = e mu1 + (1 - e) mu0 on the oracle columns, using the unclipped e.
Vector oracle_conditional_mean(const Dataset& data);

}  // namespace causalsel
