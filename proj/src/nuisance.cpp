#include "causalsel/nuisance.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "causalsel/errors.hpp"
#include "causalsel/format.hpp"
#include "causalsel/rng.hpp"

namespace causalsel {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string describe(const BaseSpec& spec) {
  return std::visit(
      Overloaded{
          [](const RidgeSpec& s) { return "ridge(lambda=" + format_double(s.lambda) + ")"; },
          [](const LogisticSpec& s) { return "logistic(C=" + format_double(1.0 / s.l2) + ")"; },
          [](const GbtParams& p) {
            return "gbt(lr=" + format_double(p.learning_rate) +
                   ",leaves=" + std::to_string(p.max_leaf_nodes) + ")";
          },
      },
      spec);
}

// Grid indices to evaluate: the whole grid when it fits in the budget,
// otherwise `budget` distinct draws, in ascending order.
std::vector<std::size_t> draw_points(std::size_t grid_size, int budget,
                                     std::uint64_t seed) {
  if (budget < 1) throw ConfigError("nuisance search: hp_budget must be >= 1");
  if (grid_size == 0) throw ConfigError("nuisance search: empty grid");
  std::vector<std::size_t> points;
  if (grid_size <= static_cast<std::size_t>(budget)) {
    points.resize(grid_size);
    for (std::size_t i = 0; i < grid_size; ++i) points[i] = i;
    return points;
  }
  Rng rng(seed);
  points = rng.sample_without_replacement(grid_size, static_cast<std::size_t>(budget));
  std::sort(points.begin(), points.end());
  return points;
}

struct SearchResult {
  std::vector<BaseSpec> specs;
  Matrix oof;
  std::string choice;
};

// Scores each candidate stack by the squared error of its simplex-weighted
// out-of-fold predictions and keeps the first best.
SearchResult search(const std::vector<std::vector<BaseSpec>>& stacks,
                    const Matrix& x, const Vector& y,
                    const std::vector<int>& folds, int n_folds) {
  std::map<std::string, Vector> cache;
  auto oof_of = [&](const BaseSpec& spec) -> const Vector& {
    const std::string key = describe(spec);
    auto it = cache.find(key);
    if (it == cache.end()) {
      it = cache.emplace(key, oof_predictions(spec, x, y, folds, n_folds)).first;
    }
    return it->second;
  };

  SearchResult best;
  double best_loss = std::numeric_limits<double>::infinity();
  for (const auto& specs : stacks) {
    Matrix oof(y.size(), static_cast<Eigen::Index>(specs.size()));
    for (std::size_t k = 0; k < specs.size(); ++k) {
      oof.col(static_cast<Eigen::Index>(k)) = oof_of(specs[k]);
    }
    const Vector w = simplex_least_squares(oof, y);
    const double loss = (oof * w - y).squaredNorm() / static_cast<double>(y.size());
    if (loss < best_loss) {
      best_loss = loss;
      best.specs = specs;
      best.oof = oof;
    }
  }
  for (std::size_t k = 0; k < best.specs.size(); ++k) {
    if (k) best.choice += '+';
    best.choice += describe(best.specs[k]);
  }
  return best;
}

GbtParams gbt_params(const NuisanceGrid& grid, GbtLoss loss, double lr, int leaves) {
  GbtParams p;
  p.loss = loss;
  p.learning_rate = lr;
  p.max_leaf_nodes = leaves;
  p.n_rounds = grid.gbt_rounds;
  p.min_samples_leaf = grid.gbt_min_samples_leaf;
  return p;
}

// Candidate stacks for one nuisance: single linear models for the linear
// variant, (linear, gbt) pairs over the joint grid for the stacked one.
std::vector<std::vector<BaseSpec>> candidate_stacks(const NuisanceOptions& options,
                                                    Task task,
                                                    std::uint64_t seed) {
  const NuisanceGrid& grid = options.grid;
  std::vector<BaseSpec> linear;
  if (task == Task::kClassification) {
    for (const double c : grid.logistic_cs) {
      if (!(c > 0.0)) throw ConfigError("nuisance grid: logistic C must be > 0");
      linear.push_back(LogisticSpec{1.0 / c});
    }
  } else {
    for (const double l : grid.ridge_lambdas) linear.push_back(RidgeSpec{l});
  }

  std::vector<std::vector<BaseSpec>> stacks;
  if (options.variant == NuisanceVariant::kLinear) {
    for (const std::size_t i : draw_points(linear.size(), options.hp_budget, seed)) {
      stacks.push_back({linear[i]});
    }
    return stacks;
  }
  const std::size_t n_lr = grid.gbt_learning_rates.size();
  const std::size_t n_leaves = grid.gbt_leaves.size();
  const GbtLoss loss = task == Task::kClassification ? GbtLoss::kLogistic : GbtLoss::kSquared;
  for (const std::size_t point :
       draw_points(linear.size() * n_lr * n_leaves, options.hp_budget, seed)) {
    const std::size_t i_leaf = point % n_leaves;
    const std::size_t i_lr = (point / n_leaves) % n_lr;
    const std::size_t i_lin = point / (n_leaves * n_lr);
    stacks.push_back({linear[i_lin], gbt_params(grid, loss, grid.gbt_learning_rates[i_lr],
                                                grid.gbt_leaves[i_leaf])});
  }
  return stacks;
}

StackedModel fit_one(const NuisanceOptions& options, const Matrix& x, const Vector& y,
                     Task task, std::uint64_t seed, std::string& choice) {
  const auto folds = make_folds(y, task, options.cv_folds, child_seed(seed, 0));
  const auto stacks = candidate_stacks(options, task, child_seed(seed, 1));
  SearchResult best = search(stacks, x, y, folds, options.cv_folds);
  choice = best.choice;
  return stack_from_oof(best.specs, x, y, task, options.cv_folds, best.oof);
}

}  // namespace

std::string_view to_string(NuisanceProvenance provenance) {
  switch (provenance) {
    case NuisanceProvenance::kOracle:
      return "oracle";
    case NuisanceProvenance::kLinear:
      return "linear";
    case NuisanceProvenance::kStacked:
      return "stacked";
  }
  return "unknown";
}

Vector clip_propensity(const Vector& values, double eta) {
  if (!(eta > 0.0 && eta < 0.5)) throw DomainError("clip_propensity: eta must be in (0, 0.5)");
  return values.unaryExpr([eta](double v) { return std::min(std::max(v, eta), 1.0 - eta); });
}

Vector oracle_conditional_mean(const Dataset& data) {
  if (!data.has_oracle()) throw DataError("oracle nuisances: dataset has no oracle columns");
  const OracleColumns& o = *data.oracle;
  return (o.e.array() * o.mu1.array() + (1.0 - o.e.array()) * o.mu0.array()).matrix();
}

NuisancePair oracle_nuisances(const Dataset& data, double eta) {
  if (!data.has_oracle()) throw DataError("oracle nuisances: dataset has no oracle columns");
  if (!(eta > 0.0 && eta < 0.5)) throw DomainError("oracle_nuisances: eta must be in (0, 0.5)");
  NuisancePair pair;
  pair.provenance = NuisanceProvenance::kOracle;
  pair.eta = eta;
  pair.e_choice = "oracle";
  pair.m_choice = "oracle";
  return pair;
}

Vector NuisancePair::predict_e(const Dataset& data) const {
  if (provenance == NuisanceProvenance::kOracle) {
    if (!data.has_oracle()) throw DataError("oracle nuisances: dataset has no oracle columns");
    return clip_propensity(data.oracle->e, eta);
  }
  return clip_propensity(e_model->predict(data.x), eta);
}

Vector NuisancePair::predict_m(const Dataset& data) const {
  if (provenance == NuisanceProvenance::kOracle) return oracle_conditional_mean(data);
  return m_model->predict(data.x);
}

NuisanceValues NuisancePair::evaluate(const Dataset& data) const {
  return NuisanceValues{predict_e(data), predict_m(data)};
}

NuisancePair fit_nuisances(const Dataset& train, const NuisanceOptions& options) {
  if (!train.has_both_arms()) {
    throw DegenerateInputError("fit_nuisances: training set has a single treatment arm");
  }
  if (!(options.eta > 0.0 && options.eta < 0.5)) {
    throw ConfigError("fit_nuisances: eta must be in (0, 0.5)");
  }
  if (options.cv_folds < 2) throw ConfigError("fit_nuisances: cv_folds must be >= 2");
  NuisancePair pair;
  pair.provenance = options.variant == NuisanceVariant::kLinear ? NuisanceProvenance::kLinear
                                                                : NuisanceProvenance::kStacked;
  pair.eta = options.eta;
  pair.e_model = fit_one(options, train.x, train.treatment(), Task::kClassification,
                         child_seed(options.seed, 0), pair.e_choice);
  pair.m_model = fit_one(options, train.x, train.y, Task::kRegression,
                         child_seed(options.seed, 1), pair.m_choice);
  return pair;
}

}  // namespace causalsel
