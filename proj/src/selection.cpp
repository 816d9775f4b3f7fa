#include "causalsel/selection.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "causalsel/errors.hpp"
#include "causalsel/rng.hpp"

namespace causalsel {

std::string_view to_string(Procedure procedure) {
  return procedure == Procedure::kShared ? "shared" : "separate";
}

Procedure parse_procedure(std::string_view name) {
  if (name == "shared") return Procedure::kShared;
  if (name == "separate" || name == "separate_nuisance") return Procedure::kSeparate;
  throw ConfigError("unknown procedure '" + std::string(name) + "'");
}

void SplitFractions::validate() const {
  auto in_range = [](double f) { return f >= 0.0 && f < 1.0; };
  if (!in_range(train) || !in_range(test) || !in_range(nuisance) || train <= 0.0 ||
      test <= 0.0) {
    throw ConfigError("split fractions must lie in [0, 1) with positive train and test");
  }
  if (std::abs(train + test + nuisance - 1.0) > 1e-9) {
    throw ConfigError("split fractions must sum to 1");
  }
}

SplitFractions default_split(Procedure procedure) {
  if (procedure == Procedure::kShared) return SplitFractions{0.5, 0.5, 0.0};
  return SplitFractions{0.5, 0.25, 0.25};
}

std::size_t argmin_by_id(const Vector& values, const std::vector<std::string>& ids) {
  if (values.size() == 0 || static_cast<std::size_t>(values.size()) != ids.size()) {
    throw DomainError("argmin_by_id: values and ids must be non-empty and aligned");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < ids.size(); ++i) {
    const double v = values[static_cast<Eigen::Index>(i)];
    const double b = values[static_cast<Eigen::Index>(best)];
    if (v < b || (v == b && ids[i] < ids[best])) best = i;
  }
  return best;
}

namespace {

struct Partition {
  IndexList train;
  IndexList nuisance;
  IndexList test;
};

bool has_both_arms(const Dataset& data, const IndexList& rows) {
  bool seen[2] = {false, false};
  for (const std::size_t r : rows) seen[data.a[static_cast<Eigen::Index>(r)]] = true;
  return seen[0] && seen[1];
}

Partition draw_partition(const Dataset& data, const SplitFractions& split, bool carve_nuisance,
                         std::uint64_t seed, int max_retries) {
  const std::size_t n = data.size();
  const auto n_train =
      static_cast<std::size_t>(std::llround(split.train * static_cast<double>(n)));
  const auto n_nuisance =
      carve_nuisance
          ? static_cast<std::size_t>(std::llround(split.nuisance * static_cast<double>(n)))
          : std::size_t{0};
  if (n_train < 2 || n_train + n_nuisance + 1 > n || (carve_nuisance && n_nuisance < 2)) {
    throw DomainError("run_selection: " + std::to_string(n) + " rows are too few for the split");
  }
  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    Rng rng(child_seed(seed, static_cast<std::uint64_t>(attempt)));
    const IndexList order = rng.permutation(n);
    Partition p;
    p.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    p.nuisance.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                      order.begin() + static_cast<std::ptrdiff_t>(n_train + n_nuisance));
    p.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_nuisance), order.end());
    if (has_both_arms(data, p.train) && (!carve_nuisance || has_both_arms(data, p.nuisance))) {
      return p;
    }
  }
  throw DegenerateInputError("run_selection: no split with both arms in every fitted partition after " +
                             std::to_string(max_retries) + " retries");
}

bool is_fitted_mode(const std::string& mode) { return mode == "linear" || mode == "stacked"; }

void check_modes(const std::vector<std::string>& modes) {
  std::set<std::string> seen;
  for (const auto& mode : modes) {
    if (mode != "oracle" && !is_fitted_mode(mode)) {
      throw ConfigError("unknown nuisance mode '" + mode + "'");
    }
    if (!seen.insert(mode).second) throw ConfigError("duplicate nuisance mode '" + mode + "'");
  }
}

}  // namespace

SelectionRun run_selection(const Dataset& data, const CandidateFamily& family,
                           const SelectionConfig& cfg) {
  if (family.members.empty()) throw ConfigError("run_selection: empty candidate family");
  cfg.split.validate();
  check_modes(cfg.nuisance_modes);
  const bool any_fitted = std::any_of(cfg.nuisance_modes.begin(), cfg.nuisance_modes.end(),
                                      is_fitted_mode);
  const bool carve = cfg.procedure == Procedure::kSeparate && any_fitted;
  if (carve && cfg.split.nuisance <= 0.0) {
    throw ConfigError("run_selection: separate procedure needs a nuisance fraction");
  }
  const Partition part = draw_partition(data, cfg.split, carve, child_seed(cfg.seed, 0),
                                        cfg.max_split_retries);

  SelectionRun run;
  run.procedure = cfg.procedure;
  run.split = cfg.split;
  run.seed = cfg.seed;
  run.train_rows = part.train;
  run.nuisance_rows = part.nuisance;
  run.test_rows = part.test;

  const Dataset train = subset(data, part.train);
  const Dataset test = subset(data, part.test);

  std::vector<NamedNuisances> nuisances;
  for (const auto& mode : cfg.nuisance_modes) {
    NuisancePair pair;
    if (mode == "oracle") {
      pair = oracle_nuisances(test, cfg.eta);
    } else {
      NuisanceOptions options;
      options.variant = mode == "linear" ? NuisanceVariant::kLinear : NuisanceVariant::kStacked;
      options.hp_budget = cfg.hp_budget;
      options.cv_folds = cfg.cv_folds;
      options.eta = cfg.eta;
      options.grid = cfg.nuisance_grid;
      options.seed = child_seed(cfg.seed, 1);
      pair = fit_nuisances(carve ? subset(data, part.nuisance) : train, options);
    }
    nuisances.push_back(NamedNuisances{mode, pair.evaluate(test)});
  }

  std::vector<std::string> ids;
  std::vector<ArmPredictions> predictions;
  ids.reserve(family.size());
  predictions.reserve(family.size());
  for (const auto& spec : family.members) {
    const OutcomeModel model = fit_candidate(spec, train);
    ids.push_back(model.id());
    predictions.push_back(model.predict_arms(test.x));
    run.ate.push_back(estimate_ate(predictions.back()));
  }

  run.risk_table = compute_risk_table(ids, predictions, test, nuisances);
  run.risk_table.eval_set_id = "test";
  for (const auto& column : run.risk_table.columns) {
    run.selected[column.key()] = ids[argmin_by_id(column.values, ids)];
  }
  return run;
}

double kendall(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DomainError("kendall: rankings differ in length");
  const Eigen::Index n = a.size();
  if (n < 2) throw DomainError("kendall: needs at least two values");
  long long score = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double da = a[i] - a[j];
      const double db = b[i] - b[j];
      if (da == 0.0 || db == 0.0) continue;
      score += (da > 0.0) == (db > 0.0) ? 1 : -1;
    }
  }
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  return static_cast<double>(score) / pairs;
}

AgreementReport agreement(const SelectionRun& run) {
  const RiskTable& table = run.risk_table;
  const RiskColumn* oracle = table.find(RiskName::kTau, kNoNuisance);
  if (oracle == nullptr) throw DataError("agreement: risk table has no tau-risk column");
  const auto& ids = table.candidate_ids;
  const double tau_min = oracle->values.minCoeff();
  auto index_of = [&](const std::string& id) {
    return static_cast<Eigen::Index>(std::find(ids.begin(), ids.end(), id) - ids.begin());
  };

  AgreementReport report;
  if (ids.size() >= 2) {
    double total = 0.0;
    for (const auto& column : table.columns) {
      if (&column == oracle) continue;
      const double k = kendall(column.values, oracle->values);
      report.kendall[column.key()] = k;
      total += k;
    }
    const double mean = report.kendall.empty() ? 0.0 : total / static_cast<double>(report.kendall.size());
    for (const auto& [key, k] : report.kendall) report.relative_kendall[key] = k - mean;
  }
  for (const auto& column : table.columns) {
    if (&column == oracle) continue;
    const std::string key = column.key();
    const double selected_tau = oracle->values[index_of(run.selected.at(key))];
    report.excess_tau_risk[key] = (selected_tau - tau_min) / std::max(tau_min, 1e-12);
  }
  return report;
}

std::vector<SweepRow> split_ratio_sweep(const Dataset& data, const CandidateFamily& family,
                                        const std::vector<double>& ratios,
                                        const SelectionConfig& cfg, double holdout_frac) {
  if (!data.has_oracle()) throw DataError("split_ratio_sweep: dataset has no oracle columns");
  if (ratios.empty()) throw ConfigError("split_ratio_sweep: no ratios");
  if (cfg.nuisance_modes.empty()) throw ConfigError("split_ratio_sweep: no nuisance mode");
  if (!(holdout_frac > 0.0 && holdout_frac < 1.0)) {
    throw DomainError("split_ratio_sweep: holdout_frac must be in (0, 1)");
  }
  const std::size_t n = data.size();
  const auto n_holdout =
      static_cast<std::size_t>(std::llround(holdout_frac * static_cast<double>(n)));
  Rng rng(child_seed(cfg.seed, 2));
  const IndexList order = rng.permutation(n);
  const IndexList holdout_rows(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_holdout));
  const IndexList rest_rows(order.begin() + static_cast<std::ptrdiff_t>(n_holdout), order.end());
  const Dataset holdout = subset(data, holdout_rows);
  const Dataset rest = subset(data, rest_rows);
  for (const double r : ratios) {
    if (!(r > 0.0 && r < 1.0)) throw DomainError("split_ratio_sweep: ratios must lie in (0, 1)");
    const double smallest = std::min(r, 1.0 - r) * static_cast<double>(rest.size());
    if (holdout.size() == 0 || smallest < 2.0) {
      throw DomainError("split_ratio_sweep: too few rows for ratio " + std::to_string(r));
    }
  }
  const double silver_ate = holdout.oracle->cate.mean();
  const std::string key = std::string(to_string(RiskName::kR)) + "/" + cfg.nuisance_modes.front();

  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    SelectionConfig run_cfg = cfg;
    run_cfg.procedure = Procedure::kShared;
    run_cfg.split = SplitFractions{ratios[i], 1.0 - ratios[i], 0.0};
    run_cfg.seed = child_seed(cfg.seed, 3 + i);
    const SelectionRun run = run_selection(rest, family, run_cfg);
    const std::string& selected = run.selected.at(key);
    const auto& ids = run.risk_table.candidate_ids;
    const auto index = static_cast<std::size_t>(std::find(ids.begin(), ids.end(), selected) - ids.begin());
    const CandidateSpec& spec = family.members[index];

    const double bias = std::abs(run.ate[index] - silver_ate) / std::max(std::abs(silver_ate), 1e-12);
    const OutcomeModel model = fit_candidate(spec, subset(rest, run.train_rows));
    const double holdout_tau = tau_risk(model.predict_arms(holdout.x), holdout);
    rows.push_back(SweepRow{ratios[i], "ate_relative_bias", bias, selected});
    rows.push_back(SweepRow{ratios[i], "holdout_tau_risk", holdout_tau, selected});
  }
  return rows;
}

}  // namespace causalsel
