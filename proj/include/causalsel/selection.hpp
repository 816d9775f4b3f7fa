#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "causalsel/candidates.hpp"
#include "causalsel/nuisance.hpp"
#include "causalsel/risks.hpp"

namespace causalsel {

enum class Procedure { kShared, kSeparate };

std::string_view to_string(Procedure procedure);
// Accepts "shared", "separate" and "separate_nuisance".
Procedure parse_procedure(std::string_view name);

// Row fractions. `nuisance` is used by the separate procedure only.
struct SplitFractions {
  double train = 0.5;
  double test = 0.5;
  double nuisance = 0.0;

  // Throws ConfigError unless every fraction is in [0, 1), train and test
  // are positive and the fractions sum to 1.
  void validate() const;
};

SplitFractions default_split(Procedure procedure);

struct SelectionConfig {
  Procedure procedure = Procedure::kShared;
  SplitFractions split;
  // Subset of {"oracle", "linear", "stacked"}.
  std::vector<std::string> nuisance_modes{"stacked"};
  int hp_budget = 10;
  int cv_folds = 5;
  double eta = kDefaultClip;
  NuisanceGrid nuisance_grid;
  std::uint64_t seed = 0;
  int max_split_retries = 10;
};

struct SelectionRun {
  Procedure procedure = Procedure::kShared;
  SplitFractions split;
  std::uint64_t seed = 0;
  IndexList train_rows;
  IndexList nuisance_rows;
  IndexList test_rows;
  RiskTable risk_table;
  // RiskColumn::key() -> selected candidate id.
  std::map<std::string, std::string> selected;
  // Per-candidate ATE estimate on the test rows.
  std::vector<double> ate;
};

// Index of the smallest value; ties go to the lexicographically smallest id.
std::size_t argmin_by_id(const Vector& values, const std::vector<std::string>& ids);

// Algorithm 1 on one dataset: split, fit nuisances and candidates, compute
// every risk on the test rows and select per risk. The shared procedure
// fits nuisances on the candidate training rows; the separate procedure
// fits them on a disjoint nuisance set. When no fitted nuisance is
// requested the nuisance set is empty and both procedures use the same
// partition. A split with an empty arm in a fitted partition is redrawn up
// to max_split_retries times, then DegenerateInputError.
SelectionRun run_selection(const Dataset& data, const CandidateFamily& family,
                           const SelectionConfig& cfg);

// Kendall tau-a: (concordant - discordant) / (n (n - 1) / 2); tied pairs
// count as neither. Throws DomainError on mismatched lengths or n < 2.
double kendall(const Vector& a, const Vector& b);

struct AgreementReport {
  // Keyed by RiskColumn::key(), excluding the tau-risk column itself.
  std::map<std::string, double> kendall;
  std::map<std::string, double> relative_kendall;
  std::map<std::string, double> excess_tau_risk;
};

// Kendall of each risk column against tau-risk, the same centered on the
// mean over columns, and the relative excess tau-risk of each selection.
// Throws DataError without a tau-risk column.
AgreementReport agreement(const SelectionRun& run);

struct SweepRow {
  double ratio = 0.0;
  std::string metric;  // ate_relative_bias | holdout_tau_risk
  double value = 0.0;
  std::string selected_candidate;
};

// Splits off `holdout_frac` of the rows as V, then for each train ratio
// runs the shared procedure on the rest and selects with the R-risk of the
// first configured nuisance mode. Reports the relative ATE bias of the
// selected model on the test rows against the oracle ATE on V, and the
// selected model's tau-risk on V. Throws DataError without oracle columns
// and DomainError when a split would be empty.
std::vector<SweepRow> split_ratio_sweep(const Dataset& data, const CandidateFamily& family,
                                        const std::vector<double>& ratios,
                                        const SelectionConfig& cfg,
                                        double holdout_frac = 0.3);

}  // namespace causalsel
