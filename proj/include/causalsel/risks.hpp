#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "causalsel/candidates.hpp"
#include "causalsel/dataset.hpp"
#include "causalsel/nuisance.hpp"

namespace causalsel {

// Finite-sum risks over the rows of `eval`. f holds both potential-outcome
// predictions on those rows; nuisance values are already clipped.

// mean (tau - tau_f)^2. Throws DataError without an oracle cate.
double tau_risk(const ArmPredictions& f, const Dataset& eval);
// mean (y - f(x, a))^2.
double mu_risk(const ArmPredictions& f, const Dataset& eval);
// mean w (y - f(x, a))^2 with w = a / e + (1 - a) / (1 - e).
double mu_risk_ipw(const ArmPredictions& f, const Dataset& eval, const NuisanceValues& nuis);
// mean (y (a / e - (1 - a) / (1 - e)) - tau_f)^2.
double tau_risk_ipw(const ArmPredictions& f, const Dataset& eval, const NuisanceValues& nuis);
// mean ((y - m) / (a - e) - tau_f)^2.
double u_risk(const ArmPredictions& f, const Dataset& eval, const NuisanceValues& nuis);
// mean ((y - m) - (a - e) tau_f)^2.
double r_risk(const ArmPredictions& f, const Dataset& eval, const NuisanceValues& nuis);

enum class RiskName { kTau, kMu, kMuIpw, kTauIpw, kU, kR };

std::string_view to_string(RiskName risk);
// Throws ConfigError on an unknown name.
RiskName parse_risk_name(std::string_view name);
bool needs_nuisances(RiskName risk);

double compute_risk(RiskName risk, const ArmPredictions& f, const Dataset& eval,
                    const NuisanceValues* nuis);

// Nuisance label of columns computed without nuisances.
inline constexpr std::string_view kNoNuisance = "none";

struct RiskColumn {
  RiskName risk = RiskName::kTau;
  std::string nuisance_mode;
  Vector values;  // one per candidate, in RiskTable::candidate_ids order

  // "risk_name/nuisance_mode", e.g. "r_risk/oracle".
  std::string key() const;
};

struct RiskTable {
  std::vector<std::string> candidate_ids;
  std::vector<RiskColumn> columns;
  std::string eval_set_id;

  const RiskColumn* find(RiskName risk, std::string_view nuisance_mode) const;
  // Long-format CSV `candidate_id,risk_name,nuisance_mode,value`.
  void write_csv(std::ostream& out, bool header = true) const;
};

struct NamedNuisances {
  std::string mode;  // oracle | linear | stacked
  NuisanceValues values;
};

// tau_risk (only with oracle cate) and mu_risk with mode "none", then the
// four nuisance risks for every entry of `nuisances`, in that order.
RiskTable compute_risk_table(const std::vector<std::string>& candidate_ids,
                             const std::vector<ArmPredictions>& predictions,
                             const Dataset& eval,
                             const std::vector<NamedNuisances>& nuisances);

// Bayes residual constants under constant noise.
struct BayesResiduals {
  double sigma_b_sq[2] = {0.0, 0.0};
  double sigma_b_tilde_sq[2] = {0.0, 0.0};
};

// sigma_B^2(a) = s^2, tilde sigma_B^2(1) = s^2 mean(e),
// tilde sigma_B^2(0) = s^2 mean(1 - e).
BayesResiduals bayes_residuals(double sigma_noise, const Vector& e);
// Uses the dataset noise level and oracle e. Throws UnsupportedError when
// either is unknown.
BayesResiduals bayes_residuals(const Dataset& eval);

struct Prop1Check {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

// lhs = tau_risk, rhs = 2 mu_risk_ipw(oracle e) - 2 (sigma_B^2(1) +
// sigma_B^2(0)); holds when lhs <= rhs + slack |rhs|.
Prop1Check check_prop1(const ArmPredictions& f, const Dataset& eval,
                       const BayesResiduals& residuals, double slack = 0.02,
                       double eta = kDefaultClip);

struct Prop2Check {
  double lhs = 0.0;
  double rhs = 0.0;
  double rel_err = 0.0;
};

// lhs = semi-oracle r_risk, rhs = mean e (1 - e) (tau - tau_f)^2 +
// tilde sigma_B^2(1) + tilde sigma_B^2(0).
Prop2Check check_prop2(const ArmPredictions& f, const Dataset& eval,
                       const BayesResiduals& residuals, double eta = kDefaultClip);

}  // namespace causalsel
