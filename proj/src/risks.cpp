#include "causalsel/risks.hpp"

#include <cmath>
#include <ostream>

#include "causalsel/errors.hpp"
#include "causalsel/format.hpp"

namespace causalsel {

namespace {

void check_rows(const ArmPredictions& f, const Dataset& eval, const char* context) {
  const auto n = static_cast<Eigen::Index>(eval.size());
  if (n == 0) throw DomainError(std::string(context) + ": empty evaluation set");
  if (f.f0.size() != n || f.f1.size() != n) {
    throw ShapeError(std::string(context) + ": predictions and evaluation set differ in length");
  }
}

void check_rows(const ArmPredictions& f, const Dataset& eval, const NuisanceValues& nuis,
                const char* context) {
  check_rows(f, eval, context);
  const auto n = static_cast<Eigen::Index>(eval.size());
  if (nuis.e.size() != n || nuis.m.size() != n) {
    throw ShapeError(std::string(context) + ": nuisances and evaluation set differ in length");
  }
}

}  // namespace

double tau_risk(const ArmPredictions& f, const Dataset& eval) {
  check_rows(f, eval, "tau_risk");
  if (!eval.has_oracle()) throw DataError("tau_risk: evaluation set has no oracle cate");
  return (eval.oracle->cate - f.cate()).squaredNorm() / static_cast<double>(eval.size());
}

double mu_risk(const ArmPredictions& f, const Dataset& eval) {
  check_rows(f, eval, "mu_risk");
  return (eval.y - f.factual(eval.a)).squaredNorm() / static_cast<double>(eval.size());
}

double mu_risk_ipw(const ArmPredictions& f, const Dataset& eval, const NuisanceValues& nuis) {
  check_rows(f, eval, nuis, "mu_risk_ipw");
  const Vector a = eval.treatment();
  const Vector w = a.array() / nuis.e.array() + (1.0 - a.array()) / (1.0 - nuis.e.array());
  const Vector r = eval.y - f.factual(eval.a);
  return (w.array() * r.array().square()).mean();
}

double tau_risk_ipw(const ArmPredictions& f, const Dataset& eval, const NuisanceValues& nuis) {
  check_rows(f, eval, nuis, "tau_risk_ipw");
  const Vector a = eval.treatment();
  const Vector pseudo =
      eval.y.array() * (a.array() / nuis.e.array() - (1.0 - a.array()) / (1.0 - nuis.e.array()));
  return (pseudo - f.cate()).array().square().mean();
}

double u_risk(const ArmPredictions& f, const Dataset& eval, const NuisanceValues& nuis) {
  check_rows(f, eval, nuis, "u_risk");
  const Vector a = eval.treatment();
  const Vector pseudo = (eval.y - nuis.m).array() / (a - nuis.e).array();
  return (pseudo - f.cate()).array().square().mean();
}

double r_risk(const ArmPredictions& f, const Dataset& eval, const NuisanceValues& nuis) {
  check_rows(f, eval, nuis, "r_risk");
  const Vector a = eval.treatment();
  const Vector r = (eval.y - nuis.m).array() - (a - nuis.e).array() * f.cate().array();
  return r.array().square().mean();
}

std::string_view to_string(RiskName risk) {
  switch (risk) {
    case RiskName::kTau:
      return "tau_risk";
    case RiskName::kMu:
      return "mu_risk";
    case RiskName::kMuIpw:
      return "mu_risk_ipw";
    case RiskName::kTauIpw:
      return "tau_risk_ipw";
    case RiskName::kU:
      return "u_risk";
    case RiskName::kR:
      return "r_risk";
  }
  return "unknown";
}

RiskName parse_risk_name(std::string_view name) {
  for (const RiskName r : {RiskName::kTau, RiskName::kMu, RiskName::kMuIpw, RiskName::kTauIpw,
                           RiskName::kU, RiskName::kR}) {
    if (to_string(r) == name) return r;
  }
  throw ConfigError("unknown risk name '" + std::string(name) + "'");
}

bool needs_nuisances(RiskName risk) {
  return risk != RiskName::kTau && risk != RiskName::kMu;
}

double compute_risk(RiskName risk, const ArmPredictions& f, const Dataset& eval,
                    const NuisanceValues* nuis) {
  if (needs_nuisances(risk) && nuis == nullptr) {
    throw ConfigError(std::string(to_string(risk)) + " requires nuisance values");
  }
  switch (risk) {
    case RiskName::kTau:
      return tau_risk(f, eval);
    case RiskName::kMu:
      return mu_risk(f, eval);
    case RiskName::kMuIpw:
      return mu_risk_ipw(f, eval, *nuis);
    case RiskName::kTauIpw:
      return tau_risk_ipw(f, eval, *nuis);
    case RiskName::kU:
      return u_risk(f, eval, *nuis);
    case RiskName::kR:
      return r_risk(f, eval, *nuis);
  }
  throw ConfigError("unknown risk");
}

std::string RiskColumn::key() const {
  return std::string(to_string(risk)) + "/" + nuisance_mode;
}

const RiskColumn* RiskTable::find(RiskName risk, std::string_view nuisance_mode) const {
  for (const auto& column : columns) {
    if (column.risk == risk && column.nuisance_mode == nuisance_mode) return &column;
  }
  return nullptr;
}

void RiskTable::write_csv(std::ostream& out, bool header) const {
  if (header) out << "candidate_id,risk_name,nuisance_mode,value\n";
  for (std::size_t c = 0; c < candidate_ids.size(); ++c) {
    for (const auto& column : columns) {
      out << candidate_ids[c] << ',' << to_string(column.risk) << ',' << column.nuisance_mode
          << ',' << format_double(column.values[static_cast<Eigen::Index>(c)]) << '\n';
    }
  }
}

RiskTable compute_risk_table(const std::vector<std::string>& candidate_ids,
                             const std::vector<ArmPredictions>& predictions,
                             const Dataset& eval,
                             const std::vector<NamedNuisances>& nuisances) {
  if (candidate_ids.size() != predictions.size()) {
    throw ShapeError("compute_risk_table: ids and predictions differ in count");
  }
  const auto k = static_cast<Eigen::Index>(candidate_ids.size());
  RiskTable table;
  table.candidate_ids = candidate_ids;
  auto add = [&](RiskName risk, const std::string& mode, const NuisanceValues* nuis) {
    RiskColumn column{risk, mode, Vector(k)};
    for (Eigen::Index c = 0; c < k; ++c) {
      column.values[c] = compute_risk(risk, predictions[static_cast<std::size_t>(c)], eval, nuis);
    }
    table.columns.push_back(std::move(column));
  };
  const std::string none(kNoNuisance);
  if (eval.has_oracle()) add(RiskName::kTau, none, nullptr);
  add(RiskName::kMu, none, nullptr);
  for (const auto& named : nuisances) {
    for (const RiskName r : {RiskName::kMuIpw, RiskName::kTauIpw, RiskName::kU, RiskName::kR}) {
      add(r, named.mode, &named.values);
    }
  }
  return table;
}

BayesResiduals bayes_residuals(double sigma_noise, const Vector& e) {
  if (!(sigma_noise >= 0.0) || !std::isfinite(sigma_noise)) {
    throw DomainError("bayes_residuals: sigma_noise must be finite and >= 0");
  }
  if (e.size() == 0) throw DomainError("bayes_residuals: empty propensity vector");
  const double s2 = sigma_noise * sigma_noise;
  const double mean_e = e.mean();
  BayesResiduals out;
  out.sigma_b_sq[0] = s2;
  out.sigma_b_sq[1] = s2;
  out.sigma_b_tilde_sq[1] = s2 * mean_e;
  out.sigma_b_tilde_sq[0] = s2 * (1.0 - mean_e);
  return out;
}

BayesResiduals bayes_residuals(const Dataset& eval) {
  if (!eval.sigma_noise) {
    throw UnsupportedError("bayes_residuals: dataset has no known constant noise level");
  }
  if (!eval.has_oracle()) {
    throw UnsupportedError("bayes_residuals: dataset has no oracle propensity");
  }
  return bayes_residuals(*eval.sigma_noise, eval.oracle->e);
}

Prop1Check check_prop1(const ArmPredictions& f, const Dataset& eval,
                       const BayesResiduals& residuals, double slack, double eta) {
  const NuisanceValues oracle = oracle_nuisances(eval, eta).evaluate(eval);
  Prop1Check out;
  out.lhs = tau_risk(f, eval);
  out.rhs = 2.0 * mu_risk_ipw(f, eval, oracle) -
            2.0 * (residuals.sigma_b_sq[1] + residuals.sigma_b_sq[0]);
  out.holds = out.lhs <= out.rhs + slack * std::abs(out.rhs);
  return out;
}

Prop2Check check_prop2(const ArmPredictions& f, const Dataset& eval,
                       const BayesResiduals& residuals, double eta) {
  const NuisanceValues oracle = oracle_nuisances(eval, eta).evaluate(eval);
  Prop2Check out;
  out.lhs = r_risk(f, eval, oracle);
  const Vector& e = eval.oracle->e;
  const Vector gap = eval.oracle->cate - f.cate();
  out.rhs = (e.array() * (1.0 - e.array()) * gap.array().square()).mean() +
            residuals.sigma_b_tilde_sq[1] + residuals.sigma_b_tilde_sq[0];
  out.rel_err = std::abs(out.lhs - out.rhs) / std::max(out.rhs, 1e-12);
  return out;
}

}  // namespace causalsel
