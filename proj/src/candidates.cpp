#include "causalsel/candidates.hpp"

#include <charconv>
#include <cstdio>
#include <ostream>
#include <set>
#include <sstream>

#include "causalsel/errors.hpp"
#include "causalsel/rng.hpp"

namespace causalsel {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Featurizer fit_featurizer(const FeaturizerSpec& spec, const Matrix& x,
                          std::uint64_t seed) {
  return std::visit(
      Overloaded{
          [](const IdentityFeaturizer&) -> Featurizer { return IdentityFeaturizer{}; },
          [&](const RbfFeaturizerSpec& s) -> Featurizer {
            if (s.n_knots < 1) throw ConfigError("rbf featurizer: n_knots must be >= 1");
            const auto knots = static_cast<std::size_t>(s.n_knots);
            if (static_cast<std::size_t>(x.rows()) < knots) {
              throw DegenerateInputError("rbf featurizer: fewer rows than knots");
            }
            Rng rng(seed);
            const auto rows = rng.sample_without_replacement(
                static_cast<std::size_t>(x.rows()), knots);
            return make_rbf_basis(select_rows(x, rows), s.gamma);
          },
      },
      spec);
}

Matrix transform(const Featurizer& featurizer, const Matrix& x) {
  return std::visit(Overloaded{
                        [&](const IdentityFeaturizer&) -> Matrix { return x; },
                        [&](const RbfBasis& basis) -> Matrix { return rbf_featurize(x, basis); },
                    },
                    featurizer);
}

HeadModel fit_head(const HeadSpec& spec, const Matrix& z, const Vector& y) {
  return std::visit(
      Overloaded{
          [&](const RidgeSpec& s) -> HeadModel { return ridge_fit(z, y, s.lambda); },
          [&](const GbtParams& s) -> HeadModel { return gbt_fit(z, y, s); },
      },
      spec);
}

Vector predict_head(const HeadModel& head, const Matrix& z) {
  return std::visit([&](const auto& m) -> Vector { return m.predict(z); }, head);
}

Matrix with_treatment_column(const Matrix& z, const Vector& a) {
  Matrix out(z.rows(), z.cols() + 1);
  out.leftCols(z.cols()) = z;
  out.col(z.cols()) = a;
  return out;
}

std::string featurizer_params(const FeaturizerSpec& spec) {
  return std::visit(
      Overloaded{
          [](const IdentityFeaturizer&) -> std::string { return "featurizer=identity"; },
          [](const RbfFeaturizerSpec& s) -> std::string {
            return "featurizer=rbf knots=" + std::to_string(s.n_knots) +
                   " gamma=" + format_double(s.gamma) +
                   " seed=" + std::to_string(s.seed);
          },
      },
      spec);
}

std::string head_params(const HeadSpec& spec) {
  return std::visit(
      Overloaded{
          [](const RidgeSpec& s) -> std::string {
            return "head=ridge lambda=" + format_double(s.lambda);
          },
          [](const GbtParams& p) -> std::string {
            return std::string("head=gbt loss=") +
                   (p.loss == GbtLoss::kSquared ? "squared" : "logistic") +
                   " learning_rate=" + format_double(p.learning_rate) +
                   " max_leaf_nodes=" + std::to_string(p.max_leaf_nodes) +
                   " n_rounds=" + std::to_string(p.n_rounds) +
                   " min_samples_leaf=" + std::to_string(p.min_samples_leaf) +
                   " l2=" + format_double(p.l2_regularization);
          },
      },
      spec);
}

}  // namespace

std::string_view to_string(MetaLearner meta) {
  switch (meta) {
    case MetaLearner::kS:
      return "SLearner";
    case MetaLearner::kT:
      return "TLearner";
    case MetaLearner::kSft:
      return "SftLearner";
  }
  return "unknown";
}

std::string CandidateSpec::params() const {
  return featurizer_params(featurizer) + " " + head_params(head);
}

std::string CandidateSpec::id() const {
  return hex64(fnv1a(std::string(to_string(meta)) + " " + params()));
}

Vector ArmPredictions::factual(const Eigen::VectorXi& a) const {
  Vector out(a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out[i] = a[i] == 1 ? f1[i] : f0[i];
  return out;
}

OutcomeModel::OutcomeModel(CandidateSpec spec, std::vector<Featurizer> featurizers,
                           std::vector<HeadModel> heads)
    : spec_(std::move(spec)),
      id_(spec_.id()),
      featurizers_(std::move(featurizers)),
      heads_(std::move(heads)) {}

Vector OutcomeModel::predict(const Matrix& x, int arm) const {
  switch (spec_.meta) {
    case MetaLearner::kS: {
      const Matrix z = transform(featurizers_.front(), x);
      return predict_head(heads_.front(),
                          with_treatment_column(z, Vector::Constant(x.rows(), arm)));
    }
    case MetaLearner::kT:
      return predict_head(heads_[static_cast<std::size_t>(arm)],
                          transform(featurizers_[static_cast<std::size_t>(arm)], x));
    case MetaLearner::kSft:
      return predict_head(heads_[static_cast<std::size_t>(arm)],
                          transform(featurizers_.front(), x));
  }
  throw ConfigError("unknown meta-learner");
}

ArmPredictions OutcomeModel::predict_arms(const Matrix& x) const {
  return ArmPredictions{predict(x, 0), predict(x, 1)};
}

Vector OutcomeModel::cate(const Matrix& x) const { return predict_arms(x).cate(); }

OutcomeModel fit_candidate(const CandidateSpec& spec, const Dataset& train) {
  if (train.size() == 0) throw DegenerateInputError("fit_candidate: empty training set");
  const std::uint64_t seed = std::holds_alternative<RbfFeaturizerSpec>(spec.featurizer)
                                 ? std::get<RbfFeaturizerSpec>(spec.featurizer).seed
                                 : 0;
  std::vector<Featurizer> featurizers;
  std::vector<HeadModel> heads;
  if (spec.meta == MetaLearner::kS) {
    featurizers.push_back(fit_featurizer(spec.featurizer, train.x, seed));
    const Matrix z = with_treatment_column(transform(featurizers.front(), train.x),
                                           train.treatment());
    heads.push_back(fit_head(spec.head, z, train.y));
    return OutcomeModel(spec, std::move(featurizers), std::move(heads));
  }

  const IndexList rows[2] = {arm_rows(train, 0), arm_rows(train, 1)};
  for (int arm = 0; arm < 2; ++arm) {
    if (rows[arm].empty()) {
      throw DegenerateInputError(std::string("fit_candidate: arm ") +
                                 std::to_string(arm) + " is empty for " +
                                 std::string(to_string(spec.meta)));
    }
  }
  if (spec.meta == MetaLearner::kSft) {
    featurizers.push_back(fit_featurizer(spec.featurizer, train.x, seed));
  }
  for (int arm = 0; arm < 2; ++arm) {
    const Matrix x_arm = select_rows(train.x, rows[arm]);
    if (spec.meta == MetaLearner::kT) {
      featurizers.push_back(fit_featurizer(spec.featurizer, x_arm,
                                           child_seed(seed, static_cast<std::uint64_t>(arm))));
    }
    const Featurizer& featurizer = spec.meta == MetaLearner::kT
                                       ? featurizers.back()
                                       : featurizers.front();
    heads.push_back(
        fit_head(spec.head, transform(featurizer, x_arm), select_rows(train.y, rows[arm])));
  }
  return OutcomeModel(spec, std::move(featurizers), std::move(heads));
}

CandidateFamily caussim_family(std::uint64_t seed,
                               const CaussimFamilyOptions& options) {
  CandidateFamily family;
  std::ostringstream provenance;
  provenance << "caussim seed=" << seed << " knots=" << options.n_knots
             << " gamma=" << format_double(options.gamma)
             << " bases=" << options.n_bases << " lambdas=";
  for (const double l : options.lambdas) provenance << format_double(l) << ';';
  for (int b = 0; b < options.n_bases; ++b) {
    const RbfFeaturizerSpec basis{options.n_knots, options.gamma,
                                  child_seed(seed, static_cast<std::uint64_t>(b))};
    for (const double lambda : options.lambdas) {
      for (const MetaLearner meta : {MetaLearner::kT, MetaLearner::kSft}) {
        family.members.push_back(CandidateSpec{meta, basis, RidgeSpec{lambda}});
      }
    }
  }
  family.provenance = hex64(fnv1a(provenance.str()));
  check_unique_ids(family);
  return family;
}

CandidateFamily gbt_family(const GbtFamilyOptions& options) {
  CandidateFamily family;
  std::ostringstream provenance;
  provenance << "gbt rounds=" << options.n_rounds
             << " min_leaf=" << options.min_samples_leaf << " lr=";
  for (const double lr : options.learning_rates) provenance << format_double(lr) << ';';
  provenance << " leaves=";
  for (const int l : options.max_leaf_nodes) provenance << l << ';';
  for (const double lr : options.learning_rates) {
    for (const int leaves : options.max_leaf_nodes) {
      GbtParams params;
      params.loss = GbtLoss::kSquared;
      params.learning_rate = lr;
      params.max_leaf_nodes = leaves;
      params.n_rounds = options.n_rounds;
      params.min_samples_leaf = options.min_samples_leaf;
      family.members.push_back(CandidateSpec{MetaLearner::kS, IdentityFeaturizer{}, params});
    }
  }
  family.provenance = hex64(fnv1a(provenance.str()));
  check_unique_ids(family);
  return family;
}

void check_unique_ids(const CandidateFamily& family) {
  std::set<std::string> seen;
  for (const auto& member : family.members) {
    if (!seen.insert(member.id()).second) {
      throw ConfigError("candidate family: duplicate member id " + member.id());
    }
  }
}

void write_manifest(std::ostream& out, const CandidateFamily& family) {
  out << "id,meta,params\n";
  for (const auto& member : family.members) {
    out << member.id() << ',' << to_string(member.meta) << ',' << member.params() << '\n';
  }
}

double estimate_ate(const ArmPredictions& predictions) {
  if (predictions.f0.size() == 0) throw DomainError("estimate_ate: empty x");
  return predictions.cate().mean();
}

double estimate_ate(const OutcomeModel& f, const Matrix& x) {
  if (x.rows() == 0) throw DomainError("estimate_ate: empty x");
  return estimate_ate(f.predict_arms(x));
}

}  // namespace causalsel
