#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "causalsel/datagen.hpp"
#include "causalsel/dataset.hpp"
#include "causalsel/format.hpp"
#include "causalsel/learners/gbt.hpp"
#include "causalsel/learners/linear.hpp"
#include "causalsel/learners/stacking.hpp"

namespace causalsel {

enum class MetaLearner {
  kS,    // one head on [z(x), a]
  kT,    // separate featurizer and head per arm
  kSft,  // shared featurizer, one head per arm
};

std::string_view to_string(MetaLearner meta);

struct IdentityFeaturizer {};

// Random Gaussian-kernel basis with knots drawn from the training rows.
struct RbfFeaturizerSpec {
  int n_knots = 2;
  double gamma = 1.0;
  std::uint64_t seed = 0;
};

using FeaturizerSpec = std::variant<IdentityFeaturizer, RbfFeaturizerSpec>;
using HeadSpec = std::variant<RidgeSpec, GbtParams>;

struct CandidateSpec {
  MetaLearner meta = MetaLearner::kT;
  FeaturizerSpec featurizer = IdentityFeaturizer{};
  HeadSpec head = RidgeSpec{};

  // Canonical "key=value" description; contains no commas.
  std::string params() const;
  // 16 hex digits of a 64-bit FNV-1a hash of (meta, params).
  std::string id() const;
};

using Featurizer = std::variant<IdentityFeaturizer, RbfBasis>;
using HeadModel = std::variant<RidgeModel, GbtModel>;

// Predictions of both potential outcomes on the same rows.
struct ArmPredictions {
  Vector f0;
  Vector f1;

  Vector cate() const { return f1 - f0; }
  // f(x_i, a_i).
  Vector factual(const Eigen::VectorXi& a) const;
};

// Fitted candidate. Immutable after fit_candidate.
class OutcomeModel {
 public:
  OutcomeModel(CandidateSpec spec, std::vector<Featurizer> featurizers,
               std::vector<HeadModel> heads);

  const CandidateSpec& spec() const { return spec_; }
  const std::string& id() const { return id_; }

  Vector predict(const Matrix& x, int arm) const;
  ArmPredictions predict_arms(const Matrix& x) const;
  // tau_f(x) = f(x, 1) - f(x, 0).
  Vector cate(const Matrix& x) const;

 private:
  CandidateSpec spec_;
  std::string id_;
  std::vector<Featurizer> featurizers_;
  std::vector<HeadModel> heads_;
};

// Throws DegenerateInputError when an arm is empty for T/Sft learners (or
// has fewer rows than knots).
OutcomeModel fit_candidate(const CandidateSpec& spec, const Dataset& train);

struct CandidateFamily {
  std::vector<CandidateSpec> members;
  // Hash of the construction arguments.
  std::string provenance;

  std::size_t size() const { return members.size(); }
};

struct CaussimFamilyOptions {
  std::vector<double> lambdas{1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2};
  int n_bases = 10;
  int n_knots = 2;
  double gamma = 1.0;
};

// Ridge heads on random RBF bases, for every (basis, lambda) and both the
// T- and Sft-learner: |family| = n_bases * |lambdas| * 2.
CandidateFamily caussim_family(std::uint64_t seed,
                               const CaussimFamilyOptions& options = {});

struct GbtFamilyOptions {
  std::vector<double> learning_rates{0.01, 0.1, 1.0};
  std::vector<int> max_leaf_nodes{25, 27, 30, 32, 35, 40};
  int n_rounds = 100;
  int min_samples_leaf = 20;
};

// S-learner boosted trees on the raw covariates over the grid.
CandidateFamily gbt_family(const GbtFamilyOptions& options = {});

// Throws ConfigError if two members share an id.
void check_unique_ids(const CandidateFamily& family);

// CSV manifest `id,meta,params`.
void write_manifest(std::ostream& out, const CandidateFamily& family);

// Mean over rows of tau_f(x). Throws DomainError on empty x.
double estimate_ate(const OutcomeModel& f, const Matrix& x);
double estimate_ate(const ArmPredictions& predictions);

}  // namespace causalsel
