#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "causalsel/candidates.hpp"
#include "causalsel/datagen.hpp"
#include "causalsel/errors.hpp"
#include "causalsel/nuisance.hpp"
#include "causalsel/risks.hpp"
#include "causalsel/rng.hpp"

using namespace causalsel;

namespace {

struct Instance {
  Dataset data;
  ArmPredictions f;
  NuisanceValues nuis;
};

// Random rows with oracle columns and interior nuisances.
Instance random_instance(std::uint64_t seed, int n = 50) {
  Rng rng(seed);
  Instance r;
  r.data.x = Matrix::Zero(n, 1);
  r.data.a.resize(n);
  r.data.y.resize(n);
  OracleColumns o{Vector(n), Vector(n), Vector(n), Vector(n)};
  r.f = {Vector(n), Vector(n)};
  r.nuis = {Vector(n), Vector(n)};
  for (int i = 0; i < n; ++i) {
    r.data.a[i] = rng.bernoulli(0.5) ? 1 : 0;
    r.data.y[i] = rng.normal();
    o.mu0[i] = rng.normal();
    o.mu1[i] = rng.normal();
    o.cate[i] = o.mu1[i] - o.mu0[i];
    o.e[i] = rng.uniform(0.1, 0.9);
    r.f.f0[i] = rng.normal();
    r.f.f1[i] = rng.normal();
    r.nuis.e[i] = rng.uniform(0.1, 0.9);
    r.nuis.m[i] = rng.normal();
  }
  r.data.oracle = o;
  return r;
}

Dataset noiseless(double theta, double p_a = 0.5, std::size_t n = 3000) {
  SimConfig cfg;
  cfg.seed = 21;
  cfg.theta = theta;
  cfg.p_a = p_a;
  cfg.n = n;
  cfg.sigma_noise = 0.0;
  return simulate(cfg);
}

}  // namespace

TEST(TauRisk, Basics) {
  const Dataset d = noiseless(1.0, 0.5, 500);
  ArmPredictions oracle{d.oracle->mu0, d.oracle->mu1};
  EXPECT_EQ(tau_risk(oracle, d), 0.0);
  ArmPredictions shifted{d.oracle->mu0, d.oracle->mu1.array() + 1.0};
  EXPECT_NEAR(tau_risk(shifted, d), 1.0, 1e-12);
  Dataset bare = d;
  bare.oracle.reset();
  EXPECT_THROW(tau_risk(oracle, bare), DataError);
}

TEST(TauRisk, MatchesLoop) {
  const Instance r = random_instance(1);
  double s = 0;
  for (int i = 0; i < 50; ++i) s += std::pow(r.data.oracle->cate[i] - (r.f.f1[i] - r.f.f0[i]), 2);
  EXPECT_NEAR(tau_risk(r.f, r.data), s / 50, 1e-12);
}

TEST(MuRisk, Basics) {
  Dataset d;
  d.x = Matrix::Zero(2, 1);
  d.a = Eigen::VectorXi::Zero(2);
  d.y.resize(2);
  d.y << 1, -1;
  EXPECT_DOUBLE_EQ(mu_risk(ArmPredictions{Vector::Zero(2), Vector::Zero(2)}, d), 1.0);
  EXPECT_DOUBLE_EQ(mu_risk(ArmPredictions{d.y, d.y}, d), 0.0);
  const Dataset z = noiseless(1.0, 0.5, 500);
  EXPECT_LE(mu_risk(ArmPredictions{z.oracle->mu0, z.oracle->mu1}, z), 1e-12);
}

TEST(MuRiskIpw, HalfPropensityDoublesMuRisk) {
  Instance r = random_instance(2);
  r.nuis.e.setConstant(0.5);
  EXPECT_NEAR(mu_risk_ipw(r.f, r.data, r.nuis), 2.0 * mu_risk(r.f, r.data), 1e-12);
}

TEST(MuRiskIpw, RandomizedForm) {
  Instance r = random_instance(3);
  const double p = 0.3;
  r.nuis.e.setConstant(p);
  double s = 0;
  for (int i = 0; i < 50; ++i) {
    const double a = r.data.a[i];
    const double fa = a == 1 ? r.f.f1[i] : r.f.f0[i];
    s += (a / p + (1 - a) / (1 - p)) * std::pow(r.data.y[i] - fa, 2);
  }
  EXPECT_NEAR(mu_risk_ipw(r.f, r.data, r.nuis), s / 50, 1e-12);
}

TEST(TauRiskIpw, SingleRow) {
  Dataset d;
  d.x = Matrix::Zero(1, 1);
  d.a = Eigen::VectorXi::Ones(1);
  d.y = Vector::Constant(1, 2.0);
  ArmPredictions f{Vector::Zero(1), Vector::Constant(1, 4.0)};
  NuisanceValues n{Vector::Constant(1, 0.5), Vector::Zero(1)};
  EXPECT_DOUBLE_EQ(tau_risk_ipw(f, d, n), 0.0);
}

TEST(TauRiskIpw, ZeroCateIsMeanSquaredPseudoOutcome) {
  Instance r = random_instance(4);
  r.f.f1 = r.f.f0;
  double s = 0;
  for (int i = 0; i < 50; ++i) {
    const double a = r.data.a[i], e = r.nuis.e[i];
    s += std::pow(r.data.y[i] * (a / e - (1 - a) / (1 - e)), 2);
  }
  EXPECT_NEAR(tau_risk_ipw(r.f, r.data, r.nuis), s / 50, 1e-12);
}

TEST(URisk, Basics) {
  Instance r = random_instance(5);
  r.data.y = r.nuis.m;
  EXPECT_NEAR(u_risk(r.f, r.data, r.nuis), r.f.cate().squaredNorm() / 50, 1e-12);
  Dataset d;
  d.x = Matrix::Zero(1, 1);
  d.a = Eigen::VectorXi::Ones(1);
  d.y = Vector::Constant(1, 1.0 + 0.7 * 3.0);
  NuisanceValues n{Vector::Constant(1, 0.3), Vector::Constant(1, 1.0)};
  ArmPredictions f{Vector::Zero(1), Vector::Constant(1, 3.0)};
  EXPECT_NEAR(u_risk(f, d, n), 0.0, 1e-24);
}

TEST(RRisk, ZeroWhenResidualsVanish) {
  Instance r = random_instance(6);
  r.data.y = r.nuis.m;
  r.nuis.e = r.data.treatment();
  EXPECT_EQ(r_risk(r.f, r.data, r.nuis), 0.0);
}

TEST(Risks, AllMatchLoopOracle) {
  for (std::uint64_t seed = 10; seed < 20; ++seed) {
    const Instance r = random_instance(seed, 80);
    double s[6] = {0, 0, 0, 0, 0, 0};
    for (int i = 0; i < 80; ++i) {
      const double a = r.data.a[i], y = r.data.y[i], e = r.nuis.e[i], m = r.nuis.m[i];
      const double fa = a == 1 ? r.f.f1[i] : r.f.f0[i];
      const double t = r.f.f1[i] - r.f.f0[i];
      s[0] += std::pow(r.data.oracle->cate[i] - t, 2);
      s[1] += std::pow(y - fa, 2);
      s[2] += (a / e + (1 - a) / (1 - e)) * std::pow(y - fa, 2);
      s[3] += std::pow(y * (a / e - (1 - a) / (1 - e)) - t, 2);
      s[4] += std::pow((y - m) / (a - e) - t, 2);
      s[5] += std::pow((y - m) - (a - e) * t, 2);
    }
    const RiskName names[6] = {RiskName::kTau, RiskName::kMu, RiskName::kMuIpw,
                               RiskName::kTauIpw, RiskName::kU, RiskName::kR};
    for (int k = 0; k < 6; ++k) {
      const double got = compute_risk(names[k], r.f, r.data, &r.nuis);
      EXPECT_LE(std::abs(got - s[k] / 80) / std::max(1.0, s[k] / 80), 1e-12) << k;
    }
  }
}

TEST(Risks, BayesPredictorWithOracleNuisances) {
  const Dataset d = noiseless(1.0);
  const ArmPredictions f{d.oracle->mu0, d.oracle->mu1};
  const NuisanceValues n = oracle_nuisances(d).evaluate(d);
  EXPECT_LE(tau_risk(f, d), 1e-10);
  EXPECT_LE(mu_risk(f, d), 1e-10);
  EXPECT_LE(mu_risk_ipw(f, d, n), 1e-10);
  EXPECT_LE(u_risk(f, d, n), 1e-10);
  EXPECT_LE(r_risk(f, d, n), 1e-10);
  // The IPW pseudo-outcome is unbiased for tau but not equal to it.
  EXPECT_GT(tau_risk_ipw(f, d, n), 1e-3);
}

TEST(Risks, RandomizedAffinity) {
  const Dataset d = noiseless(0.0, 0.3, 2000);
  const NuisanceValues n = oracle_nuisances(d).evaluate(d);
  Rng rng(8);
  for (int t = 0; t < 5; ++t) {
    ArmPredictions f{d.oracle->mu0.array() + rng.normal(),
                     d.oracle->mu1.array() + 0.3 * d.x.col(0).array()};
    const double r = r_risk(f, d, n);
    const double expected = (d.treatment().array() - 0.3).square().matrix().dot(
                                (d.oracle->cate - f.cate()).array().square().matrix()) /
                            static_cast<double>(d.size());
    EXPECT_NEAR(r, expected, 1e-12 * std::max(1.0, expected));
  }
}

TEST(Risks, NuisanceRiskWithoutNuisancesThrows) {
  const Instance r = random_instance(9);
  EXPECT_THROW(compute_risk(RiskName::kR, r.f, r.data, nullptr), Error);
  EXPECT_FALSE(needs_nuisances(RiskName::kMu));
  EXPECT_TRUE(needs_nuisances(RiskName::kU));
  EXPECT_EQ(parse_risk_name("r_risk"), RiskName::kR);
  EXPECT_THROW(parse_risk_name("w_risk"), Error);
}

TEST(RiskTable, LongCsvLayout) {
  const Instance r = random_instance(10, 20);
  const RiskTable t = compute_risk_table({"c0", "c1"}, {r.f, r.f}, r.data, {{"oracle", r.nuis}});
  EXPECT_EQ(t.columns.size(), 6u);
  EXPECT_NE(t.find(RiskName::kTau, kNoNuisance), nullptr);
  EXPECT_NE(t.find(RiskName::kR, "oracle"), nullptr);
  std::ostringstream out;
  t.write_csv(out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "candidate_id,risk_name,nuisance_mode,value");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 12);
}

TEST(BayesResiduals, Constants) {
  Vector e = Vector::Constant(10, 0.5);
  const BayesResiduals zero = bayes_residuals(0.0, e);
  EXPECT_EQ(zero.sigma_b_sq[0] + zero.sigma_b_sq[1] + zero.sigma_b_tilde_sq[0] +
                zero.sigma_b_tilde_sq[1],
            0.0);
  const BayesResiduals half = bayes_residuals(1.0, e);
  EXPECT_DOUBLE_EQ(half.sigma_b_tilde_sq[0], 0.5);
  EXPECT_DOUBLE_EQ(half.sigma_b_tilde_sq[1], 0.5);
  Rng rng(3);
  const Vector r = Vector::NullaryExpr(100, [&] { return rng.uniform(); });
  const BayesResiduals b = bayes_residuals(0.7, r);
  EXPECT_NEAR(b.sigma_b_tilde_sq[0] + b.sigma_b_tilde_sq[1], 0.49, 1e-15);
}

TEST(RiskBounds, OraclePairEquality) {
  const Dataset d = noiseless(1.0);
  const ArmPredictions f{d.oracle->mu0, d.oracle->mu1};
  const BayesResiduals res = bayes_residuals(d);
  const Prop1Check p1 = check_prop1(f, d, res);
  EXPECT_NEAR(p1.lhs, 0.0, 1e-12);
  EXPECT_NEAR(p1.rhs, 0.0, 1e-12);
  EXPECT_TRUE(p1.holds);
  const Prop2Check p2 = check_prop2(f, d, res);
  EXPECT_NEAR(p2.lhs, 0.0, 1e-12);
  EXPECT_NEAR(p2.rhs, 0.0, 1e-12);
}

TEST(RiskBounds, ArmSymmetricShiftHolds) {
  const Dataset d = noiseless(1.0);
  const ArmPredictions f{d.oracle->mu0.array() + 0.5, d.oracle->mu1.array() + 0.5};
  const Prop1Check p1 = check_prop1(f, d, bayes_residuals(d));
  EXPECT_NEAR(p1.lhs, 0.0, 1e-12);
  EXPECT_GT(p1.rhs, 0.0);
  EXPECT_TRUE(p1.holds);
}

TEST(RiskBounds, RandomizedDecomposition) {
  const Dataset d = noiseless(0.0, 0.5, 2000);
  const ArmPredictions f{d.oracle->mu0, d.oracle->mu1.array() + 0.2};
  const Prop2Check p2 = check_prop2(f, d, bayes_residuals(d));
  EXPECT_NEAR(p2.rhs, 0.25 * tau_risk(f, d), 1e-12);
  EXPECT_NEAR(p2.lhs, p2.rhs, 1e-12);
}

TEST(RiskBounds, LargeNoisyInstance) {
  SimConfig cfg;
  cfg.seed = 33;
  cfg.theta = 1.0;
  cfg.n = 60000;
  const Dataset all = simulate(cfg);
  IndexList tr(10000), ev(50000);
  for (std::size_t i = 0; i < 10000; ++i) tr[i] = i;
  for (std::size_t i = 0; i < 50000; ++i) ev[i] = 10000 + i;
  const Dataset train = subset(all, tr), eval = subset(all, ev);
  const BayesResiduals res = bayes_residuals(eval);
  CaussimFamilyOptions o;
  o.n_bases = 1;
  for (const auto& spec : caussim_family(4, o).members) {
    const ArmPredictions f = fit_candidate(spec, train).predict_arms(eval.x);
    EXPECT_TRUE(check_prop1(f, eval, res).holds) << spec.params();
    EXPECT_LE(check_prop2(f, eval, res).rel_err, 0.05) << spec.params();
  }
}

TEST(RiskBounds, UnknownNoiseUnsupported) {
  Dataset d = noiseless(1.0, 0.5, 100);
  d.sigma_noise.reset();
  EXPECT_THROW(bayes_residuals(d), UnsupportedError);
}
