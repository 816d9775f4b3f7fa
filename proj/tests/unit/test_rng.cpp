#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "causalsel/rng.hpp"

using namespace causalsel;

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(a.next_u64(), b.next_u64());
  }
  Rng c(42), d(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(c.normal(), d.normal());
}

TEST(Rng, UniformMoments) {
  Rng rng(1);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sq += u * u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);
  EXPECT_NEAR(sq / n - std::pow(sum / n, 2), 1.0 / 12.0, 0.002);
}

TEST(Rng, NormalMoments) {
  Rng rng(2);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.01);
}

TEST(Rng, UniformIndexCoversRange) {
  Rng rng(3);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) ++counts[rng.uniform_index(7)];
  for (const int c : counts) EXPECT_NEAR(c, 10000, 500);
}

TEST(Rng, PermutationIsAPermutation) {
  Rng rng(4);
  auto p = rng.permutation(50);
  std::sort(p.begin(), p.end());
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_EQ(p[i], i);
}

TEST(Rng, SampleWithoutReplacementIsDistinct) {
  Rng rng(5);
  const auto s = rng.sample_without_replacement(20, 20);
  EXPECT_EQ(std::set<std::size_t>(s.begin(), s.end()).size(), 20u);
  const auto t = rng.sample_without_replacement(1000, 10);
  EXPECT_EQ(std::set<std::size_t>(t.begin(), t.end()).size(), 10u);
  for (const auto v : t) EXPECT_LT(v, 1000u);
}

TEST(Rng, ChildSeedsDiffer) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(child_seed(7, i));
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_EQ(child_seed(7, 3), child_seed(7, 3));
  EXPECT_NE(child_seed(7, 3), child_seed(8, 3));
}
