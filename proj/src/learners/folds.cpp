#include "causalsel/learners/folds.hpp"

#include <string>

#include "causalsel/errors.hpp"
#include "causalsel/rng.hpp"

namespace causalsel {

std::vector<int> kfold_assignment(std::size_t n, int k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("folds: need at least 2 folds");
  if (n < static_cast<std::size_t>(k)) {
    throw ConfigError("folds: " + std::to_string(n) + " samples for " +
                      std::to_string(k) + " folds");
  }
  Rng rng(seed);
  const auto order = rng.permutation(n);
  std::vector<int> assignment(n);
  for (std::size_t pos = 0; pos < n; ++pos) {
    assignment[order[pos]] = static_cast<int>(pos % static_cast<std::size_t>(k));
  }
  return assignment;
}

std::vector<int> stratified_kfold_assignment(const Vector& labels, int k,
                                             std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(labels.size());
  if (k < 2) throw ConfigError("folds: need at least 2 folds");
  if (n < static_cast<std::size_t>(k)) {
    throw ConfigError("folds: " + std::to_string(n) + " samples for " +
                      std::to_string(k) + " folds");
  }
  IndexList by_class[2];
  for (std::size_t i = 0; i < n; ++i) {
    by_class[labels[static_cast<Eigen::Index>(i)] == 1.0 ? 1 : 0].push_back(i);
  }
  if (by_class[0].size() < 2 || by_class[1].size() < 2) {
    throw DegenerateInputError("folds: each class needs at least two rows");
  }
  Rng rng(seed);
  std::vector<int> assignment(n);
  std::size_t counter = 0;
  for (auto& rows : by_class) {
    rng.shuffle(std::span<std::size_t>(rows));
    for (const std::size_t row : rows) {
      assignment[row] = static_cast<int>(counter++ % static_cast<std::size_t>(k));
    }
  }
  return assignment;
}

FoldSplit fold_split(const std::vector<int>& assignment, int fold) {
  FoldSplit split;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    (assignment[i] == fold ? split.test : split.train).push_back(i);
  }
  return split;
}

}  // namespace causalsel
