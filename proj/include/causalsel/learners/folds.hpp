#pragma once

#include <cstdint>
#include <vector>

#include "causalsel/dataset.hpp"

namespace causalsel {

// Fold id in [0, k) for each of n rows, shuffled with `seed`. Throws
// ConfigError when k < 2 or n < k.
std::vector<int> kfold_assignment(std::size_t n, int k, std::uint64_t seed);

// Same, balancing each class of the 0/1 `labels` across folds. Throws
// DegenerateInputError when a class has fewer than two rows.
std::vector<int> stratified_kfold_assignment(const Vector& labels, int k,
                                             std::uint64_t seed);

struct FoldSplit {
  IndexList train;
  IndexList test;
};

FoldSplit fold_split(const std::vector<int>& assignment, int fold);

}  // namespace causalsel
