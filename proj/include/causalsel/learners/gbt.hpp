#pragma once

#include <vector>

#include "causalsel/dataset.hpp"

namespace causalsel {

enum class GbtLoss { kSquared, kLogistic };

struct GbtParams {
  GbtLoss loss = GbtLoss::kSquared;
  double learning_rate = 0.1;
  int max_leaf_nodes = 31;
  int n_rounds = 100;
  int min_samples_leaf = 20;
  double l2_regularization = 0.0;
};

// Flat binary tree. A node is a leaf when feature < 0; rows with
// x[feature] <= threshold go left.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
};

struct RegressionTree {
  std::vector<TreeNode> nodes;

  double predict_row(const Matrix& x, Eigen::Index row) const;
  int leaf_count() const;
};

// Gradient-boosted trees grown best-first with exact greedy splits.
// Raw score = base_score + learning_rate * sum of tree outputs; for the
// logistic loss the raw score is a log-odds.
struct GbtModel {
  GbtParams params;
  double base_score = 0.0;
  std::vector<RegressionTree> trees;

  Vector raw_predict(const Matrix& x) const;
  // Regression value (squared loss) or probability (logistic loss).
  Vector predict(const Matrix& x) const;
};

// Throws DomainError for n < 2 or invalid parameters. A constant 0/1 target
// under the logistic loss yields a base-score-only model.
GbtModel gbt_fit(const Matrix& x, const Vector& y, const GbtParams& params);

}  // namespace causalsel
