#include "causalsel/learners/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "causalsel/errors.hpp"
#include "causalsel/learners/linear.hpp"

namespace causalsel {

namespace {

constexpr double kHessianFloor = 1e-16;
constexpr double kRelativeMinGain = 1e-12;
constexpr double kProbabilityClamp = 1e-15;

struct SplitCandidate {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
  int left_count = 0;
  double grad_left = 0.0;
  double hess_left = 0.0;
};

struct LeafRecord {
  int node = 0;
  int begin = 0;
  int end = 0;
  double grad = 0.0;
  double hess = 0.0;
  SplitCandidate split;
  bool splittable = false;
};

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, const std::vector<std::vector<int>>& presorted,
              const GbtParams& params)
      : x_(x),
        n_(static_cast<int>(x.rows())),
        d_(static_cast<int>(x.cols())),
        presorted_(presorted),
        params_(params),
        goes_left_(static_cast<std::size_t>(n_), 0),
        buffer_(static_cast<std::size_t>(n_)) {}

  // Grows one tree on (grad, hess) and adds learning_rate * leaf value to
  // `raw` for every training row.
  RegressionTree build(const std::vector<double>& grad,
                       const std::vector<double>& hess,
                       std::vector<double>& raw) {
    grad_ = &grad;
    hess_ = &hess;
    order_ = presorted_;

    RegressionTree tree;
    LeafRecord root;
    root.node = 0;
    root.begin = 0;
    root.end = n_;
    for (int i = 0; i < n_; ++i) {
      root.grad += grad[static_cast<std::size_t>(i)];
      root.hess += hess[static_cast<std::size_t>(i)];
    }
    tree.nodes.push_back(TreeNode{-1, 0.0, -1, -1, leaf_value(root.grad, root.hess)});
    evaluate(root);
    std::vector<LeafRecord> leaves{root};

    while (static_cast<int>(leaves.size()) < params_.max_leaf_nodes) {
      int best = -1;
      for (int k = 0; k < static_cast<int>(leaves.size()); ++k) {
        const auto& leaf = leaves[static_cast<std::size_t>(k)];
        if (!leaf.splittable) continue;
        if (best < 0 || leaf.split.gain > leaves[static_cast<std::size_t>(best)].split.gain) {
          best = k;
        }
      }
      if (best < 0) break;
      const LeafRecord parent = leaves[static_cast<std::size_t>(best)];
      apply_split(parent);

      LeafRecord left;
      left.begin = parent.begin;
      left.end = parent.begin + parent.split.left_count;
      left.grad = parent.split.grad_left;
      left.hess = parent.split.hess_left;
      LeafRecord right;
      right.begin = left.end;
      right.end = parent.end;
      right.grad = parent.grad - left.grad;
      right.hess = parent.hess - left.hess;

      left.node = static_cast<int>(tree.nodes.size());
      tree.nodes.push_back(TreeNode{-1, 0.0, -1, -1, leaf_value(left.grad, left.hess)});
      right.node = static_cast<int>(tree.nodes.size());
      tree.nodes.push_back(TreeNode{-1, 0.0, -1, -1, leaf_value(right.grad, right.hess)});
      TreeNode& split_node = tree.nodes[static_cast<std::size_t>(parent.node)];
      split_node.feature = parent.split.feature;
      split_node.threshold = parent.split.threshold;
      split_node.left = left.node;
      split_node.right = right.node;

      evaluate(left);
      evaluate(right);
      leaves[static_cast<std::size_t>(best)] = left;
      leaves.insert(leaves.begin() + best + 1, right);
    }

    const std::vector<int>& rows = order_.front();
    for (const auto& leaf : leaves) {
      const double step =
          params_.learning_rate * tree.nodes[static_cast<std::size_t>(leaf.node)].value;
      for (int k = leaf.begin; k < leaf.end; ++k) {
        raw[static_cast<std::size_t>(rows[static_cast<std::size_t>(k)])] += step;
      }
    }
    return tree;
  }

 private:
  double leaf_value(double grad, double hess) const {
    return grad / (hess + params_.l2_regularization);
  }

  double score(double grad, double hess) const {
    return grad * grad / (hess + params_.l2_regularization);
  }

  void evaluate(LeafRecord& leaf) const {
    leaf.splittable = false;
    const int count = leaf.end - leaf.begin;
    if (count < 2 * params_.min_samples_leaf) return;
    const auto& grad = *grad_;
    const auto& hess = *hess_;
    double grad_sq = 0.0;
    {
      const auto& rows = order_.front();
      for (int k = leaf.begin; k < leaf.end; ++k) {
        const double g = grad[static_cast<std::size_t>(rows[static_cast<std::size_t>(k)])];
        grad_sq += g * g;
      }
    }
    const double parent_score = score(leaf.grad, leaf.hess);
    SplitCandidate best;
    for (int f = 0; f < d_; ++f) {
      const int* rows = order_[static_cast<std::size_t>(f)].data() + leaf.begin;
      const double* col = x_.data() + static_cast<std::ptrdiff_t>(f) * n_;
      double grad_left = 0.0;
      double hess_left = 0.0;
      for (int k = 0; k + 1 < count; ++k) {
        const int r = rows[k];
        grad_left += grad[static_cast<std::size_t>(r)];
        hess_left += hess[static_cast<std::size_t>(r)];
        const int left_count = k + 1;
        if (left_count < params_.min_samples_leaf) continue;
        if (count - left_count < params_.min_samples_leaf) break;
        const double v = col[r];
        const double v_next = col[rows[k + 1]];
        if (!(v < v_next)) continue;
        const double gain = score(grad_left, hess_left) +
                            score(leaf.grad - grad_left, leaf.hess - hess_left) -
                            parent_score;
        if (gain > best.gain) {
          best.gain = gain;
          best.feature = f;
          double threshold = v + 0.5 * (v_next - v);
          if (!(threshold < v_next)) threshold = v;
          best.threshold = threshold;
          best.left_count = left_count;
          best.grad_left = grad_left;
          best.hess_left = hess_left;
        }
      }
    }
    if (best.feature >= 0 && best.gain > kRelativeMinGain * grad_sq) {
      leaf.split = best;
      leaf.splittable = true;
    }
  }

  void apply_split(const LeafRecord& leaf) {
    const int f_split = leaf.split.feature;
    {
      const auto& rows = order_[static_cast<std::size_t>(f_split)];
      for (int k = leaf.begin; k < leaf.end; ++k) {
        goes_left_[static_cast<std::size_t>(rows[static_cast<std::size_t>(k)])] =
            k < leaf.begin + leaf.split.left_count ? 1 : 0;
      }
    }
    for (int f = 0; f < d_; ++f) {
      if (f == f_split) continue;
      auto& rows = order_[static_cast<std::size_t>(f)];
      int write = leaf.begin;
      int spill = 0;
      for (int k = leaf.begin; k < leaf.end; ++k) {
        const int r = rows[static_cast<std::size_t>(k)];
        if (goes_left_[static_cast<std::size_t>(r)]) {
          rows[static_cast<std::size_t>(write++)] = r;
        } else {
          buffer_[static_cast<std::size_t>(spill++)] = r;
        }
      }
      std::copy(buffer_.begin(), buffer_.begin() + spill, rows.begin() + write);
    }
  }

  const Matrix& x_;
  int n_;
  int d_;
  const std::vector<std::vector<int>>& presorted_;
  const GbtParams& params_;
  std::vector<std::vector<int>> order_;
  std::vector<char> goes_left_;
  std::vector<int> buffer_;
  const std::vector<double>* grad_ = nullptr;
  const std::vector<double>* hess_ = nullptr;
};

void validate_params(const GbtParams& params) {
  if (!(params.learning_rate >= 0.0)) {
    throw DomainError("gbt_fit: learning_rate must be >= 0");
  }
  if (params.max_leaf_nodes < 2) {
    throw DomainError("gbt_fit: max_leaf_nodes must be >= 2");
  }
  if (params.n_rounds < 0) throw DomainError("gbt_fit: n_rounds must be >= 0");
  if (params.min_samples_leaf < 1) {
    throw DomainError("gbt_fit: min_samples_leaf must be >= 1");
  }
  if (!(params.l2_regularization >= 0.0)) {
    throw DomainError("gbt_fit: l2_regularization must be >= 0");
  }
}

}  // namespace

double RegressionTree::predict_row(const Matrix& x, Eigen::Index row) const {
  std::size_t node = 0;
  while (!nodes[node].is_leaf()) {
    const auto& n = nodes[node];
    node = static_cast<std::size_t>(x(row, n.feature) <= n.threshold ? n.left : n.right);
  }
  return nodes[node].value;
}

int RegressionTree::leaf_count() const {
  return static_cast<int>(std::count_if(nodes.begin(), nodes.end(),
                                        [](const TreeNode& n) { return n.is_leaf(); }));
}

Vector GbtModel::raw_predict(const Matrix& x) const {
  Vector raw = Vector::Constant(x.rows(), 0.0);
  for (const auto& tree : trees) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) raw[i] += tree.predict_row(x, i);
  }
  return (params.learning_rate * raw).array() + base_score;
}

Vector GbtModel::predict(const Matrix& x) const {
  Vector raw = raw_predict(x);
  if (params.loss == GbtLoss::kLogistic) {
    raw = raw.unaryExpr([](double z) { return sigmoid(z); });
  }
  return raw;
}

GbtModel gbt_fit(const Matrix& x, const Vector& y, const GbtParams& params) {
  validate_params(params);
  if (x.rows() != y.size()) {
    throw ShapeError("gbt_fit: x has " + std::to_string(x.rows()) +
                     " rows but y has " + std::to_string(y.size()));
  }
  if (y.size() < 2) throw DomainError("gbt_fit: need at least 2 rows");
  const auto n = static_cast<std::size_t>(y.size());

  GbtModel model;
  model.params = params;
  if (params.loss == GbtLoss::kLogistic) {
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      if (y[i] != 0.0 && y[i] != 1.0) {
        throw DataError("gbt_fit: logistic loss needs 0/1 labels (row " +
                        std::to_string(i) + ")");
      }
    }
    const double rate = y.mean();
    if (rate == 0.0 || rate == 1.0) {
      model.base_score = logit(std::clamp(rate, kProbabilityClamp, 1.0 - kProbabilityClamp));
      return model;
    }
    model.base_score = logit(rate);
  } else {
    model.base_score = y.mean();
  }
  if (params.n_rounds == 0) return model;

  std::vector<std::vector<int>> presorted(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index f = 0; f < x.cols(); ++f) {
    auto& order = presorted[static_cast<std::size_t>(f)];
    order.resize(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return x(a, f) < x(b, f); });
  }

  TreeBuilder builder(x, presorted, params);
  std::vector<double> raw(n, model.base_score);
  std::vector<double> grad(n);
  std::vector<double> hess(n);
  model.trees.reserve(static_cast<std::size_t>(params.n_rounds));
  for (int round = 0; round < params.n_rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      const double target = y[static_cast<Eigen::Index>(i)];
      if (params.loss == GbtLoss::kSquared) {
        grad[i] = target - raw[i];
        hess[i] = 1.0;
      } else {
        const double p = sigmoid(raw[i]);
        grad[i] = target - p;
        hess[i] = std::max(p * (1.0 - p), kHessianFloor);
      }
    }
    model.trees.push_back(builder.build(grad, hess, raw));
  }
  return model;
}

}  // namespace causalsel
