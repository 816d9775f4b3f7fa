#include "causalsel/learners/linear.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <string>

#include "causalsel/errors.hpp"

namespace causalsel {

namespace {

double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

void check_rows(const Matrix& x, const Vector& y, const char* context) {
  if (x.rows() != y.size()) {
    throw ShapeError(std::string(context) + ": x has " +
                     std::to_string(x.rows()) + " rows but target has " +
                     std::to_string(y.size()));
  }
  if (y.size() < 1) throw DomainError(std::string(context) + ": empty input");
}

struct LogisticObjective {
  const Matrix& x;
  const Vector& t;
  double l2;

  double loss(const Vector& w, double b) const {
    const Vector z = (x * w).array() + b;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      acc += softplus(z[i]) - t[i] * z[i];
    }
    return acc + 0.5 * l2 * w.squaredNorm();
  }
};

}  // namespace

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double ez = std::exp(z);
  return ez / (1.0 + ez);
}

double logit(double p) { return std::log(p / (1.0 - p)); }

void require_binary_labels(const Vector& labels, const char* context) {
  bool has_zero = false;
  bool has_one = false;
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    if (labels[i] == 0.0) {
      has_zero = true;
    } else if (labels[i] == 1.0) {
      has_one = true;
    } else {
      throw DataError(std::string(context) + ": labels must be 0/1 (row " +
                      std::to_string(i) + ")");
    }
  }
  if (!has_zero || !has_one) {
    throw DegenerateInputError(std::string(context) +
                               ": both classes must be present");
  }
}

Vector RidgeModel::predict(const Matrix& x) const {
  if (x.cols() != weights.size()) {
    throw ShapeError("ridge predict: expected " +
                     std::to_string(weights.size()) + " columns");
  }
  return (x * weights).array() + intercept;
}

RidgeModel ridge_fit(const Matrix& x, const Vector& y, double lambda) {
  check_rows(x, y, "ridge_fit");
  if (!(lambda >= 0.0)) throw DomainError("ridge_fit: lambda must be >= 0");
  RidgeModel model;
  model.lambda = lambda;
  const double y_mean = y.mean();
  if (x.cols() == 0) {
    model.weights = Vector(0);
    model.intercept = y_mean;
    return model;
  }
  const Eigen::RowVectorXd x_mean = x.colwise().mean();
  const Matrix xc = x.rowwise() - x_mean;
  const Vector yc = y.array() - y_mean;
  const Vector rhs = xc.transpose() * yc;

  if (lambda > 0.0) {
    Matrix gram = xc.transpose() * xc;
    gram.diagonal().array() += lambda;
    Eigen::LLT<Matrix> llt(gram);
    if (llt.info() != Eigen::Success) {
      throw NumericalError("ridge_fit: regularized system is not positive definite");
    }
    model.weights = llt.solve(rhs);
  } else {
    Eigen::ColPivHouseholderQR<Matrix> qr(xc);
    if (qr.rank() < xc.cols()) {
      throw NumericalError("ridge_fit: singular system (rank-deficient x with lambda = 0)");
    }
    model.weights = qr.solve(yc);
  }
  model.intercept = y_mean - x_mean.dot(model.weights);
  return model;
}

Vector LogisticModel::decision_function(const Matrix& x) const {
  if (x.cols() != weights.size()) {
    throw ShapeError("logistic predict: expected " +
                     std::to_string(weights.size()) + " columns");
  }
  return (x * weights).array() + intercept;
}

Vector LogisticModel::predict_proba(const Matrix& x) const {
  return decision_function(x).unaryExpr([](double z) { return sigmoid(z); });
}

LogisticModel logistic_fit_soft(const Matrix& x, const Vector& targets,
                                const LogisticOptions& options) {
  check_rows(x, targets, "logistic_fit");
  if (!(options.l2 >= 0.0)) throw DomainError("logistic_fit: l2 must be >= 0");
  const auto n = x.rows();
  const auto p = x.cols();
  const LogisticObjective objective{x, targets, options.l2};

  LogisticModel model;
  model.l2 = options.l2;
  model.max_iter = options.max_iter;
  model.tol = options.tol;
  model.weights = Vector::Zero(p);
  const double rate = std::clamp(targets.mean(), 1e-12, 1.0 - 1e-12);
  model.intercept = logit(rate);

  double loss = objective.loss(model.weights, model.intercept);
  model.loss_trace.push_back(loss);

  // Parameter vector is [w; b].
  Matrix design(n, p + 1);
  design.leftCols(p) = x;
  design.col(p).setOnes();

  for (int iter = 0; iter < options.max_iter; ++iter) {
    const Vector z = (x * model.weights).array() + model.intercept;
    Vector prob(n);
    Vector curvature(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      prob[i] = sigmoid(z[i]);
      curvature[i] = std::max(prob[i] * (1.0 - prob[i]), 1e-12);
    }
    Vector grad = design.transpose() * (prob - targets);
    grad.head(p) += options.l2 * model.weights;
    if (grad.norm() / static_cast<double>(n) < options.tol) {
      model.converged = true;
      break;
    }
    Matrix hessian = design.transpose() * curvature.asDiagonal() * design;
    hessian.diagonal().head(p).array() += options.l2;
    // Tiny ridge keeps the system solvable under (quasi-)separation.
    hessian.diagonal().array() += 1e-10;
    Eigen::LDLT<Matrix> ldlt(hessian);
    const Vector step = ldlt.solve(grad);
    if (!step.allFinite()) break;

    double scale = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 40; ++halving) {
      const Vector w_new = model.weights - scale * step.head(p);
      const double b_new = model.intercept - scale * step[p];
      const double loss_new = objective.loss(w_new, b_new);
      if (loss_new <= loss) {
        model.weights = w_new;
        model.intercept = b_new;
        loss = loss_new;
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    ++model.iterations;
    if (!accepted) break;
    model.loss_trace.push_back(loss);
  }
  return model;
}

LogisticModel logistic_fit(const Matrix& x, const Vector& labels,
                           const LogisticOptions& options) {
  check_rows(x, labels, "logistic_fit");
  require_binary_labels(labels, "logistic_fit");
  return logistic_fit_soft(x, labels, options);
}

}  // namespace causalsel
