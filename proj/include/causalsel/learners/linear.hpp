#pragma once

#include <vector>

#include "causalsel/dataset.hpp"

namespace causalsel {

// Minimizes |y - Xw - b|^2 + lambda |w|^2; the intercept is not penalized.
struct RidgeModel {
  Vector weights;
  double intercept = 0.0;
  double lambda = 0.0;

  Vector predict(const Matrix& x) const;
};

// Throws NumericalError when lambda == 0 and the centered design is rank
// deficient.
RidgeModel ridge_fit(const Matrix& x, const Vector& y, double lambda);

// L2-penalized logistic regression fitted by iteratively reweighted least
// squares with a backtracking line search. Minimizes
//   sum_i logloss(t_i, sigmoid(x_i w + b)) + l2 / 2 |w|^2.
struct LogisticModel {
  Vector weights;
  double intercept = 0.0;
  double l2 = 0.0;
  int max_iter = 100;
  double tol = 1e-8;
  bool converged = false;
  int iterations = 0;
  // Penalized training loss after each accepted step, starting at the
  // initial point.
  std::vector<double> loss_trace;

  Vector decision_function(const Matrix& x) const;
  Vector predict_proba(const Matrix& x) const;
};

struct LogisticOptions {
  double l2 = 1.0;
  int max_iter = 100;
  // Convergence threshold on |gradient|_2 / n.
  double tol = 1e-8;
};

// `labels` must be 0/1 with both classes present (DegenerateInputError
// otherwise).
LogisticModel logistic_fit(const Matrix& x, const Vector& labels,
                           const LogisticOptions& options = {});

// Same solver on soft targets in [0, 1]; no class-presence check.
LogisticModel logistic_fit_soft(const Matrix& x, const Vector& targets,
                                const LogisticOptions& options);

double sigmoid(double z);
double logit(double p);

// Throws DegenerateInputError unless every entry is 0 or 1 and both occur.
void require_binary_labels(const Vector& labels, const char* context);

}  // namespace causalsel
