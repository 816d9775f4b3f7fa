#include "causalsel/learners/calibration.hpp"

#include "causalsel/errors.hpp"
#include "causalsel/learners/linear.hpp"

namespace causalsel {

double PlattMap::apply(double score) const {
  return sigmoid(slope * score + intercept);
}

Vector PlattMap::apply(const Vector& scores) const {
  return scores.unaryExpr([this](double s) { return apply(s); });
}

PlattMap platt_calibrate(const Vector& scores, const Vector& labels) {
  if (scores.size() != labels.size()) {
    throw ShapeError("platt_calibrate: scores and labels differ in length");
  }
  require_binary_labels(labels, "platt_calibrate");
  const double positives = labels.sum();
  const double negatives = static_cast<double>(labels.size()) - positives;
  const double hi = (positives + 1.0) / (positives + 2.0);
  const double lo = 1.0 / (negatives + 2.0);
  const Vector targets = labels.unaryExpr([&](double l) { return l == 1.0 ? hi : lo; });

  LogisticOptions options;
  // A vanishing penalty pins the slope to zero when the scores carry no
  // information (e.g. constant scores).
  options.l2 = 1e-10;
  options.max_iter = 200;
  const Matrix design = scores;
  const LogisticModel fit = logistic_fit_soft(design, targets, options);

  PlattMap map;
  map.slope = fit.weights[0];
  map.intercept = fit.intercept;
  if (map.slope < 0.0) {
    // Anti-informative scores: fall back to the constant smoothed rate.
    map.slope = 0.0;
    map.intercept = logit(targets.mean());
  }
  return map;
}

}  // namespace causalsel
