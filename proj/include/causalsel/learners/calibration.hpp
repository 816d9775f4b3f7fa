#pragma once

#include "causalsel/dataset.hpp"

namespace causalsel {

// Platt sigmoid p = sigmoid(slope * score + intercept), slope >= 0 so the
// map never reverses the score order.
struct PlattMap {
  double slope = 0.0;
  double intercept = 0.0;

  double apply(double score) const;
  Vector apply(const Vector& scores) const;
};

// Fits the map with Platt's smoothed targets (N+ + 1) / (N+ + 2) and
// 1 / (N- + 2). Throws DegenerateInputError on single-class labels.
PlattMap platt_calibrate(const Vector& scores, const Vector& labels);

}  // namespace causalsel
