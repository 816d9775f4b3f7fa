#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace causalsel {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IndexList = std::vector<std::size_t>;

// Ground-truth columns, present only for simulated or semi-simulated data.
struct OracleColumns {
  Vector mu0;
  Vector mu1;
  Vector e;
  Vector cate;
};

// Observed tuple (x, a, y) plus the optional oracle columns.
//
// Invariants (checked by validate()): a[i] in {0, 1}; when the oracle is
// present, every oracle column has n rows, e[i] in (0, 1) and
// cate[i] == mu1[i] - mu0[i] exactly.
struct Dataset {
  Matrix x;
  Eigen::VectorXi a;
  Vector y;
  std::optional<OracleColumns> oracle;
  // Constant outcome-noise standard deviation; known only for simulations.
  std::optional<double> sigma_noise;

  std::size_t size() const { return static_cast<std::size_t>(y.size()); }
  std::size_t dim() const { return static_cast<std::size_t>(x.cols()); }
  bool has_oracle() const { return oracle.has_value(); }

  Vector treatment() const { return a.cast<double>(); }
  std::size_t treated_count() const;
  bool has_both_arms() const;

  // Throws ShapeError / DataError on a violated invariant.
  void validate() const;
};

Dataset subset(const Dataset& data, std::span<const std::size_t> rows);

// Rows with a == arm, in input order.
IndexList arm_rows(const Dataset& data, int arm);

Matrix select_rows(const Matrix& x, std::span<const std::size_t> rows);
Vector select_rows(const Vector& v, std::span<const std::size_t> rows);

}  // namespace causalsel
