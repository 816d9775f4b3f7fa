#include "causalsel/dataset.hpp"

#include <cmath>
#include <string>

#include "causalsel/errors.hpp"

namespace causalsel {

std::size_t Dataset::treated_count() const {
  return static_cast<std::size_t>(a.sum());
}

bool Dataset::has_both_arms() const {
  const std::size_t treated = treated_count();
  return treated > 0 && treated < size();
}

void Dataset::validate() const {
  const auto n = y.size();
  if (x.rows() != n || a.size() != n) {
    throw ShapeError("dataset: x, a and y must have the same number of rows");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (a[i] != 0 && a[i] != 1) {
      throw DataError("dataset: column a must be binary (row " +
                      std::to_string(i) + ")");
    }
  }
  if (!oracle) return;
  const auto& o = *oracle;
  if (o.mu0.size() != n || o.mu1.size() != n || o.e.size() != n ||
      o.cate.size() != n) {
    throw ShapeError("dataset: oracle columns must have n rows");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(o.e[i] > 0.0 && o.e[i] < 1.0)) {
      throw DataError("dataset: oracle e must lie in (0, 1) (row " +
                      std::to_string(i) + ")");
    }
    if (o.cate[i] != o.mu1[i] - o.mu0[i]) {
      throw DataError("dataset: oracle cate must equal mu1 - mu0 (row " +
                      std::to_string(i) + ")");
    }
  }
}

Matrix select_rows(const Matrix& x, std::span<const std::size_t> rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.row(static_cast<Eigen::Index>(r)) =
        x.row(static_cast<Eigen::Index>(rows[r]));
  }
  return out;
}

Vector select_rows(const Vector& v, std::span<const std::size_t> rows) {
  Vector out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out[static_cast<Eigen::Index>(r)] = v[static_cast<Eigen::Index>(rows[r])];
  }
  return out;
}

Dataset subset(const Dataset& data, std::span<const std::size_t> rows) {
  Dataset out;
  out.x = select_rows(data.x, rows);
  out.y = select_rows(data.y, rows);
  out.a.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.a[static_cast<Eigen::Index>(r)] =
        data.a[static_cast<Eigen::Index>(rows[r])];
  }
  if (data.oracle) {
    out.oracle = OracleColumns{select_rows(data.oracle->mu0, rows),
                               select_rows(data.oracle->mu1, rows),
                               select_rows(data.oracle->e, rows),
                               select_rows(data.oracle->cate, rows)};
  }
  out.sigma_noise = data.sigma_noise;
  return out;
}

IndexList arm_rows(const Dataset& data, int arm) {
  IndexList rows;
  for (Eigen::Index i = 0; i < data.a.size(); ++i) {
    if (data.a[i] == arm) rows.push_back(static_cast<std::size_t>(i));
  }
  return rows;
}

}  // namespace causalsel
