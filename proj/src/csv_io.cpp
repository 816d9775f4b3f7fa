#include "causalsel/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "causalsel/errors.hpp"

namespace causalsel {

namespace {

const char* const kOracleNames[4] = {"mu_0", "mu_1", "e", "cate"};

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  std::size_t start = 0;
  while (start < s.size() && s[start] == ' ') ++start;
  return s.substr(start);
}

std::string where(const std::string& source, std::size_t line, const std::string& column) {
  return source + ": line " + std::to_string(line) + ", column " + column;
}

}  // namespace

std::string format_csv_double(double value) {
  char buf[64];
  const auto result =
      std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  return std::string(buf, result.ptr);
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  data.validate();
  const auto d = data.x.cols();
  for (Eigen::Index k = 0; k < d; ++k) out << "x_" << k << ',';
  out << "a,y";
  if (data.oracle) out << ",mu_0,mu_1,e,cate";
  out << '\n';
  for (Eigen::Index i = 0; i < data.y.size(); ++i) {
    for (Eigen::Index k = 0; k < d; ++k) out << format_csv_double(data.x(i, k)) << ',';
    out << data.a[i] << ',' << format_csv_double(data.y[i]);
    if (data.oracle) {
      const auto& o = *data.oracle;
      out << ',' << format_csv_double(o.mu0[i]) << ',' << format_csv_double(o.mu1[i]) << ','
          << format_csv_double(o.e[i]) << ',' << format_csv_double(o.cate[i]);
    }
    out << '\n';
  }
}

void write_dataset_csv(const std::string& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_dataset_csv(out, data);
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

Dataset read_dataset_csv(std::istream& in, const std::string& source_name) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(source_name + ": empty file, no header");
  const std::vector<std::string> header = split_line(trim(line));

  std::map<std::string, std::size_t> index;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string name = trim(header[c]);
    if (name.empty()) throw DataError(source_name + ": empty column name at position " + std::to_string(c));
    if (!index.emplace(name, c).second) throw DataError(source_name + ": duplicate column " + name);
  }
  auto require = [&](const std::string& name) {
    auto it = index.find(name);
    if (it == index.end()) throw DataError(source_name + ": missing mandatory column " + name);
    return it->second;
  };
  std::vector<std::size_t> x_cols;
  std::size_t n_x = 0;
  for (const auto& [name, c] : index) {
    if (name.rfind("x_", 0) == 0) ++n_x;
  }
  if (n_x == 0) throw DataError(source_name + ": missing mandatory column x_0");
  for (std::size_t k = 0; k < n_x; ++k) x_cols.push_back(require("x_" + std::to_string(k)));
  const std::size_t a_col = require("a");
  const std::size_t y_col = require("y");
  std::optional<std::size_t> oracle_cols[4];
  int n_oracle = 0;
  for (int j = 0; j < 4; ++j) {
    auto it = index.find(kOracleNames[j]);
    if (it != index.end()) {
      oracle_cols[j] = it->second;
      ++n_oracle;
    }
  }
  if (n_oracle != 0 && n_oracle != 4) {
    for (int j = 0; j < 4; ++j) {
      if (!oracle_cols[j]) {
        throw DataError(source_name + ": incomplete oracle columns, missing " + kOracleNames[j]);
      }
    }
  }
  const bool has_oracle = n_oracle == 4;

  std::vector<double> xs, ys, as, oracle_values[4];
  std::vector<std::size_t> row_lines;
  std::size_t line_no = 1;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_line(line);
    if (fields.size() != header.size()) {
      throw DataError(source_name + ": line " + std::to_string(line_no) + " has " +
                      std::to_string(fields.size()) + " fields, header has " +
                      std::to_string(header.size()));
    }
    auto parse = [&](std::size_t c) {
      const std::string text = trim(fields[c]);
      double value = 0.0;
      const char* begin = text.data();
      const char* end = begin + text.size();
      const auto result = std::from_chars(begin, end, value);
      if (text.empty() || result.ec != std::errc() || result.ptr != end || !std::isfinite(value)) {
        throw DataError(where(source_name, line_no, trim(header[c])) + ": invalid value '" + text + "'");
      }
      return value;
    };
    for (const std::size_t c : x_cols) xs.push_back(parse(c));
    const double a = parse(a_col);
    if (a != 0.0 && a != 1.0) {
      throw DataError(where(source_name, line_no, "a") + ": treatment must be 0 or 1, got '" +
                      trim(fields[a_col]) + "'");
    }
    as.push_back(a);
    ys.push_back(parse(y_col));
    if (has_oracle) {
      for (int j = 0; j < 4; ++j) oracle_values[j].push_back(parse(*oracle_cols[j]));
    }
    row_lines.push_back(line_no);
    ++rows;
  }
  if (rows == 0) throw DataError(source_name + ": no data rows");

  Dataset data;
  const auto n = static_cast<Eigen::Index>(rows);
  const auto d = static_cast<Eigen::Index>(n_x);
  data.x.resize(n, d);
  data.a.resize(n);
  data.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < d; ++k) data.x(i, k) = xs[static_cast<std::size_t>(i * d + k)];
    data.a[i] = static_cast<int>(as[static_cast<std::size_t>(i)]);
    data.y[i] = ys[static_cast<std::size_t>(i)];
  }
  if (has_oracle) {
    auto column = [&](int j) { return Eigen::Map<const Vector>(oracle_values[j].data(), n).eval(); };
    OracleColumns o{column(0), column(1), column(2), column(3)};
    for (Eigen::Index i = 0; i < n; ++i) {
      const std::size_t line_of_row = row_lines[static_cast<std::size_t>(i)];
      if (!(o.e[i] > 0.0 && o.e[i] < 1.0)) {
        throw DataError(where(source_name, line_of_row, "e") + ": propensity must lie in (0, 1)");
      }
      const double diff = o.mu1[i] - o.mu0[i];
      if (std::abs(o.cate[i] - diff) > 1e-9 * std::max(1.0, std::abs(diff))) {
        throw DataError(where(source_name, line_of_row, "cate") + ": cate differs from mu_1 - mu_0");
      }
      o.cate[i] = diff;
    }
    data.oracle = std::move(o);
  }
  data.validate();
  return data;
}

Dataset ingest_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return read_dataset_csv(in, path);
}

}  // namespace causalsel
