#pragma once

#include <iosfwd>
#include <string>

#include "causalsel/dataset.hpp"

namespace causalsel {

// Header `x_0,...,x_{d-1},a,y[,mu_0,mu_1,e,cate]`, doubles with 17
// significant digits so that a write/read round trip is bit-identical.
// The noise level is not stored.
void write_dataset_csv(std::ostream& out, const Dataset& data);
// Throws IoError when the file cannot be written.
void write_dataset_csv(const std::string& path, const Dataset& data);

// Columns may come in any order. x_k columns must be numbered 0..d-1; the
// four oracle columns are all present or all absent. Throws DataError naming
// the offending column and line for a missing mandatory column, a non-binary
// `a`, or an unparsable or non-finite value.
Dataset read_dataset_csv(std::istream& in, const std::string& source_name = "<stream>");
// Throws IoError when the file cannot be opened.
Dataset ingest_csv(const std::string& path);

// 17 significant digits, '.' decimal separator.
std::string format_csv_double(double value);

}  // namespace causalsel
