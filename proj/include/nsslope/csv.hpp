#pragma once

#include "nsslope/core.hpp"

#include <iosfwd>
#include <string>

namespace nsslope::csv {

// Plain row-major CSV: ',' separator, '.' decimal point, one row per line.

Matrix read_matrix(std::istream& in, bool has_header = false);
Matrix read_matrix_file(const std::string& path, bool has_header = false);

/// Doubles are written with 17 significant digits so they round-trip exactly.
void write_matrix(std::ostream& out, const Eigen::Ref<const Matrix>& m);
void write_matrix_file(const std::string& path, const Eigen::Ref<const Matrix>& m);

std::string format_double(double v);

}  // namespace nsslope::csv
