#include "nsslope/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <vector>

namespace nsslope::csv {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

double parse_field(std::string_view field, std::size_t line_no) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double v = 0.0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (field.empty() || ec != std::errc{} || ptr != last) {
    throw ParseError("csv: line " + std::to_string(line_no) + ": cannot parse '" +
                     std::string(field) + "' as a number");
  }
  return v;
}

}  // namespace

Matrix read_matrix(std::istream& in, bool has_header) {
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
      line.erase(0, 3);
    }
    if (trim(line).empty()) continue;
    if (has_header && rows == 0 && cols == 0 && values.empty()) {
      has_header = false;
      continue;
    }
    std::size_t count = 0;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      values.push_back(parse_field(rest.substr(0, comma), line_no));
      ++count;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (rows == 0) {
      cols = count;
    } else if (count != cols) {
      throw ParseError("csv: line " + std::to_string(line_no) + ": expected " +
                       std::to_string(cols) + " fields, found " + std::to_string(count));
    }
    ++rows;
  }
  if (rows == 0) throw ParseError("csv: no data rows");

  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = values[r * cols + c];
    }
  }
  require_finite(m, "csv");
  return m;
}

Matrix read_matrix_file(const std::string& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw ParseError("csv: cannot open '" + path + "'");
  return read_matrix(in, has_header);
}

std::string format_double(double v) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(len));
}

void write_matrix(std::ostream& out, const Eigen::Ref<const Matrix>& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << format_double(m(r, c));
    }
    out << '\n';
  }
}

void write_matrix_file(const std::string& path, const Eigen::Ref<const Matrix>& m) {
  std::ofstream out(path);
  if (!out) throw Error("csv: cannot write '" + path + "'");
  write_matrix(out, m);
  if (!out) throw Error("csv: write failed for '" + path + "'");
}

}  // namespace nsslope::csv
