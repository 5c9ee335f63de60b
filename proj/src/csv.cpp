#include "edge/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "edge/common.hpp"

namespace edge {

namespace {

bool parse_field(const std::string& field, double& out) {
  const char* begin = field.data();
  const char* end = begin + field.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t' || *(end - 1) == '\r')) --end;
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end && begin != end;
}

}  // namespace

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("csv: cannot open '" + path + "'");

  std::vector<std::vector<double>> rows;
  std::size_t cols = 0;
  std::string line;
  std::size_t line_no = 0;
  bool header_allowed = true;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string field;
    std::size_t col_no = 0;
    bool bad = false;
    std::size_t bad_col = 0;
    while (std::getline(ss, field, ',')) {
      ++col_no;
      double v;
      if (!parse_field(field, v)) {
        bad = true;
        bad_col = col_no;
        break;
      }
      if (!std::isfinite(v)) {
        std::ostringstream msg;
        msg << "csv: non-finite value at " << path << ":" << line_no << ":" << col_no;
        throw InvalidInputError(msg.str());
      }
      row.push_back(v);
    }
    if (bad) {
      if (header_allowed) {  // tolerate one leading header row
        header_allowed = false;
        continue;
      }
      std::ostringstream msg;
      msg << "csv: parse failure at " << path << ":" << line_no << ":" << bad_col;
      throw InvalidInputError(msg.str());
    }
    header_allowed = false;
    if (cols == 0) {
      cols = row.size();
    } else if (row.size() != cols) {
      std::ostringstream msg;
      msg << "csv: ragged row at " << path << ":" << line_no << " (expected " << cols
          << " columns, got " << row.size() << ")";
      throw InvalidInputError(msg.str());
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw EmptyInputError("csv: no data rows in '" + path + "'");

  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return m;
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m,
                      const std::string& column_prefix) {
  std::ofstream out(path);
  if (!out) throw InvalidInputError("csv: cannot write '" + path + "'");
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    out << (c ? "," : "") << column_prefix << c;
  }
  out << "\n";
  out.precision(17);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      out << (c ? "," : "") << m(r, c);
    }
    out << "\n";
  }
}

}  // namespace edge
