#pragma once

#include <Eigen/Dense>
#include <string>

namespace edge {

// Strict numeric CSV: comma separated, '.' decimal, UTF-8, no quoting.
// An optional single header row is skipped. NaN/Inf and ragged rows are
// rejected with line/column diagnostics.
Eigen::MatrixXd read_matrix_csv(const std::string& path);

// Writes with a header row x0,x1,... and full round-trip precision.
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m,
                      const std::string& column_prefix = "c");

}  // namespace edge
