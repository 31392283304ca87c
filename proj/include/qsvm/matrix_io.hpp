#pragma once

#include <iosfwd>
#include <string>

#include <Eigen/Core>

namespace qsvm {

/// Plain-text matrix: a header line (`N` for square matrices, `R C`
/// otherwise) followed by one line per row of space-separated values with 12
/// significant digits.
void write_matrix(std::ostream& out, const Eigen::Ref<const Eigen::MatrixXd>& M);
Eigen::MatrixXd read_matrix(std::istream& in);

/// Formats a double with 12 significant digits (`%.12g`).
std::string format_g12(double value);

/// Rounds to the value printed by format_g12.
double round_g12(double value);

}  // namespace qsvm
