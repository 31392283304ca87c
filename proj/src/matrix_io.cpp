#include "qsvm/matrix_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "qsvm/errors.hpp"

namespace qsvm {

std::string format_g12(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

double round_g12(double value) { return std::strtod(format_g12(value).c_str(), nullptr); }

void write_matrix(std::ostream& out, const Eigen::Ref<const Eigen::MatrixXd>& M) {
  if (M.rows() == M.cols())
    out << M.rows() << '\n';
  else
    out << M.rows() << ' ' << M.cols() << '\n';
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    for (Eigen::Index c = 0; c < M.cols(); ++c) out << (c ? " " : "") << format_g12(M(r, c));
    out << '\n';
  }
}

Eigen::MatrixXd read_matrix(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw ParseError("missing matrix header", 1);
  std::istringstream hs(header);
  long rows = -1, cols = -1;
  if (!(hs >> rows) || rows < 0) throw ParseError("bad matrix header", 1);
  if (!(hs >> cols)) cols = rows;
  if (cols < 0) throw ParseError("bad matrix header", 1);

  Eigen::MatrixXd M(rows, cols);
  for (long r = 0; r < rows; ++r) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("missing matrix row", r + 2);
    std::istringstream ls(line);
    for (long c = 0; c < cols; ++c)
      if (!(ls >> M(r, c))) throw ParseError("expected " + std::to_string(cols) + " values", r + 2);
    std::string extra;
    if (ls >> extra) throw ParseError("too many values in row", r + 2);
  }
  return M;
}

}  // namespace qsvm
