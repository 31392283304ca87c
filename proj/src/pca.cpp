#include "qsvm/pca.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "qsvm/errors.hpp"

namespace qsvm {

SymmetricEigen jacobi_eigen(const Eigen::Ref<const Eigen::MatrixXd>& A, double tolerance, int max_sweeps) {
  if (A.rows() != A.cols()) throw ShapeError("eigendecomposition needs a square matrix");
  const Eigen::Index n = A.rows();
  Eigen::MatrixXd a = 0.5 * (A + A.transpose());
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double scale = std::max(a.norm(), std::numeric_limits<double>::min());

  auto off_norm = [&] {
    double s = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) s += 2.0 * a(p, q) * a(p, q);
    return std::sqrt(s);
  };

  int sweep = 0;
  for (; sweep < max_sweeps && off_norm() > tolerance * scale; ++sweep) {
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        // Rotation angle zeroing a(p, q) (Golub & Van Loan, symmetric Schur).
        const double tau = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (off_norm() > tolerance * scale)
    throw ConvergenceError("Jacobi eigensolver did not converge in " + std::to_string(max_sweeps) + " sweeps");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index l, Eigen::Index r) { return a(l, l) > a(r, r); });

  SymmetricEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  out.sweeps = sweep;
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values[k] = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]);
    out.vectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

PcaModel pca_fit(const Eigen::Ref<const Eigen::MatrixXd>& X, int k) {
  if (X.rows() < 2) throw SizeError("PCA needs at least two samples");
  if (k < 1 || k > X.cols())
    throw ShapeError("PCA target dimension " + std::to_string(k) + " outside [1, " + std::to_string(X.cols()) + "]");

  PcaModel model;
  model.mean = X.colwise().mean().transpose();
  const Eigen::MatrixXd centered = X.rowwise() - model.mean.transpose();
  const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(X.rows() - 1);
  const SymmetricEigen eig = jacobi_eigen(cov);

  model.components.resize(k, X.cols());
  model.explained_variance = eig.values.head(k);
  for (int c = 0; c < k; ++c) {
    Eigen::VectorXd dir = eig.vectors.col(c);
    Eigen::Index largest = 0;
    dir.cwiseAbs().maxCoeff(&largest);
    if (dir[largest] < 0) dir = -dir;
    model.components.row(c) = dir.transpose();
  }
  return model;
}

Eigen::MatrixXd pca_transform(const PcaModel& model, const Eigen::Ref<const Eigen::MatrixXd>& X) {
  if (X.cols() != model.mean.size())
    throw ShapeError("PCA model expects " + std::to_string(model.mean.size()) + " features, got " +
                     std::to_string(X.cols()));
  return (X.rowwise() - model.mean.transpose()) * model.components.transpose();
}

}  // namespace qsvm
