#pragma once

#include <cmath>
#include <string>

#include <Eigen/Core>

#include "qsvm/errors.hpp"
#include "qsvm/featuremap.hpp"
#include "qsvm/qkernel.hpp"

namespace qsvm {

/// Class labels, +1 or -1 per point.
using LabelVector = Eigen::VectorXd;

/// Throws DomainError unless every entry is exactly +1 or -1.
void validate_labels(const Eigen::Ref<const LabelVector>& y);

/// Ideal kernel y y^T: +1 for same-class pairs, -1 otherwise.
KernelMatrix ideal_kernel(const Eigen::Ref<const LabelVector>& y);

/// <A, B>_F = Tr(A^T B) = sum_ij A_ij B_ij.
template <class DerivedA, class DerivedB>
typename DerivedA::Scalar frobenius_inner(const Eigen::MatrixBase<DerivedA>& A, const Eigen::MatrixBase<DerivedB>& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw ShapeError("Frobenius product of " + std::to_string(A.rows()) + "x" + std::to_string(A.cols()) + " and " +
                     std::to_string(B.rows()) + "x" + std::to_string(B.cols()) + " matrices");
  return A.cwiseProduct(B).sum();
}

/// Kernel target alignment <K, K*>_F / sqrt(<K, K>_F <K*, K*>_F), in [-1, 1].
template <class DerivedK, class DerivedT>
typename DerivedK::Scalar target_alignment(const Eigen::MatrixBase<DerivedK>& K,
                                           const Eigen::MatrixBase<DerivedT>& target) {
  using Scalar = typename DerivedK::Scalar;
  if (K.rows() != K.cols() || target.rows() != target.cols() || K.rows() != target.rows())
    throw ShapeError("alignment needs square matrices of equal size");
  const Scalar kk = frobenius_inner(K, K);
  const Scalar tt = frobenius_inner(target, target);
  if (!(kk > Scalar(0))) throw DegenerateError("alignment of a zero-norm kernel");
  if (!(tt > Scalar(0))) throw DegenerateError("alignment against a zero-norm target");
  return frobenius_inner(K, target) / std::sqrt(kk * tt);
}

/// Alignment of the quantum Gram matrix at `theta` with the ideal kernel of y.
double alignment_objective(const Eigen::Ref<const Eigen::VectorXd>& theta, const Eigen::Ref<const Eigen::MatrixXd>& X,
                           const Eigen::Ref<const LabelVector>& y, const FeatureMapConfig& config,
                           const KernelMode& mode, int workers = 1);

}  // namespace qsvm
