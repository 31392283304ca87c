#pragma once

#include <iosfwd>

#include <Eigen/Core>

namespace qsvm {

/// Eigenpairs of a symmetric matrix, eigenvalues in non-increasing order and
/// eigenvectors as the matching columns.
struct SymmetricEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  int sweeps = 0;
};

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm falls below
/// `tolerance` times the matrix norm.
SymmetricEigen jacobi_eigen(const Eigen::Ref<const Eigen::MatrixXd>& A, double tolerance = 1e-12,
                            int max_sweeps = 100);

struct PcaModel {
  Eigen::VectorXd mean;                // m
  Eigen::MatrixXd components;          // k x m, orthonormal rows
  Eigen::VectorXd explained_variance;  // k, non-increasing
};

/// Top-k principal directions of the sample covariance (N - 1 denominator).
/// Each component is signed so its largest-magnitude entry is non-negative.
PcaModel pca_fit(const Eigen::Ref<const Eigen::MatrixXd>& X, int k);

/// (X - mean) components^T, an N x k matrix.
Eigen::MatrixXd pca_transform(const PcaModel& model, const Eigen::Ref<const Eigen::MatrixXd>& X);

}  // namespace qsvm
