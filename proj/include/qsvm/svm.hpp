#pragma once

#include <iosfwd>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "qsvm/alignment.hpp"

namespace qsvm {

/// Kernel supplied by the caller as a Gram matrix (quantum kernels).
struct PrecomputedKernel {
  friend bool operator==(const PrecomputedKernel&, const PrecomputedKernel&) = default;
};

/// exp(-gamma ||x - x'||^2) evaluated from stored support vectors.
struct RbfKernel {
  double gamma = 1.0;
  friend bool operator==(const RbfKernel&, const RbfKernel&) = default;
};

using KernelSpec = std::variant<PrecomputedKernel, RbfKernel>;

struct SmoOptions {
  double tolerance = 1e-3;  // stop when the maximal KKT violation is at most this
  long max_passes = 10000;  // one pass = N working-pair updates
};

/// Soft-margin SVM in dual form. The decision function is
/// f(x) = sum_s dual_coefs[s] K(x, x_{support[s]}) + bias.
struct SvmModel {
  KernelSpec kernel;
  double C = 1.0;
  std::vector<long> support;       // indices into the training set
  Eigen::VectorXd dual_coefs;      // alpha_s * y_s for each support vector
  double bias = 0.0;
  Eigen::MatrixXd support_vectors; // feature rows of the support set (RBF only)

  // Solver diagnostics, not serialized.
  Eigen::VectorXd alpha;           // full dual vector over the training set
  long iterations = 0;
  double kkt_violation = 0.0;
};

/// 1 / (m sigma^2), sigma^2 the population variance of all entries of X pooled.
double rbf_default_gamma(const Eigen::Ref<const Eigen::MatrixXd>& X);

/// K_ij = exp(-gamma ||a_i - b_j||^2) between the rows of A and B.
KernelMatrix rbf_cross(const Eigen::Ref<const Eigen::MatrixXd>& A, const Eigen::Ref<const Eigen::MatrixXd>& B,
                       double gamma);

/// RBF Gram matrix over the rows of X.
KernelMatrix rbf_gram(const Eigen::Ref<const Eigen::MatrixXd>& X, double gamma);

/// Dual objective sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij.
double dual_objective(const Eigen::Ref<const Eigen::VectorXd>& alpha, const Eigen::Ref<const LabelVector>& y,
                      const Eigen::Ref<const KernelMatrix>& K);

/// Trains on a precomputed Gram matrix by SMO with maximal-violating-pair
/// working-set selection.
SvmModel train(const Eigen::Ref<const KernelMatrix>& K, const Eigen::Ref<const LabelVector>& y, double C,
               const SmoOptions& options = {});

/// Trains an RBF model on feature rows; keeps the support vectors for prediction.
SvmModel train_rbf(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::Ref<const LabelVector>& y, double gamma,
                   double C, const SmoOptions& options = {});

/// Picks the support columns out of a test x train kernel block.
KernelMatrix support_columns(const SvmModel& model, const Eigen::Ref<const KernelMatrix>& test_by_train);

/// Decision values from test x support kernel rows.
Eigen::VectorXd decision_function(const SvmModel& model, const Eigen::Ref<const KernelMatrix>& kernel_rows);

/// sign of the decision function; exactly 0 maps to +1.
LabelVector predict(const SvmModel& model, const Eigen::Ref<const KernelMatrix>& kernel_rows);

/// Predicts feature rows with an RBF model.
LabelVector predict_rbf(const SvmModel& model, const Eigen::Ref<const Eigen::MatrixXd>& X);

/// Fraction of matching labels.
double accuracy(const Eigen::Ref<const LabelVector>& predicted, const Eigen::Ref<const LabelVector>& actual);

/// Plain-text model record (12 significant digits).
void write_model(std::ostream& os, const SvmModel& model);
SvmModel read_model(std::istream& is);

}  // namespace qsvm
