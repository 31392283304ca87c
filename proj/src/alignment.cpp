#include "qsvm/alignment.hpp"

namespace qsvm {

void validate_labels(const Eigen::Ref<const LabelVector>& y) {
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y[i] != 1.0 && y[i] != -1.0)
      throw DomainError("label " + std::to_string(i) + " = " + std::to_string(y[i]) + " is not +1 or -1");
}

KernelMatrix ideal_kernel(const Eigen::Ref<const LabelVector>& y) {
  if (y.size() == 0) throw SizeError("ideal kernel of an empty label vector");
  validate_labels(y);
  return y * y.transpose();
}

double alignment_objective(const Eigen::Ref<const Eigen::VectorXd>& theta, const Eigen::Ref<const Eigen::MatrixXd>& X,
                           const Eigen::Ref<const LabelVector>& y, const FeatureMapConfig& config,
                           const KernelMode& mode, int workers) {
  if (X.rows() != y.size())
    throw ShapeError(std::to_string(X.rows()) + " points but " + std::to_string(y.size()) + " labels");
  return target_alignment(gram_matrix(X, theta, config, mode, workers), ideal_kernel(y));
}

}  // namespace qsvm
