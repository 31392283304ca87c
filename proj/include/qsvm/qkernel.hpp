#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "qsvm/featuremap.hpp"
#include "qsvm/statevector.hpp"

namespace qsvm {

/// Symmetric Gram matrix (or rectangular cross-kernel block).
using KernelMatrix = Eigen::MatrixXd;

/// Entries are exact state fidelities.
struct ExactKernel {};

/// Entries are compute-uncompute all-zeros frequencies over `shots` samples.
struct ShotKernel {
  long shots = 8192;
  std::uint64_t seed = 0;
};

using KernelMode = std::variant<ExactKernel, ShotKernel>;

inline bool is_exact(const KernelMode& mode) { return std::holds_alternative<ExactKernel>(mode); }

/// Seed of the sampling stream for Gram entry (i, j); independent of worker count.
std::uint64_t entry_seed(std::uint64_t seed, std::size_t i, std::size_t j);

/// Quantum kernel |<phi(x_i)|phi(x_j)>|^2.
///
/// Exact mode computes the fidelity of the two embeddings. Shot mode prepares
/// V^dag U^dag(x_j) U(x_i) V |0> and samples its all-zeros outcome with the
/// mode's seed.
double kernel_entry(const Eigen::Ref<const Eigen::VectorXd>& xi, const Eigen::Ref<const Eigen::VectorXd>& xj,
                    const Eigen::Ref<const Eigen::VectorXd>& params, const FeatureMapConfig& config,
                    const KernelMode& mode);

/// Gram matrix over the rows of X. Each point is embedded once; only the upper
/// triangle is evaluated and mirrored, and the diagonal is set to 1. In shot
/// mode entry (i, j) samples with entry_seed(mode.seed, i, j), so the output
/// does not depend on `workers`.
KernelMatrix gram_matrix(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::Ref<const Eigen::VectorXd>& params,
                         const FeatureMapConfig& config, const KernelMode& mode, int workers = 1);

/// Rectangular kernel block: entry (t, s) = kernel(X_test[t], X_train[s]).
/// Shot mode samples entry (t, s) with entry_seed(mode.seed, t, s).
KernelMatrix cross_gram(const Eigen::Ref<const Eigen::MatrixXd>& X_test, const Eigen::Ref<const Eigen::MatrixXd>& X_train,
                        const Eigen::Ref<const Eigen::VectorXd>& params, const FeatureMapConfig& config,
                        const KernelMode& mode, int workers = 1);

/// Embeds every row of X.
std::vector<StateVector> embed_all(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                   const Eigen::Ref<const Eigen::VectorXd>& params, const FeatureMapConfig& config);

}  // namespace qsvm
