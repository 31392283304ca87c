#include "qsvm/qkernel.hpp"

#include "qsvm/errors.hpp"
#include "qsvm/parallel.hpp"
#include "qsvm/rng.hpp"

namespace qsvm {

namespace {

constexpr double kRangeSlack = 1e-9;

double checked(double value) {
  if (value > 1.0 + kRangeSlack || value < -kRangeSlack)
    throw ConsistencyError("kernel entry " + std::to_string(value) + " outside [0, 1]");
  return value;
}

// Uncomputes x_j (and the ansatz) from an embedded x_i and samples all zeros.
double sampled_overlap(StateVector embedded_i, const Eigen::Ref<const Eigen::VectorXd>& xj,
                       const Eigen::Ref<const Eigen::VectorXd>& params, const FeatureMapConfig& config,
                       const ShotKernel& shots, std::uint64_t seed) {
  embedded_i.apply(adjoint(embedding_circuit(xj, params, config)));
  return sample_all_zeros(embedded_i, shots.shots, seed);
}

void check_mode(const KernelMode& mode) {
  if (const auto* s = std::get_if<ShotKernel>(&mode); s && s->shots < 1)
    throw SizeError("shot count must be at least 1");
}

}  // namespace

std::uint64_t entry_seed(std::uint64_t seed, std::size_t i, std::size_t j) { return derive_seed(seed, {i, j}); }

std::vector<StateVector> embed_all(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                   const Eigen::Ref<const Eigen::VectorXd>& params, const FeatureMapConfig& config) {
  std::vector<StateVector> states;
  states.reserve(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) states.push_back(embed(X.row(i).transpose(), params, config));
  return states;
}

double kernel_entry(const Eigen::Ref<const Eigen::VectorXd>& xi, const Eigen::Ref<const Eigen::VectorXd>& xj,
                    const Eigen::Ref<const Eigen::VectorXd>& params, const FeatureMapConfig& config,
                    const KernelMode& mode) {
  check_mode(mode);
  const StateVector ei = embed(xi, params, config);
  if (const auto* s = std::get_if<ShotKernel>(&mode)) return sampled_overlap(ei, xj, params, config, *s, s->seed);
  return checked(fidelity(ei, embed(xj, params, config)));
}

KernelMatrix gram_matrix(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::Ref<const Eigen::VectorXd>& params,
                         const FeatureMapConfig& config, const KernelMode& mode, int workers) {
  if (X.rows() == 0) throw SizeError("Gram matrix of an empty dataset");
  check_mode(mode);
  const auto n = static_cast<std::size_t>(X.rows());
  const std::vector<StateVector> states = embed_all(X, params, config);
  const auto* shots = std::get_if<ShotKernel>(&mode);

  KernelMatrix K(X.rows(), X.rows());
  parallel_for(n, workers, [&](std::size_t i) {
    const auto r = static_cast<Eigen::Index>(i);
    K(r, r) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto c = static_cast<Eigen::Index>(j);
      K(r, c) = shots ? sampled_overlap(states[i], X.row(c).transpose(), params, config, *shots,
                                        entry_seed(shots->seed, i, j))
                      : checked(fidelity(states[i], states[j]));
    }
  });
  for (Eigen::Index r = 0; r < K.rows(); ++r)
    for (Eigen::Index c = 0; c < r; ++c) K(r, c) = K(c, r);
  return K;
}

KernelMatrix cross_gram(const Eigen::Ref<const Eigen::MatrixXd>& X_test, const Eigen::Ref<const Eigen::MatrixXd>& X_train,
                        const Eigen::Ref<const Eigen::VectorXd>& params, const FeatureMapConfig& config,
                        const KernelMode& mode, int workers) {
  if (X_test.rows() == 0 || X_train.rows() == 0) throw SizeError("cross kernel with an empty dataset");
  check_mode(mode);
  const std::vector<StateVector> test_states = embed_all(X_test, params, config);
  const auto* shots = std::get_if<ShotKernel>(&mode);
  std::vector<StateVector> train_states;
  if (!shots) train_states = embed_all(X_train, params, config);

  KernelMatrix K(X_test.rows(), X_train.rows());
  parallel_for(static_cast<std::size_t>(X_test.rows()), workers, [&](std::size_t t) {
    const auto r = static_cast<Eigen::Index>(t);
    for (Eigen::Index s = 0; s < X_train.rows(); ++s) {
      K(r, s) = shots ? sampled_overlap(test_states[t], X_train.row(s).transpose(), params, config, *shots,
                                        entry_seed(shots->seed, t, static_cast<std::size_t>(s)))
                      : checked(fidelity(test_states[t], train_states[static_cast<std::size_t>(s)]));
    }
  });
  return K;
}

}  // namespace qsvm
