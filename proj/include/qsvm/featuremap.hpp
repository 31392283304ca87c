#pragma once

#include <Eigen/Core>

#include "qsvm/statevector.hpp"

namespace qsvm {

/// Width (one qubit per feature) and repetition count of the ZZ feature map.
struct FeatureMapConfig {
  int n_features = 2;
  int depth = 2;

  void validate() const;
  int n_qubits() const { return n_features; }
  int n_params() const { return 2 * n_features; }
};

/// Single-qubit data angle: pi * x.
double phi_single(double x);

/// Pair data angle: pi * (1 - x_i) * (1 - x_j).
double phi_pair(double xi, double xj);

/// `depth` repetitions of [H on every qubit; RZ(2 phi_single(x_i)) on qubit i;
/// RZZ(2 phi_pair(x_i, x_j)) on every pair i < j in lexicographic order].
///
/// Every feature must lie in [0, 1]; out-of-range values raise DomainError.
Circuit zz_feature_map_circuit(const Eigen::Ref<const Eigen::VectorXd>& x, const FeatureMapConfig& config);

/// Two-layer hardware-efficient ansatz with 2n parameters:
/// RY(theta_i) on qubit i, a CX entangling ring, then RY(theta_{n+i}) on qubit i.
///
/// The ring is i -> (i + 1) mod n for n >= 3, a single CX(0, 1) for n = 2 and
/// empty for n = 1.
Circuit ansatz_circuit(const Eigen::Ref<const Eigen::VectorXd>& params, int n_qubits);

/// Ansatz followed by the feature map.
Circuit embedding_circuit(const Eigen::Ref<const Eigen::VectorXd>& x,
                          const Eigen::Ref<const Eigen::VectorXd>& params, const FeatureMapConfig& config);

/// The embedded state U_phi(x) V_theta |0...0>.
StateVector embed(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& params,
                  const FeatureMapConfig& config);

}  // namespace qsvm
