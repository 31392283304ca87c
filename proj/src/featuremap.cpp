#include "qsvm/featuremap.hpp"

#include <cmath>
#include <numbers>

#include "qsvm/errors.hpp"

namespace qsvm {

void FeatureMapConfig::validate() const {
  if (n_features < 1 || n_features > kMaxQubits)
    throw SizeError("feature count " + std::to_string(n_features) + " outside [1, " +
                    std::to_string(kMaxQubits) + "]");
  if (depth < 1) throw SizeError("feature map depth must be at least 1");
}

double phi_single(double x) { return std::numbers::pi * x; }

double phi_pair(double xi, double xj) { return std::numbers::pi * ((1.0 - xi) * (1.0 - xj)); }

Circuit zz_feature_map_circuit(const Eigen::Ref<const Eigen::VectorXd>& x, const FeatureMapConfig& config) {
  config.validate();
  const int n = config.n_features;
  if (x.size() != n)
    throw ShapeError("data point has " + std::to_string(x.size()) + " features, feature map expects " +
                     std::to_string(n));
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x[i] >= 0.0 && x[i] <= 1.0))
      throw DomainError("feature " + std::to_string(i) + " = " + std::to_string(x[i]) + " outside [0, 1]");
  }

  Circuit block(n);
  for (int q = 0; q < n; ++q) block.append(Gate::h(q));
  for (int q = 0; q < n; ++q) block.append(Gate::rz(q, 2.0 * phi_single(x[q])));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) block.append(Gate::rzz(i, j, 2.0 * phi_pair(x[i], x[j])));

  Circuit circuit(n);
  for (int r = 0; r < config.depth; ++r) circuit.append(block);
  return circuit;
}

Circuit ansatz_circuit(const Eigen::Ref<const Eigen::VectorXd>& params, int n_qubits) {
  Circuit circuit(n_qubits);
  if (params.size() != 2 * n_qubits)
    throw ShapeError("ansatz on " + std::to_string(n_qubits) + " qubits takes " + std::to_string(2 * n_qubits) +
                     " parameters, got " + std::to_string(params.size()));
  for (int q = 0; q < n_qubits; ++q) circuit.append(Gate::ry(q, params[q]));
  if (n_qubits == 2) {
    circuit.append(Gate::cx(0, 1));
  } else if (n_qubits > 2) {
    for (int q = 0; q < n_qubits; ++q) circuit.append(Gate::cx(q, (q + 1) % n_qubits));
  }
  for (int q = 0; q < n_qubits; ++q) circuit.append(Gate::ry(q, params[n_qubits + q]));
  return circuit;
}

Circuit embedding_circuit(const Eigen::Ref<const Eigen::VectorXd>& x,
                          const Eigen::Ref<const Eigen::VectorXd>& params, const FeatureMapConfig& config) {
  Circuit circuit = ansatz_circuit(params, config.n_qubits());
  circuit.append(zz_feature_map_circuit(x, config));
  return circuit;
}

StateVector embed(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& params,
                  const FeatureMapConfig& config) {
  return apply_circuit(zero_state(config.n_qubits()), embedding_circuit(x, params, config));
}

}  // namespace qsvm
