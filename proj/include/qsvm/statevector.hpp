#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace qsvm {

/// Dense statevector simulator with the gate set used by the embedding circuits.
///
/// Qubit 0 is the least-significant bit of the basis index, so |q1 q0> = |10>
/// is basis index 2.

inline constexpr int kMaxQubits = 16;

using Complex = std::complex<double>;
using Amplitudes = Eigen::VectorXcd;

enum class GateKind { H, RY, RZ, RZZ, CX };

std::string_view to_string(GateKind kind);

/// A single gate. `targets[0]` is the control for CX; RZZ is symmetric.
struct Gate {
  GateKind kind = GateKind::H;
  std::array<int, 2> targets{0, -1};
  double angle = 0.0;

  static Gate h(int q) { return {GateKind::H, {q, -1}, 0.0}; }
  static Gate ry(int q, double theta) { return {GateKind::RY, {q, -1}, theta}; }
  static Gate rz(int q, double theta) { return {GateKind::RZ, {q, -1}, theta}; }
  static Gate rzz(int a, int b, double theta) { return {GateKind::RZZ, {a, b}, theta}; }
  static Gate cx(int control, int target) { return {GateKind::CX, {control, target}, 0.0}; }

  int arity() const { return (kind == GateKind::RZZ || kind == GateKind::CX) ? 2 : 1; }
  bool has_angle() const { return kind == GateKind::RY || kind == GateKind::RZ || kind == GateKind::RZZ; }

  /// The inverse gate (H and CX are self-inverse; rotations negate their angle).
  Gate adjoint() const;

  friend bool operator==(const Gate&, const Gate&) = default;
};

/// Ordered gate list; the first gate acts on the state first.
class Circuit {
 public:
  explicit Circuit(int n_qubits);

  int n_qubits() const { return n_qubits_; }
  std::size_t size() const { return gates_.size(); }
  bool empty() const { return gates_.empty(); }
  const std::vector<Gate>& gates() const { return gates_; }

  /// Appends a gate after checking its targets against n_qubits.
  Circuit& append(const Gate& gate);
  /// Appends every gate of `other`, which must have the same width.
  Circuit& append(const Circuit& other);

  friend bool operator==(const Circuit&, const Circuit&) = default;

 private:
  int n_qubits_;
  std::vector<Gate> gates_;
};

/// Reversed circuit of inverse gates.
Circuit adjoint(const Circuit& circuit);

/// One gate per line: `KIND targets angle`, e.g. `RZZ 0 1 1.57079632679`.
std::string dump(const Circuit& circuit);

class StateVector {
 public:
  /// Wraps explicit amplitudes; the length must be a power of two and the
  /// vector normalized within 1e-10.
  static StateVector from_amplitudes(Amplitudes amplitudes);

  int n_qubits() const { return n_qubits_; }
  Eigen::Index dimension() const { return amplitudes_.size(); }
  const Amplitudes& amplitudes() const { return amplitudes_; }
  Complex operator[](Eigen::Index i) const { return amplitudes_[i]; }

  /// In-place gate application on this (caller-owned) buffer.
  StateVector& apply(const Gate& gate);
  StateVector& apply(const Circuit& circuit);

  /// Multiply every amplitude by e^{i phase}.
  StateVector& apply_global_phase(double phase);

 private:
  friend StateVector zero_state(int n_qubits);
  StateVector(int n_qubits, Amplitudes amplitudes);

  int n_qubits_;
  Amplitudes amplitudes_;
};

/// |0...0> on n_qubits in [1, kMaxQubits].
StateVector zero_state(int n_qubits);

StateVector apply_gate(StateVector state, const Gate& gate);
StateVector apply_circuit(StateVector state, const Circuit& circuit);

/// <a|b>.
Complex inner_product(const StateVector& a, const StateVector& b);

/// |<a|b>|^2.
double fidelity(const StateVector& a, const StateVector& b);

/// |amplitude[0]|^2, the probability of measuring every qubit as 0.
double all_zeros_probability(const StateVector& state);

/// Number of successes in `shots` Bernoulli(p) draws from the stream `seed`.
long sample_bernoulli_count(double p, long shots, std::uint64_t seed);

/// Shot estimate of all_zeros_probability: (all-zero outcomes) / shots.
double sample_all_zeros(const StateVector& state, long shots, std::uint64_t seed);

}  // namespace qsvm
