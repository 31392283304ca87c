#include "qsvm/statevector.hpp"

#include <cmath>
#include <sstream>

#include "qsvm/errors.hpp"
#include "qsvm/rng.hpp"

namespace qsvm {

std::string_view to_string(GateKind kind) {
  switch (kind) {
    case GateKind::H:
      return "H";
    case GateKind::RY:
      return "RY";
    case GateKind::RZ:
      return "RZ";
    case GateKind::RZZ:
      return "RZZ";
    case GateKind::CX:
      return "CX";
  }
  return "?";
}

Gate Gate::adjoint() const {
  Gate g = *this;
  if (has_angle()) g.angle = -angle;
  return g;
}

Circuit::Circuit(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits)
    throw SizeError("circuit width " + std::to_string(n_qubits) + " outside [1, " +
                    std::to_string(kMaxQubits) + "]");
}

Circuit& Circuit::append(const Gate& gate) {
  const int arity = gate.arity();
  for (int t = 0; t < arity; ++t) {
    const int q = gate.targets[t];
    if (q < 0 || q >= n_qubits_)
      throw IndexError(std::string(to_string(gate.kind)) + " target " + std::to_string(q) +
                       " out of range for " + std::to_string(n_qubits_) + " qubits");
  }
  if (arity == 2 && gate.targets[0] == gate.targets[1])
    throw IndexError(std::string(to_string(gate.kind)) + " targets must be distinct");
  gates_.push_back(gate);
  return *this;
}

Circuit& Circuit::append(const Circuit& other) {
  if (other.n_qubits_ != n_qubits_)
    throw ShapeError("cannot append a " + std::to_string(other.n_qubits_) + "-qubit circuit to a " +
                     std::to_string(n_qubits_) + "-qubit circuit");
  gates_.insert(gates_.end(), other.gates_.begin(), other.gates_.end());
  return *this;
}

Circuit adjoint(const Circuit& circuit) {
  Circuit out(circuit.n_qubits());
  const auto& gates = circuit.gates();
  for (auto it = gates.rbegin(); it != gates.rend(); ++it) out.append(it->adjoint());
  return out;
}

std::string dump(const Circuit& circuit) {
  std::ostringstream os;
  os.precision(12);
  for (const Gate& g : circuit.gates()) {
    os << to_string(g.kind);
    for (int t = 0; t < g.arity(); ++t) os << ' ' << g.targets[t];
    if (g.has_angle()) os << ' ' << g.angle;
    os << '\n';
  }
  return os.str();
}

StateVector::StateVector(int n_qubits, Amplitudes amplitudes)
    : n_qubits_(n_qubits), amplitudes_(std::move(amplitudes)) {}

StateVector StateVector::from_amplitudes(Amplitudes amplitudes) {
  const Eigen::Index dim = amplitudes.size();
  int n = 0;
  while (n <= kMaxQubits && (Eigen::Index{1} << n) < dim) ++n;
  if (dim < 2 || n > kMaxQubits || (Eigen::Index{1} << n) != dim)
    throw SizeError("amplitude count " + std::to_string(dim) + " is not 2^n for n in [1, 16]");
  if (std::abs(amplitudes.norm() - 1.0) > 1e-10) throw DomainError("amplitudes are not normalized");
  return StateVector(n, std::move(amplitudes));
}

StateVector zero_state(int n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits)
    throw SizeError("qubit count " + std::to_string(n_qubits) + " outside [1, " +
                    std::to_string(kMaxQubits) + "]");
  Amplitudes amps = Amplitudes::Zero(Eigen::Index{1} << n_qubits);
  amps[0] = 1.0;
  return StateVector(n_qubits, std::move(amps));
}

namespace {

// Applies the 2x2 matrix [[m00, m01], [m10, m11]] to qubit q.
void apply_single(Amplitudes& a, int q, Complex m00, Complex m01, Complex m10, Complex m11) {
  const Eigen::Index dim = a.size();
  const Eigen::Index stride = Eigen::Index{1} << q;
  for (Eigen::Index base = 0; base < dim; base += 2 * stride) {
    for (Eigen::Index i = base; i < base + stride; ++i) {
      const Complex v0 = a[i];
      const Complex v1 = a[i + stride];
      a[i] = m00 * v0 + m01 * v1;
      a[i + stride] = m10 * v0 + m11 * v1;
    }
  }
}

}  // namespace

StateVector& StateVector::apply(const Gate& gate) {
  const int arity = gate.arity();
  for (int t = 0; t < arity; ++t) {
    if (gate.targets[t] < 0 || gate.targets[t] >= n_qubits_)
      throw IndexError(std::string(to_string(gate.kind)) + " target " + std::to_string(gate.targets[t]) +
                       " out of range for " + std::to_string(n_qubits_) + " qubits");
  }
  if (arity == 2 && gate.targets[0] == gate.targets[1])
    throw IndexError(std::string(to_string(gate.kind)) + " targets must be distinct");

  Amplitudes& a = amplitudes_;
  const Eigen::Index dim = a.size();
  switch (gate.kind) {
    case GateKind::H: {
      const double s = 1.0 / std::sqrt(2.0);
      apply_single(a, gate.targets[0], s, s, s, -s);
      break;
    }
    case GateKind::RY: {
      const double c = std::cos(gate.angle / 2), s = std::sin(gate.angle / 2);
      apply_single(a, gate.targets[0], c, -s, s, c);
      break;
    }
    case GateKind::RZ: {
      const Complex lo = std::polar(1.0, -gate.angle / 2);
      const Complex hi = std::conj(lo);
      const Eigen::Index mask = Eigen::Index{1} << gate.targets[0];
      for (Eigen::Index i = 0; i < dim; ++i) a[i] *= (i & mask) ? hi : lo;
      break;
    }
    case GateKind::RZZ: {
      // exp(-i theta/2 Z⊗Z): even parity picks up e^{-i theta/2}, odd e^{+i theta/2}.
      const Complex even = std::polar(1.0, -gate.angle / 2);
      const Complex odd = std::conj(even);
      const Eigen::Index ma = Eigen::Index{1} << gate.targets[0];
      const Eigen::Index mb = Eigen::Index{1} << gate.targets[1];
      for (Eigen::Index i = 0; i < dim; ++i) a[i] *= (((i & ma) != 0) != ((i & mb) != 0)) ? odd : even;
      break;
    }
    case GateKind::CX: {
      const Eigen::Index mc = Eigen::Index{1} << gate.targets[0];
      const Eigen::Index mt = Eigen::Index{1} << gate.targets[1];
      for (Eigen::Index i = 0; i < dim; ++i)
        if ((i & mc) && !(i & mt)) std::swap(a[i], a[i | mt]);
      break;
    }
  }
  return *this;
}

StateVector& StateVector::apply(const Circuit& circuit) {
  if (circuit.n_qubits() != n_qubits_)
    throw ShapeError("circuit has " + std::to_string(circuit.n_qubits()) + " qubits, state has " +
                     std::to_string(n_qubits_));
  for (const Gate& g : circuit.gates()) apply(g);
  return *this;
}

StateVector& StateVector::apply_global_phase(double phase) {
  amplitudes_ *= std::polar(1.0, phase);
  return *this;
}

StateVector apply_gate(StateVector state, const Gate& gate) {
  state.apply(gate);
  return state;
}

StateVector apply_circuit(StateVector state, const Circuit& circuit) {
  state.apply(circuit);
  return state;
}

Complex inner_product(const StateVector& a, const StateVector& b) {
  if (a.n_qubits() != b.n_qubits())
    throw ShapeError("inner product of " + std::to_string(a.n_qubits()) + "- and " +
                     std::to_string(b.n_qubits()) + "-qubit states");
  return a.amplitudes().dot(b.amplitudes());  // Eigen's dot conjugates the left operand
}

double fidelity(const StateVector& a, const StateVector& b) { return std::norm(inner_product(a, b)); }

double all_zeros_probability(const StateVector& state) { return std::norm(state[0]); }

long sample_bernoulli_count(double p, long shots, std::uint64_t seed) {
  if (shots < 1) throw SizeError("shot count must be at least 1");
  Rng rng(seed);
  long hits = 0;
  for (long s = 0; s < shots; ++s)
    if (rng.uniform() < p) ++hits;
  return hits;
}

double sample_all_zeros(const StateVector& state, long shots, std::uint64_t seed) {
  const long hits = sample_bernoulli_count(all_zeros_probability(state), shots, seed);
  return static_cast<double>(hits) / static_cast<double>(shots);
}

}  // namespace qsvm
