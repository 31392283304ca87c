#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>

namespace qsvm {

/// Gain schedule a_k = a / (k + 1 + A)^alpha, c_k = c / (k + 1)^gamma.
struct SpsaConfig {
  int iterations = 100;
  double a = 0.1;
  double c = 0.1;
  double alpha = 0.602;
  double gamma = 0.101;
  double stability = 0.0;  // A
  std::uint64_t seed = 0;

  void validate() const;
};

/// Objective values along an SPSA run.
///
/// `values[0]` is f(theta_0) and `values[iterations]` is f(theta_final); the
/// entries in between are the two-sided estimates (f+ + f-)/2 at each iterate.
struct AlignmentTrace {
  double initial = 0.0;  // T_i
  double final = 0.0;    // T_f
  std::vector<double> values;
  Eigen::VectorXd theta;
  long evaluations = 0;
};

/// Objective with the iteration index (-1 for the endpoint evaluations), so
/// callers can vary e.g. a data subsample per iteration.
using IterativeObjective = std::function<double(const Eigen::VectorXd& theta, long iteration)>;
using Objective = std::function<double(const Eigen::VectorXd& theta)>;

/// Maximizes f by simultaneous perturbation stochastic approximation with
/// Rademacher perturbations. Deterministic for a fixed cfg.seed. Non-finite
/// objective values raise ConvergenceError.
AlignmentTrace spsa_maximize(const IterativeObjective& f, const Eigen::VectorXd& theta0, const SpsaConfig& cfg);
AlignmentTrace spsa_maximize(const Objective& f, const Eigen::VectorXd& theta0, const SpsaConfig& cfg);

}  // namespace qsvm
