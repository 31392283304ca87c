#include "qsvm/spsa.hpp"

#include <cmath>
#include <string>

#include "qsvm/errors.hpp"
#include "qsvm/rng.hpp"

namespace qsvm {

void SpsaConfig::validate() const {
  if (iterations < 0) throw SizeError("SPSA iteration count must be non-negative");
  if (!(a > 0.0) || !(c > 0.0)) throw DomainError("SPSA gains a and c must be positive");
  if (!(alpha > 0.0 && alpha <= 1.0) || !(gamma > 0.0 && gamma <= 1.0))
    throw DomainError("SPSA decay exponents must lie in (0, 1]");
  if (!(stability >= 0.0)) throw DomainError("SPSA stability constant must be non-negative");
}

namespace {

double finite_or_throw(double value, long iteration, const char* where) {
  if (!std::isfinite(value))
    throw ConvergenceError("SPSA aborted: objective is " + std::to_string(value) + " at " + where +
                           " (iteration " + std::to_string(iteration) + ")");
  return value;
}

}  // namespace

AlignmentTrace spsa_maximize(const IterativeObjective& f, const Eigen::VectorXd& theta0, const SpsaConfig& cfg) {
  cfg.validate();
  AlignmentTrace trace;
  trace.values.reserve(static_cast<std::size_t>(cfg.iterations) + 1);
  Eigen::VectorXd theta = theta0;
  Rng rng(cfg.seed);

  trace.initial = finite_or_throw(f(theta, -1), 0, "theta_0");
  trace.values.push_back(trace.initial);
  trace.evaluations = 1;

  Eigen::VectorXd delta(theta.size());
  for (int k = 0; k < cfg.iterations; ++k) {
    const double ak = cfg.a / std::pow(k + 1 + cfg.stability, cfg.alpha);
    const double ck = cfg.c / std::pow(k + 1, cfg.gamma);
    for (Eigen::Index i = 0; i < delta.size(); ++i) delta[i] = rng.rademacher();

    const double f_plus = finite_or_throw(f(theta + ck * delta, k), k, "theta + c_k delta");
    const double f_minus = finite_or_throw(f(theta - ck * delta, k), k, "theta - c_k delta");
    trace.evaluations += 2;
    if (k > 0) trace.values.push_back(0.5 * (f_plus + f_minus));

    // delta_i is +-1, so dividing by it equals multiplying by it.
    theta += ak * ((f_plus - f_minus) / (2.0 * ck)) * delta;
  }

  if (cfg.iterations > 0) {
    trace.final = finite_or_throw(f(theta, -1), cfg.iterations, "theta_final");
    trace.values.push_back(trace.final);
    ++trace.evaluations;
  } else {
    trace.final = trace.initial;
  }
  trace.theta = std::move(theta);
  return trace;
}

AlignmentTrace spsa_maximize(const Objective& f, const Eigen::VectorXd& theta0, const SpsaConfig& cfg) {
  return spsa_maximize(IterativeObjective([&f](const Eigen::VectorXd& theta, long) { return f(theta); }), theta0,
                       cfg);
}

}  // namespace qsvm
