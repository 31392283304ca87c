#pragma once

#include <span>

namespace qsvm {

enum class WilcoxonMethod { Exact, NormalApprox };

struct WilcoxonResult {
  double statistic = 0.0;  // min(W+, W-)
  double w_plus = 0.0;
  double w_minus = 0.0;
  double p_value = 1.0;  // two-sided
  int n_effective = 0;   // pairs with a nonzero difference
  WilcoxonMethod method = WilcoxonMethod::Exact;
};

/// Largest n_effective for which the exact null distribution is used.
inline constexpr int kWilcoxonExactLimit = 25;

/// Wilcoxon matched-pairs signed-rank test on a - b.
///
/// Zero differences are dropped and tied |d| receive mid-ranks. For
/// n_effective <= 25 the p-value is exact: the null distribution of W+ over
/// all 2^n sign assignments of the observed ranks (ties included). Otherwise a
/// normal approximation with tie and continuity corrections is used.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

struct Summary {
  double mean = 0.0;
  double sd = 0.0;  // N - 1 denominator
};

double mean(std::span<const double> values);

/// Mean and sample standard deviation; needs at least two values.
Summary summarize(std::span<const double> values);

}  // namespace qsvm
