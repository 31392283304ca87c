#include "qsvm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "qsvm/errors.hpp"

namespace qsvm {

namespace {

// Two-sided exact p-value. Ranks are doubled so mid-ranks become integers;
// counts[s] is the number of sign assignments whose positive doubled-rank sum is s.
double exact_p_value(const std::vector<long>& doubled_ranks, long doubled_statistic) {
  const long total = std::accumulate(doubled_ranks.begin(), doubled_ranks.end(), 0L);
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(total) + 1, 0);
  counts[0] = 1;
  long reach = 0;
  for (long r : doubled_ranks) {
    for (long s = reach; s >= 0; --s)
      if (counts[static_cast<std::size_t>(s)]) counts[static_cast<std::size_t>(s + r)] += counts[static_cast<std::size_t>(s)];
    reach += r;
  }
  // The null distribution is symmetric about total/2, so P(min(W+, W-) <= w) = 2 P(W+ <= w).
  std::uint64_t tail = 0;
  for (long s = 0; s <= doubled_statistic; ++s) tail += counts[static_cast<std::size_t>(s)];
  const double assignments = std::ldexp(1.0, static_cast<int>(doubled_ranks.size()));
  return std::min(1.0, 2.0 * static_cast<double>(tail) / assignments);
}

}  // namespace

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw ShapeError("paired samples of lengths " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
  if (a.empty()) throw SizeError("Wilcoxon test on an empty sample");

  std::vector<double> diffs;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (const double d = a[i] - b[i]; d != 0.0) diffs.push_back(d);
  if (diffs.empty()) throw DegenerateError("all paired differences are zero");

  const std::size_t n = diffs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t l, std::size_t r) { return std::abs(diffs[l]) < std::abs(diffs[r]); });

  // Doubled mid-ranks: a tie block occupying ranks first+1..last+1 gets first + last + 2.
  std::vector<long> doubled(n);
  double tie_term = 0.0;
  for (std::size_t first = 0; first < n;) {
    std::size_t last = first;
    while (last + 1 < n && std::abs(diffs[order[last + 1]]) == std::abs(diffs[order[first]])) ++last;
    for (std::size_t k = first; k <= last; ++k) doubled[order[k]] = static_cast<long>(first + last + 2);
    const double t = static_cast<double>(last - first + 1);
    tie_term += t * t * t - t;
    first = last + 1;
  }

  WilcoxonResult result;
  result.n_effective = static_cast<int>(n);
  long doubled_plus = 0, doubled_minus = 0;
  for (std::size_t i = 0; i < n; ++i) (diffs[i] > 0 ? doubled_plus : doubled_minus) += doubled[i];
  result.w_plus = 0.5 * static_cast<double>(doubled_plus);
  result.w_minus = 0.5 * static_cast<double>(doubled_minus);
  result.statistic = std::min(result.w_plus, result.w_minus);

  if (result.n_effective <= kWilcoxonExactLimit) {
    result.method = WilcoxonMethod::Exact;
    result.p_value = exact_p_value(doubled, std::min(doubled_plus, doubled_minus));
  } else {
    result.method = WilcoxonMethod::NormalApprox;
    const double nn = static_cast<double>(n);
    const double mu = nn * (nn + 1.0) / 4.0;
    const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
    const double z = std::min(0.0, result.statistic - mu + 0.5) / std::sqrt(var);
    result.p_value = std::min(1.0, std::erfc(-z / std::sqrt(2.0)));  // 2 * Phi(z), z <= 0
  }
  return result;
}

double mean(std::span<const double> values) {
  if (values.empty()) throw SizeError("mean of an empty sample");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

Summary summarize(std::span<const double> values) {
  if (values.size() < 2) throw SizeError("standard deviation needs at least two values");
  Summary s;
  s.mean = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  return s;
}

}  // namespace qsvm
