#include "heavycomb/multiple_testing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "heavycomb/transform.hpp"

namespace heavycomb {

std::vector<double> bh_adjust(const std::vector<double>& pvals) {
  const std::size_t m = pvals.size();
  for (double p : pvals) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("bh_adjust: p-values must lie in [0,1]");
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pvals[a] < pvals[b]; });
  std::vector<double> q(m);
  double running = 1.0;
  for (std::size_t k = m; k-- > 0;) {
    const std::size_t i = order[k];
    running = std::min(running, pvals[i] * static_cast<double>(m) / static_cast<double>(k + 1));
    q[i] = running;
  }
  return q;
}

std::vector<bool> bonferroni(const std::vector<double>& pvals, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("bonferroni: alpha must be in (0,1]");
  std::vector<bool> flags(pvals.size());
  const double cut = alpha / static_cast<double>(pvals.size());
  for (std::size_t i = 0; i < pvals.size(); ++i) flags[i] = pvals[i] <= cut;
  return flags;
}

}  // namespace heavycomb
