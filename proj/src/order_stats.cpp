#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "heavycomb/kernels.hpp"
#include "heavycomb/null_models.hpp"
#include "heavycomb/rng.hpp"

namespace heavycomb {

namespace {

std::vector<double> sorted_copy(const std::vector<double>& pvals) {
  if (pvals.empty()) throw DomainError("order statistic: empty input");
  for (double p : pvals) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("order statistic: p-values must lie in (0,1)");
  }
  std::vector<double> s = pvals;
  std::sort(s.begin(), s.end());
  return s;
}

double hc_sorted(const std::vector<double>& s) {
  const int n = static_cast<int>(s.size());
  const int imax = std::max(1, n / 2);
  const double rn = std::sqrt(static_cast<double>(n));
  double best = -HUGE_VAL;
  for (int i = 1; i <= imax; ++i) {
    const double p = s[i - 1];
    best = std::max(best, rn * (static_cast<double>(i) / n - p) / std::sqrt(p * (1.0 - p)));
  }
  return best;
}

// a log(a/b) + (1-a) log((1-a)/(1-b)), with 0 log 0 = 0.
double bernoulli_kl(double a, double b) {
  double k = 0.0;
  if (a > 0.0) k += a * std::log(a / b);
  if (a < 1.0) k += (1.0 - a) * (std::log1p(-a) - std::log1p(-b));
  return k;
}

double bj_sorted(const std::vector<double>& s) {
  const int n = static_cast<int>(s.size());
  double best = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double a = static_cast<double>(i) / n;
    if (s[i - 1] < a) best = std::max(best, n * bernoulli_kl(a, s[i - 1]));
  }
  return best;
}

}  // namespace

double hc_statistic(const std::vector<double>& pvals) { return hc_sorted(sorted_copy(pvals)); }

double bj_statistic(const std::vector<double>& pvals) { return bj_sorted(sorted_copy(pvals)); }

double EmpiricalNull::pvalue(double stat) const {
  const auto ge = sorted_stats.end() - std::lower_bound(sorted_stats.begin(), sorted_stats.end(), stat);
  return (1.0 + static_cast<double>(ge)) / (1.0 + static_cast<double>(sorted_stats.size()));
}

double EmpiricalNull::upper_quantile(double alpha) const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("upper_quantile: alpha must be in (0,1)");
  const auto m = static_cast<double>(sorted_stats.size());
  auto idx = static_cast<std::size_t>(std::ceil((1.0 - alpha) * m)) - 1;
  idx = std::min(idx, sorted_stats.size() - 1);
  return sorted_stats[idx];
}

EmpiricalNull build_empirical_null(TransformKind kind, int n, std::int64_t reps, std::uint64_t seed) {
  if (kind != TransformKind::HigherCriticism && kind != TransformKind::BerkJones) {
    throw DomainError("empirical null: only HC and BJ");
  }
  if (n < 1 || reps < 1) throw DomainError("empirical null: n and reps must be positive");
  EmpiricalNull out{kind, n, std::vector<double>(reps)};
  for_each_chunk(reps, Exec{}, [&](std::int64_t c, std::int64_t b, std::int64_t e) {
    Rng rng = make_rng(seed, Stream::EmpiricalNull, (static_cast<std::uint64_t>(n) << 32) + c);
    std::vector<double> p(n);
    for (std::int64_t r = b; r < e; ++r) {
      for (double& v : p) v = rng.uniform();
      std::sort(p.begin(), p.end());
      out.sorted_stats[r] = kind == TransformKind::HigherCriticism ? hc_sorted(p) : bj_sorted(p);
    }
  });
  std::sort(out.sorted_stats.begin(), out.sorted_stats.end());
  return out;
}

const EmpiricalNull& cached_empirical_null(TransformKind kind, int n, std::int64_t reps, std::uint64_t seed) {
  using Key = std::tuple<int, int, std::int64_t, std::uint64_t>;
  static std::mutex mu;
  static std::map<Key, std::unique_ptr<EmpiricalNull>> cache;
  const Key key{static_cast<int>(kind), n, reps, seed};
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, std::make_unique<EmpiricalNull>(build_empirical_null(kind, n, reps, seed))).first;
  }
  return *it->second;
}

}  // namespace heavycomb
