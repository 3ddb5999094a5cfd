#include "heavycomb/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "heavycomb/transform.hpp"

namespace heavycomb {

namespace {

double log_choose(int n, int k) { return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0); }

struct Support {
  int lo;
  int hi;
};

Support hypergeom_support(int N, int K, int n) {
  if (N < 0 || K < 0 || n < 0 || K > N || n > N) throw DomainError("hypergeometric: inconsistent parameters");
  return {std::max(0, n + K - N), std::min(K, n)};
}

std::vector<double> hypergeom_pmf(int N, int K, int n, Support s) {
  const double denom = log_choose(N, n);
  std::vector<double> pmf(s.hi - s.lo + 1);
  for (int k = s.lo; k <= s.hi; ++k) pmf[k - s.lo] = std::exp(log_choose(K, k) + log_choose(N - K, n - k) - denom);
  return pmf;
}

}  // namespace

double fisher_exact_p(int a, int r, int c, int N) {
  const Support s = hypergeom_support(N, c, r);
  if (a < s.lo || a > s.hi) throw DomainError("fisher_exact_p: cell outside the margins' support");
  const auto pmf = hypergeom_pmf(N, c, r, s);
  const double cut = pmf[a - s.lo] * (1.0 + 1e-7);
  double p = 0.0;
  for (double v : pmf) {
    if (v <= cut) p += v;
  }
  return std::min(1.0, p);
}

HypergeometricSampler::HypergeometricSampler(int N, int K, int n) {
  const Support s = hypergeom_support(N, K, n);
  lo_ = s.lo;
  cdf_ = hypergeom_pmf(N, K, n, s);
  for (std::size_t i = 1; i < cdf_.size(); ++i) cdf_[i] += cdf_[i - 1];
  for (double& v : cdf_) v /= cdf_.back();
}

int HypergeometricSampler::operator()(Rng& rng) const {
  const double u = rng.uniform();
  const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
  const auto idx = std::min<std::ptrdiff_t>(it - cdf_.begin(), static_cast<std::ptrdiff_t>(cdf_.size()) - 1);
  return lo_ + static_cast<int>(idx);
}

int hypergeom_sample(Rng& rng, int N, int K, int n) { return HypergeometricSampler(N, K, n)(rng); }

SimReport discrete_study(double p11, const std::vector<double>& alphas, std::int64_t reps, std::uint64_t seed,
                         const DiscreteStudyOptions& opts) {
  if (!(p11 >= 0.0 && p11 < 1.0)) throw DomainError("discrete_study: p11 must be in [0,1)");
  if (reps < 1) throw DomainError("discrete_study: reps must be >= 1");
  if (alphas.empty()) throw DomainError("discrete_study: no alpha levels");
  const int m = opts.margin;
  const int N = 2 * m;
  const int n = opts.tables;

  std::vector<double> p_of_cell(m + 1);
  for (int a = 0; a <= m; ++a) p_of_cell[a] = fisher_exact_p(a, m, m, N);

  const std::vector<TransformSpec> methods{TransformSpec::harmonic_mean(), TransformSpec::cauchy(),
                                           TransformSpec::trunc_cauchy(0.01)};
  const HypergeometricSampler hyper(N, m, m);
  const double p_cap = 1.0 - opts.clamp_epsilon;

  std::vector<std::vector<double>> scores(methods.size(), std::vector<double>(reps));
  for_each_chunk(reps, opts.sim.exec, [&](std::int64_t c, std::int64_t b, std::int64_t e) {
    Rng rng = make_rng(seed, Stream::Discrete, static_cast<std::uint64_t>(c));
    std::vector<double> raw(n), capped(n);
    for (std::int64_t r = b; r < e; ++r) {
      for (int t = 0; t < n; ++t) {
        const int y = hyper(rng);
        int z = 0;
        if (p11 > 0.0) {
          std::binomial_distribution<int> bin(m - y, p11);
          z = bin(rng.engine());
        }
        raw[t] = p_of_cell[y + z];
        capped[t] = std::min(raw[t], p_cap);
      }
      scores[0][r] = method_score(methods[0], capped);
      scores[1][r] = method_score(methods[1], capped);
      scores[2][r] = method_score(methods[2], raw);
    }
  });

  SimReport report;
  report.experiment = "discrete";
  report.n = n;
  for (std::size_t k = 0; k < methods.size(); ++k) {
    for (double a : alphas) {
      const double thr = analytic_threshold(methods[k], n, a, opts.sim, seed);
      std::int64_t hits = 0;
      for (double s : scores[k]) hits += s > thr;
      SimCell cell;
      cell.method = methods[k].label();
      cell.model = "fisher-exact(p11=" + std::to_string(p11) + ")";
      cell.alpha = a;
      cell.rejection_rate = static_cast<double>(hits) / reps;
      cell.mc_se = std::sqrt(cell.rejection_rate * (1.0 - cell.rejection_rate) / reps);
      cell.reps = reps;
      cell.seed = seed;
      cell.threshold_used = thr;
      cell.threshold_kind = ThresholdKind::Analytic;
      report.cells.push_back(cell);
    }
  }
  return report;
}

}  // namespace heavycomb
