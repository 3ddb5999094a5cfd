#pragma once

#include <cstdint>
#include <vector>

#include "heavycomb/rng.hpp"
#include "heavycomb/simulation.hpp"

namespace heavycomb {

/// Two-sided Fisher exact p for the 2x2 table with upper-left cell a, first
/// row total r, first column total c and grand total N: the sum of the
/// hypergeometric probabilities not exceeding P(a) (relative slack 1e-7).
double fisher_exact_p(int a, int r, int c, int N);

/// Draws from Hypergeometric(N, K, n): successes in n draws without
/// replacement from N items of which K are successes. CDF inversion over
/// a precomputed table.
class HypergeometricSampler {
 public:
  HypergeometricSampler(int N, int K, int n);
  int operator()(Rng& rng) const;
  int min_value() const { return lo_; }
  int max_value() const { return lo_ + static_cast<int>(cdf_.size()) - 1; }

 private:
  int lo_;
  std::vector<double> cdf_;
};

int hypergeom_sample(Rng& rng, int N, int K, int n);

/// Study of n = 20 2x2 tables with margins 200/200: Y ~ Hypergeometric(400,
/// 200, 200), Z ~ Binomial(200 - Y, p11), upper-left cell a = Y + Z; each
/// table gives a Fisher exact p, and the 20 are combined by HM, CA and CAtr
/// (delta = 0.01). p = 1 is moved to 1 - clamp_epsilon for HM and CA only.
struct DiscreteStudyOptions {
  int tables = 20;
  int margin = 200;
  double clamp_epsilon = 1e-15;
  SimOptions sim;
};

SimReport discrete_study(double p11, const std::vector<double>& alphas, std::int64_t reps, std::uint64_t seed,
                         const DiscreteStudyOptions& opts = {});

}  // namespace heavycomb
