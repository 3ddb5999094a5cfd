#pragma once

#include <cstdint>

#include "heavycomb/kernels.hpp"

namespace heavycomb {

/// Proposal for T = X_1 + ... + X_n, X_i i.i.d. truncated Cauchy (values
/// above 1-delta in p mapped to nu = tan(pi (delta - 1/2))).
///
/// One index J is chosen uniformly; X_J is drawn from
///   (1 - jump_prob) f + jump_prob g,
/// f the truncated-Cauchy law and g a Lomax jump on [jump_location, inf)
/// with density jump_scale / (x - jump_location + jump_scale)^2. The other
/// coordinates keep f. Averaging over J gives the likelihood ratio
///   1 / ((1 - jump_prob) + jump_prob / n * sum_j g(x_j) / f(x_j)),
/// bounded by 1 / (1 - jump_prob) and positive everywhere.
struct ProposalParams {
  double jump_prob = 0.01;
  double jump_scale = 1.0;
  double jump_location = 0.0;
  std::uint64_t seed = 0;
  int iterations = 0;  // CE iterations used

  bool operator==(const ProposalParams&) const = default;
};

/// Upper limit on jump_prob; keeps the likelihood ratio below 10.
inline constexpr double kMaxJumpProb = 0.9;

struct CeSettings {
  double elite_fraction = 0.1;
  double smoothing = 0.7;
  int max_iterations = 20;
  double tolerance = 0.01;
};

/// Multilevel cross-entropy search for the event {T > t}; `budget` samples
/// per level. Returns the baseline proposal if the event is not rare.
ProposalParams ce_optimize(int n, double delta, double t, std::int64_t budget, std::uint64_t seed,
                           const CeSettings& settings = {}, const Exec& exec = {});

struct TailEstimate {
  double p_hat = 0.0;   // raw estimate
  double se = 0.0;
  double p_clamped = 0.0;  // p_hat pulled into the bracket
  double lower = 0.0;
  double upper = 1.0;
  bool clamped = false;
  bool low_precision = false;  // se / p_hat > 0.2
  std::int64_t samples = 0;
  /// Per-sample variance of the estimator terms, for variance comparisons.
  double sample_variance = 0.0;
};

/// IS estimate of P(T > t) with a fresh substream of `proposal.seed`.
TailEstimate is_estimate(int n, double delta, double t, const ProposalParams& proposal, std::int64_t samples,
                         const Exec& exec = {});

/// Plain Monte Carlo estimate of P(T > t); the oracle for the IS route.
TailEstimate plain_mc_estimate(int n, double delta, double t, std::int64_t samples, std::uint64_t seed,
                               const Exec& exec = {});

/// Among `samples` proposal draws with T > t, the share whose largest term
/// exceeds frac * t (single-big-jump diagnostic). NaN if no draw hits.
double big_jump_share(int n, double delta, double t, const ProposalParams& proposal, std::int64_t samples,
                      double frac);

/// Truncated-Cauchy transform of one uniform draw.
double trunc_cauchy_draw(double u, double delta);

/// Density of the continuous part of the truncated-Cauchy law at x > nu.
double trunc_cauchy_density(double x, double delta);

}  // namespace heavycomb
