#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "heavycomb/transform.hpp"

namespace heavycomb {

enum class Route { Exact, TailApprox, GCLT, ImportanceSampling, Empirical };

std::string route_name(Route r);
Route parse_route(const std::string& name);

struct Bounds {
  double lower = 0.0;
  double upper = 1.0;
  bool operator==(const Bounds&) const = default;
};

struct CombinedResult {
  TransformSpec method;
  int n = 0;
  double statistic = 0.0;
  double combined_p = 1.0;
  Route route = Route::Exact;
  std::optional<Bounds> bounds;
  std::optional<double> std_error;  // IS route only
  /// False when the tail approximation is used outside the range where it
  /// was validated (combined_p > 0.05).
  bool in_validated_range = true;
  /// IS estimate fell outside the bounds and was pulled back in.
  bool clamped_to_bounds = false;
  /// Relative SE above 20% after the IS budget.
  bool low_precision = false;
  /// Factor applied to user weights to reach sum(w) = n; 1 when unweighted.
  double weight_rescale = 1.0;

  bool operator==(const CombinedResult&) const = default;
};

/// Centering of the truncated-Cauchy sum.
///   nu   = tan(pi (delta - 1/2))
///   f1   = int_nu^inf cos(x/n) / (1 + x^2) dx
///   f2   = int_nu^inf sin(x/n) / (1 + x^2) dx
///   theta = atan((delta sin(nu/n) + (1-delta)/pi f2) / (delta cos(nu/n) + (1-delta)/pi f1))
/// so that (T - n^2 theta) / n converges to S(1, 1, 1/2, 0).
struct GcltCentering {
  int n = 0;
  double delta = 0.0;
  double nu_delta = 0.0;
  double f1n = 0.0;
  double f2n = 0.0;
  double theta_n = 0.0;
};

GcltCentering gclt_centering(int n, double delta);

/// P(T > x) under independence by the limit law: S(1,1,1/2,0) survival at
/// (x - n^2 theta_n) / n.
double gclt_survival(const GcltCentering& c, double x);

/// Upper alpha point of T under the limit law.
double gclt_threshold(const GcltCentering& c, double alpha);

/// min(1, n P(U > T)). Requires a regularly varying spec.
double tail_approx_p(const TransformSpec& spec, double T, int n);

/// (sum_{i<m} w_i)^gamma + sum_{i>=m} w_i^gamma.
double weighted_tail_factor(const std::vector<double>& weights, int m, double gamma);

/// Bracket for P(T/n > t), T a sum of n independent truncated-Cauchy
/// transforms: [S_C(t), S_C(t) (1 + delta)^n], S_C the standard Cauchy
/// survival, upper capped at 1. Here t is on the scale of the mean T/n.
Bounds prop4_bounds(double t, int n, double delta);

/// Default for trunc_cauchy_pvalue: just under the 5e-3 switch, so the GCLT
/// route is taken unless a larger level is stated.
inline constexpr double kDefaultAlphaHint = 5e-3 * (1.0 - 1e-12);

struct IsSettings {
  std::uint64_t seed = 20240607;
  std::int64_t ce_budget = 20'000;
  std::int64_t samples = 200'000;
};

CombinedResult trunc_cauchy_pvalue(double T, int n, double delta = 0.01, double alpha_hint = kDefaultAlphaHint,
                                   const IsSettings& is = {});

/// HC+ = max_{i <= max(1, n/2)} sqrt(n) (i/n - p_(i)) / sqrt(p_(i) (1 - p_(i))).
double hc_statistic(const std::vector<double>& pvals);

/// BJ = max over i with p_(i) < i/n of n K(i/n, p_(i)),
/// K(a, b) = a log(a/b) + (1-a) log((1-a)/(1-b)); 0 if no such i.
double bj_statistic(const std::vector<double>& pvals);

/// Null distribution of HC or BJ for a given n under independence, built
/// from `reps` uniform vectors (sorted statistics).
struct EmpiricalNull {
  TransformKind kind;
  int n;
  std::vector<double> sorted_stats;

  /// (1 + #{null >= stat}) / (1 + reps).
  double pvalue(double stat) const;
  double upper_quantile(double alpha) const;
};

EmpiricalNull build_empirical_null(TransformKind kind, int n, std::int64_t reps, std::uint64_t seed);

/// Process-wide cache keyed by (kind, n, reps, seed); thread-safe.
const EmpiricalNull& cached_empirical_null(TransformKind kind, int n, std::int64_t reps, std::uint64_t seed);

enum class HarmonicNull { TailApprox, Exact };

struct CombineOptions {
  std::optional<std::vector<double>> weights;
  /// Box-Cox/HM null: the tail approximation, or the exact independence law.
  HarmonicNull box_cox_null = HarmonicNull::TailApprox;
  double alpha_hint = kDefaultAlphaHint;
  std::int64_t empirical_reps = 100'000;
  std::uint64_t seed = 20240607;
  IsSettings is;
};

/// T = sum w_i g(p_i) and its combined p-value.
CombinedResult combine(const TransformSpec& method, const std::vector<double>& pvals, const CombineOptions& opts = {});

}  // namespace heavycomb
