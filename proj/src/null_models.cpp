#include "heavycomb/null_models.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

#include "heavycomb/pareto_sum.hpp"
#include "heavycomb/rare_event.hpp"

namespace heavycomb {

std::string route_name(Route r) {
  switch (r) {
    case Route::Exact:
      return "Exact";
    case Route::TailApprox:
      return "TailApprox";
    case Route::GCLT:
      return "GCLT";
    case Route::ImportanceSampling:
      return "ImportanceSampling";
    case Route::Empirical:
      return "Empirical";
  }
  return "?";
}

Route parse_route(const std::string& name) {
  for (Route r : {Route::Exact, Route::TailApprox, Route::GCLT, Route::ImportanceSampling, Route::Empirical}) {
    if (route_name(r) == name) return r;
  }
  throw DomainError("unknown route: " + name);
}

double tail_approx_p(const TransformSpec& spec, double T, int n) {
  spec.validate();
  if (!is_regularly_varying(spec.kind)) throw DomainError("tail_approx_p: spec is not regularly varying");
  if (n < 1) throw DomainError("tail_approx_p: n must be >= 1");
  return std::min(1.0, n * tail_survival(spec, T));
}

double weighted_tail_factor(const std::vector<double>& weights, int m, double gamma) {
  const int n = static_cast<int>(weights.size());
  if (m < 0 || m > n) throw DomainError("weighted_tail_factor: m must be in [0, n]");
  if (!(gamma > 0.0)) throw DomainError("weighted_tail_factor: gamma must be positive");
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw DomainError("weighted_tail_factor: weights must be positive");
  }
  const double block = std::accumulate(weights.begin(), weights.begin() + m, 0.0);
  double rest = 0.0;
  for (int i = m; i < n; ++i) rest += std::pow(weights[i], gamma);
  return (m > 0 ? std::pow(block, gamma) : 0.0) + rest;
}

Bounds prop4_bounds(double t, int n, double delta) {
  if (n < 1) throw DomainError("prop4_bounds: n must be >= 1");
  if (!(delta >= 0.0 && delta < 1.0)) throw DomainError("prop4_bounds: delta must be in [0,1)");
  if (std::isnan(t)) throw DomainError("prop4_bounds: t is NaN");
  const double lower = cauchy_survival(t);
  if (t <= 0.0) return {lower, 1.0};  // the upper bound is only shown for t > 0
  const double upper = std::min(1.0, lower * std::exp(n * std::log1p(delta)));
  return {lower, upper};
}

CombinedResult trunc_cauchy_pvalue(double T, int n, double delta, double alpha_hint, const IsSettings& is) {
  if (n < 1) throw DomainError("trunc_cauchy_pvalue: n must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("trunc_cauchy_pvalue: delta must be in (0,1)");
  if (!std::isfinite(T)) throw DomainError("trunc_cauchy_pvalue: statistic must be finite");
  CombinedResult r;
  r.method = TransformSpec::trunc_cauchy(delta);
  r.n = n;
  r.statistic = T;
  const Bounds b = prop4_bounds(T / n, n, delta);
  r.bounds = b;

  double p;
  if (alpha_hint < 5e-3 || n >= 25) {
    r.route = Route::GCLT;
    p = gclt_survival(gclt_centering(n, delta), T);
  } else {
    r.route = Route::ImportanceSampling;
    ProposalParams q;
    q.seed = is.seed;
    if (T > 0.0) q = ce_optimize(n, delta, T, is.ce_budget, is.seed);
    const TailEstimate est = is_estimate(n, delta, T, q, is.samples);
    p = est.p_hat;
    r.std_error = est.se;
    r.low_precision = est.low_precision;
  }
  r.combined_p = std::clamp(p, b.lower, b.upper);
  r.clamped_to_bounds = r.combined_p != p;
  return r;
}

namespace {

// p = 1 is admissible only where g(1) is finite (the truncated Cauchy).
void check_pvals(const std::vector<double>& pvals, bool allow_one) {
  if (pvals.empty()) throw DomainError("combine: need at least one p-value");
  for (double p : pvals) {
    if (!(p > 0.0 && (p < 1.0 || (allow_one && p == 1.0))))
      throw DomainError(allow_one ? "combine: p-values must lie in (0,1]" : "combine: p-values must lie in (0,1)");
  }
}

}  // namespace

CombinedResult combine(const TransformSpec& method, const std::vector<double>& pvals, const CombineOptions& opts) {
  method.validate();
  check_pvals(pvals, method.kind == TransformKind::TruncCauchy);
  const int n = static_cast<int>(pvals.size());
  CombinedResult r;
  r.method = method;
  r.n = n;

  std::vector<double> w(n, 1.0);
  if (opts.weights) {
    const bool weightable = method.kind == TransformKind::BoxCox || method.kind == TransformKind::Cauchy ||
                            method.kind == TransformKind::InvGamma || method.kind == TransformKind::LogGamma;
    if (!weightable) throw DomainError("combine: weights are not supported for " + method.label());
    if (static_cast<int>(opts.weights->size()) != n) throw DomainError("combine: weights length must equal n");
    double total = 0.0;
    for (double v : *opts.weights) {
      if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("combine: weights must be positive");
      total += v;
    }
    r.weight_rescale = n / total;
    for (int i = 0; i < n; ++i) w[i] = (*opts.weights)[i] * r.weight_rescale;
  }

  switch (method.kind) {
    case TransformKind::Fisher: {
      for (double p : pvals) r.statistic += -2.0 * std::log(p);
      r.combined_p = boost::math::gamma_q(static_cast<double>(n), r.statistic / 2.0);
      r.route = Route::Exact;
      break;
    }
    case TransformKind::Stouffer: {
      for (double p : pvals) r.statistic += transform(method, p);
      r.combined_p = 0.5 * std::erfc(r.statistic / std::sqrt(2.0 * n));
      r.route = Route::Exact;
      break;
    }
    case TransformKind::MinP: {
      r.statistic = *std::min_element(pvals.begin(), pvals.end());
      r.combined_p = -std::expm1(n * std::log1p(-r.statistic));
      r.route = Route::Exact;
      break;
    }
    case TransformKind::Cauchy: {
      for (int i = 0; i < n; ++i) r.statistic += w[i] * transform(method, pvals[i]);
      r.combined_p = cauchy_survival(r.statistic / n);
      r.route = Route::Exact;
      break;
    }
    case TransformKind::TruncCauchy: {
      for (double p : pvals) r.statistic += trunc_cauchy_draw(p, method.delta);  // p = 1 maps to nu
      r = trunc_cauchy_pvalue(r.statistic, n, method.delta, opts.alpha_hint, opts.is);
      break;
    }
    case TransformKind::BoxCox:
    case TransformKind::InvGamma:
    case TransformKind::LogGamma: {
      for (int i = 0; i < n; ++i) r.statistic += w[i] * transform(method, pvals[i]);
      if (method.kind == TransformKind::BoxCox && opts.box_cox_null == HarmonicNull::Exact) {
        if (opts.weights) throw DomainError("combine: the exact Box-Cox null is for equal weights");
        r.combined_p = box_cox_sum_survival(method.eta, n, r.statistic);
        r.route = Route::Exact;
      } else {
        const double factor = opts.weights ? weighted_tail_factor(w, 0, tail_index(method)) : n;
        r.combined_p = std::min(1.0, factor * tail_survival(method, r.statistic));
        r.route = Route::TailApprox;
        r.in_validated_range = r.combined_p <= 0.05;
      }
      break;
    }
    case TransformKind::HigherCriticism:
    case TransformKind::BerkJones: {
      r.statistic = method.kind == TransformKind::HigherCriticism ? hc_statistic(pvals) : bj_statistic(pvals);
      r.combined_p = cached_empirical_null(method.kind, n, opts.empirical_reps, opts.seed).pvalue(r.statistic);
      r.route = Route::Empirical;
      break;
    }
  }
  return r;
}

}  // namespace heavycomb
