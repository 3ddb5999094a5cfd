#include "heavycomb/simulation.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include "heavycomb/pareto_sum.hpp"
#include "heavycomb/rare_event.hpp"
#include "heavycomb/rng.hpp"

namespace heavycomb {

SignalSpec SignalSpec::sparse_weak(int n, int s) {
  if (s < 1) return null(n);
  return {n, s, std::sqrt(4.0 * std::log(static_cast<double>(n))) / std::pow(static_cast<double>(s), 0.1)};
}

SignalSpec SignalSpec::calibrated(int n, double beta, double tau) {
  const int s = std::max(1, static_cast<int>(std::lround(std::pow(static_cast<double>(n), 1.0 - beta))));
  return {n, std::min(s, n), std::sqrt(2.0 * tau * std::log(static_cast<double>(n)))};
}

void SignalSpec::validate() const {
  if (n < 1) throw DomainError("signal: n must be >= 1");
  if (s < 0 || s > n) throw DomainError("signal: s must be in [0, n]");
  if (!(mu0 >= 0.0) || !std::isfinite(mu0)) throw DomainError("signal: mu0 must be >= 0");
}

std::string threshold_kind_name(ThresholdKind k) {
  return k == ThresholdKind::Analytic ? "Analytic" : "EmpiricalCorrected";
}

ThresholdKind parse_threshold_kind(const std::string& s) {
  if (s == "Analytic") return ThresholdKind::Analytic;
  if (s == "EmpiricalCorrected") return ThresholdKind::EmpiricalCorrected;
  throw DomainError("unknown threshold kind: " + s);
}

double method_score(const TransformSpec& m, std::span<const double> p) {
  double acc = 0.0;
  switch (m.kind) {
    case TransformKind::Fisher:
      for (double v : p) acc -= 2.0 * std::log(v);
      return acc;
    case TransformKind::Stouffer:
      for (double v : p) acc += std::sqrt(2.0) * boost::math::erfc_inv(2.0 * v);
      return acc;
    case TransformKind::MinP:
      return -std::log(*std::min_element(p.begin(), p.end()));
    case TransformKind::BoxCox:
      if (m.eta == 1.0) {
        for (double v : p) acc += 1.0 / v;
      } else {
        for (double v : p) acc += std::exp(-m.eta * std::log(v));
      }
      return acc;
    case TransformKind::Cauchy:
      for (double v : p) acc += cauchy_upper_quantile(v);
      return acc;
    case TransformKind::TruncCauchy:
      for (double v : p) acc += trunc_cauchy_draw(v, m.delta);
      return acc;
    case TransformKind::InvGamma:
    case TransformKind::LogGamma:
      for (double v : p) acc += transform(m, v);
      return acc;
    case TransformKind::HigherCriticism:
    case TransformKind::BerkJones: {
      const std::vector<double> tmp(p.begin(), p.end());
      return m.kind == TransformKind::HigherCriticism ? hc_statistic(tmp) : bj_statistic(tmp);
    }
  }
  return acc;
}

namespace {

// Solves IS(t) = alpha for the truncated-Cauchy sum with one proposal and
// common random numbers, so the estimate is nonincreasing in t.
double trunc_cauchy_is_threshold(int n, double delta, double alpha, std::uint64_t seed) {
  const double guess = n * cauchy_upper_quantile(alpha);
  const ProposalParams q = ce_optimize(n, delta, guess, 20'000, seed);
  auto excess = [&](double t) { return is_estimate(n, delta, t, q, 200'000).p_hat - alpha; };
  double lo = 0.5 * guess, hi = 2.0 * guess;
  for (int i = 0; i < 60 && excess(lo) < 0.0; ++i) lo *= 0.5;
  for (int i = 0; i < 60 && excess(hi) > 0.0; ++i) hi *= 2.0;
  for (int i = 0; i < 60 && hi - lo > 1e-9 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> rates_for(const std::vector<double>& scores, double threshold) {
  std::int64_t hits = 0;
  for (double s : scores) hits += s > threshold;
  const double r = static_cast<double>(hits) / scores.size();
  return {r, std::sqrt(r * (1.0 - r) / scores.size())};
}

}  // namespace

double analytic_threshold(const TransformSpec& m, int n, double alpha, const SimOptions& opts, std::uint64_t seed) {
  m.validate();
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("threshold: alpha must be in (0,1)");
  if (n < 1) throw DomainError("threshold: n must be >= 1");
  const double dn = n;
  switch (m.kind) {
    case TransformKind::Fisher:
      return 2.0 * boost::math::gamma_q_inv(dn, alpha);
    case TransformKind::Stouffer:
      return std::sqrt(dn) * std::sqrt(2.0) * boost::math::erfc_inv(2.0 * alpha);
    case TransformKind::MinP:
      return -std::log(-std::expm1(std::log1p(-alpha) / dn));
    case TransformKind::BoxCox:
      if (opts.box_cox_null == HarmonicNull::Exact) return box_cox_sum_quantile(m.eta, n, alpha);
      return transform(m, alpha / dn);
    case TransformKind::Cauchy:
      return dn * cauchy_upper_quantile(alpha);
    case TransformKind::TruncCauchy:
      if (alpha < 5e-3 || n >= 25) return gclt_threshold(gclt_centering(n, m.delta), alpha);
      return trunc_cauchy_is_threshold(n, m.delta, alpha, seed);
    case TransformKind::InvGamma:
    case TransformKind::LogGamma:
      return transform(m, alpha / dn);
    case TransformKind::HigherCriticism:
    case TransformKind::BerkJones:
      return cached_empirical_null(m.kind, n, opts.empirical_reps, seed).upper_quantile(alpha);
  }
  return 0.0;
}

std::vector<std::vector<double>> simulate_scores(const std::vector<TransformSpec>& methods,
                                                 const CorrelationModel& model, const SignalSpec& signal,
                                                 std::int64_t reps, std::uint64_t seed, Stream stream,
                                                 const Exec& exec) {
  signal.validate();
  for (const auto& m : methods) m.validate();
  if (reps < 1) throw DomainError("simulate: reps must be >= 1");
  const int n = signal.n;
  const ZSampler sampler(model, n);
  std::vector<std::vector<double>> out(methods.size(), std::vector<double>(reps));
  constexpr double kPMax = 1.0 - 0x1.0p-53;

  for_each_chunk(reps, exec, [&](std::int64_t c, std::int64_t b, std::int64_t e) {
    Rng rng = make_rng(seed, stream, static_cast<std::uint64_t>(c));
    std::vector<double> z(n), p(n);
    for (std::int64_t r = b; r < e; ++r) {
      sampler.sample(rng, z);
      for (int i = 0; i < signal.s; ++i) {
        const bool flip = signal.sign == SignPattern::Alternating && (i % 2 == 1);
        z[i] += flip ? -signal.mu0 : signal.mu0;
      }
      for (int i = 0; i < n; ++i) p[i] = std::clamp(z_to_p(z[i]), std::numeric_limits<double>::min(), kPMax);
      for (std::size_t k = 0; k < methods.size(); ++k) out[k][r] = method_score(methods[k], p);
    }
  });
  return out;
}

double empirical_upper_quantile(std::vector<double> values, double alpha) {
  if (values.empty()) throw DomainError("empirical quantile: no values");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("empirical quantile: alpha must be in (0,1)");
  const auto m = static_cast<double>(values.size());
  auto idx = static_cast<std::size_t>(std::ceil((1.0 - alpha) * m)) - 1;
  idx = std::min(idx, values.size() - 1);
  std::nth_element(values.begin(), values.begin() + idx, values.end());
  return values[idx];
}

SimReport type1_table(const std::vector<TransformSpec>& methods, const CorrelationModel& model, int n,
                      const std::vector<double>& alphas, std::int64_t reps, std::uint64_t seed,
                      const SimOptions& opts) {
  SimReport rep = power_table(methods, model, SignalSpec::null(n), alphas, reps, false, seed, opts);
  rep.experiment = "type1";
  return rep;
}

double corrected_threshold(const TransformSpec& method, const CorrelationModel& model, int n, double alpha,
                           std::int64_t reps, std::uint64_t seed, const SimOptions& opts) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("corrected_threshold: alpha must be in (0,1)");
  if (static_cast<double>(reps) * alpha < 100.0) throw DomainError("corrected_threshold: need reps * alpha >= 100");
  auto scores = simulate_scores({method}, model, SignalSpec::null(n), reps, seed, Stream::Threshold, opts.exec);
  return empirical_upper_quantile(std::move(scores[0]), alpha);
}

SimReport power_table(const std::vector<TransformSpec>& methods, const CorrelationModel& model,
                      const SignalSpec& signal, const std::vector<double>& alphas, std::int64_t reps, bool corrected,
                      std::uint64_t seed, const SimOptions& opts) {
  if (alphas.empty()) throw DomainError("power_table: no alpha levels");
  for (double a : alphas) {
    if (!(a > 0.0 && a < 1.0)) throw DomainError("power_table: alpha must be in (0,1)");
    if (corrected && static_cast<double>(opts.null_reps) * a < 100.0) {
      throw DomainError("power_table: corrected thresholds need null_reps * alpha >= 100");
    }
  }
  const int n = signal.n;
  std::vector<std::vector<double>> thresholds(methods.size(), std::vector<double>(alphas.size()));
  if (corrected) {
    const auto null_scores =
        simulate_scores(methods, model, SignalSpec::null(n), opts.null_reps, seed, Stream::Threshold, opts.exec);
    for (std::size_t k = 0; k < methods.size(); ++k) {
      for (std::size_t a = 0; a < alphas.size(); ++a) {
        thresholds[k][a] = empirical_upper_quantile(null_scores[k], alphas[a]);
      }
    }
  } else {
    for (std::size_t k = 0; k < methods.size(); ++k) {
      for (std::size_t a = 0; a < alphas.size(); ++a) {
        thresholds[k][a] = analytic_threshold(methods[k], n, alphas[a], opts, seed);
      }
    }
  }

  const auto scores = simulate_scores(methods, model, signal, reps, seed, Stream::NullStats, opts.exec);
  SimReport report;
  report.experiment = "power";
  report.n = n;
  for (std::size_t k = 0; k < methods.size(); ++k) {
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      const auto rs = rates_for(scores[k], thresholds[k][a]);
      SimCell cell;
      cell.method = methods[k].label();
      cell.model = model.label();
      cell.alpha = alphas[a];
      cell.rejection_rate = rs[0];
      cell.mc_se = rs[1];
      cell.reps = reps;
      cell.seed = seed;
      cell.threshold_used = thresholds[k][a];
      cell.threshold_kind = corrected ? ThresholdKind::EmpiricalCorrected : ThresholdKind::Analytic;
      report.cells.push_back(cell);
    }
  }
  return report;
}

std::vector<RatioPoint> ratio_curve(const TransformSpec& spec, const CorrelationModel& model, int n,
                                    const std::vector<double>& alphas, std::int64_t reps, std::uint64_t seed,
                                    const Exec& exec) {
  if (!is_regularly_varying(spec.kind)) throw DomainError("ratio_curve: spec must be regularly varying");
  if (alphas.empty()) throw DomainError("ratio_curve: no alpha levels");
  const double amin = *std::min_element(alphas.begin(), alphas.end());
  if (static_cast<double>(reps) * amin < 100.0) throw DomainError("ratio_curve: need reps * min(alpha) >= 100");
  auto scores = simulate_scores({spec}, model, SignalSpec::null(n), reps, seed, Stream::Ratio, exec);
  std::vector<double>& t = scores[0];
  for (double a : alphas) {
    if (!(a > 0.0 && a < 1.0)) throw DomainError("ratio_curve: alpha must be in (0,1)");
  }
  const auto order_index = [&](double a) {
    const auto idx = static_cast<std::size_t>(std::ceil((1.0 - a) * static_cast<double>(reps))) - 1;
    return std::min(idx, t.size() - 1);
  };
  // Only the upper tail is needed: select it, then sort that part.
  const double amax = *std::max_element(alphas.begin(), alphas.end());
  const auto first = t.begin() + static_cast<std::ptrdiff_t>(order_index(amax));
  std::nth_element(t.begin(), first, t.end());
  std::sort(first, t.end());
  std::vector<RatioPoint> out;
  for (double a : alphas) {
    const std::size_t idx = order_index(a);
    RatioPoint pt;
    pt.alpha = a;
    pt.t_alpha = t[idx];
    pt.y = n * tail_survival(spec, pt.t_alpha) / a;
    pt.log_y = std::log(pt.y);
    out.push_back(pt);
  }
  return out;
}

std::vector<RatioPoint> ratio_curve_rank_one(const TransformSpec& spec, int n, const std::vector<double>& alphas) {
  if (!is_regularly_varying(spec.kind)) throw DomainError("ratio_curve: spec must be regularly varying");
  std::vector<RatioPoint> out;
  for (double a : alphas) {
    RatioPoint pt;
    pt.alpha = a;
    pt.t_alpha = n * transform(spec, a);
    if (spec.kind == TransformKind::BoxCox) {
      pt.log_y = (1.0 - 1.0 / spec.eta) * std::log(static_cast<double>(n));  // n (n g)^(-1/eta) / alpha
      pt.y = std::exp(pt.log_y);
    } else {
      pt.y = n * tail_survival(spec, pt.t_alpha) / a;
      pt.log_y = std::log(pt.y);
    }
    out.push_back(pt);
  }
  return out;
}

std::vector<InflationCell> inflation_grid(const std::vector<SimReport>& reports) {
  std::map<std::pair<std::string, double>, InflationCell> cells;
  for (const auto& rep : reports) {
    for (const auto& c : rep.cells) {
      auto key = std::make_pair(c.method, c.alpha);
      auto it = cells.find(key);
      if (it == cells.end() || c.rejection_rate > it->second.max_rate) {
        InflationCell ic;
        ic.method = c.method;
        ic.alpha = c.alpha;
        ic.max_rate = c.rejection_rate;
        ic.worst_model = c.model;
        ic.percent_inflation = 100.0 * (c.rejection_rate - c.alpha) / c.alpha;
        cells[key] = ic;
      }
    }
  }
  std::vector<InflationCell> out;
  for (auto& [k, v] : cells) out.push_back(v);
  return out;
}

}  // namespace heavycomb
