#include "heavycomb/rare_event.hpp"

#include <boost/math/constants/constants.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "heavycomb/null_models.hpp"
#include "heavycomb/rng.hpp"
#include "heavycomb/transform.hpp"

namespace heavycomb {

namespace {

constexpr double kPi = boost::math::constants::pi<double>();

struct Draw {
  double total;
  double lr;
  double max_component;
};

class ProposalSampler {
 public:
  ProposalSampler(int n, double delta, const ProposalParams& q)
      : n_(n), delta_(delta), nu_(std::tan(kPi * (delta - 0.5))), q_(q), x_(n) {}

  Draw draw(Rng& rng) {
    const int jump_index = std::min(n_ - 1, static_cast<int>(rng.uniform() * n_));
    const bool jump = rng.uniform() < q_.jump_prob;
    double total = 0.0, ratio = 0.0, mx = -HUGE_VAL;
    for (int i = 0; i < n_; ++i) {
      double x;
      if (i == jump_index && jump) {
        x = q_.jump_location - q_.jump_scale + q_.jump_scale / rng.uniform();
      } else {
        x = trunc_cauchy_draw(rng.uniform(), delta_);
      }
      x_[i] = x;
      total += x;
      mx = std::max(mx, x);
    }
    for (int i = 0; i < n_; ++i) ratio += jump_over_null(x_[i]);
    const double lr = 1.0 / ((1.0 - q_.jump_prob) + q_.jump_prob * ratio / n_);
    return {total, lr, mx};
  }

 private:
  // g(x) / f(x); zero on the atom at nu, which g does not charge.
  double jump_over_null(double x) const {
    if (x < q_.jump_location || x == nu_) return 0.0;
    const double d = x - q_.jump_location + q_.jump_scale;
    return (q_.jump_scale / (d * d)) / trunc_cauchy_density(x, delta_);
  }

  int n_;
  double delta_;
  double nu_;
  ProposalParams q_;
  std::vector<double> x_;
};

std::vector<Draw> draw_many(int n, double delta, const ProposalParams& q, std::int64_t samples, Stream stream,
                            std::uint64_t chunk_offset, const Exec& exec) {
  std::vector<Draw> out(samples);
  for_each_chunk(samples, exec, [&](std::int64_t c, std::int64_t b, std::int64_t e) {
    ProposalSampler s(n, delta, q);
    Rng rng = make_rng(q.seed, stream, chunk_offset + static_cast<std::uint64_t>(c));
    for (std::int64_t i = b; i < e; ++i) out[i] = s.draw(rng);
  });
  return out;
}

struct Moments {
  double sum = 0.0;
  double sumsq = 0.0;
};

TailEstimate finish(const std::vector<Moments>& parts, std::int64_t samples, int n, double delta, double t) {
  Moments m;
  for (const auto& p : parts) {  // chunk order: identical for any thread count
    m.sum += p.sum;
    m.sumsq += p.sumsq;
  }
  TailEstimate est;
  est.samples = samples;
  est.p_hat = m.sum / samples;
  est.sample_variance = samples > 1 ? std::max(0.0, (m.sumsq - m.sum * est.p_hat) / (samples - 1)) : 0.0;
  est.se = std::sqrt(est.sample_variance / samples);
  const Bounds b = prop4_bounds(t / n, n, delta);
  est.lower = b.lower;
  est.upper = b.upper;
  est.p_clamped = std::clamp(est.p_hat, b.lower, b.upper);
  est.clamped = est.p_clamped != est.p_hat;
  est.low_precision = !(est.p_hat > 0.0) || est.se / est.p_hat > 0.2;
  return est;
}

// Weighted q-quantile of values (sorted copy with weights).
double weighted_quantile(std::vector<std::pair<double, double>> vw, double q) {
  std::sort(vw.begin(), vw.end());
  double total = 0.0;
  for (const auto& [v, w] : vw) total += w;
  double acc = 0.0;
  for (const auto& [v, w] : vw) {
    acc += w;
    if (acc >= q * total) return v;
  }
  return vw.back().first;
}

// Lomax scale maximizing sum w [log s - 2 log(y + s)], y >= 0.
double lomax_scale_mle(const std::vector<std::pair<double, double>>& yw) {
  auto score = [&](double s) {
    double acc = 0.0;
    for (const auto& [y, w] : yw) acc += w * (1.0 / s - 2.0 / (y + s));
    return acc;  // decreasing in s
  };
  double lo = 1e-8, hi = 1.0;
  for (const auto& [y, w] : yw) hi = std::max(hi, 4.0 * y);
  if (score(lo) <= 0.0) return lo;
  if (score(hi) >= 0.0) return hi;
  for (int i = 0; i < 200 && hi - lo > 1e-10 * hi; ++i) {
    const double mid = std::sqrt(lo * hi);
    (score(mid) > 0.0 ? lo : hi) = mid;
  }
  return std::sqrt(lo * hi);
}

double rel_change(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-12); }

}  // namespace

double trunc_cauchy_draw(double u, double delta) {
  if (u >= 1.0 - delta) return std::tan(kPi * (delta - 0.5));
  return cauchy_upper_quantile(u);
}

double trunc_cauchy_density(double x, double delta) {
  if (x <= std::tan(kPi * (delta - 0.5))) return 0.0;
  return 1.0 / (kPi * (1.0 + x * x));
}

ProposalParams ce_optimize(int n, double delta, double t, std::int64_t budget, std::uint64_t seed,
                           const CeSettings& settings, const Exec& exec) {
  if (n < 1) throw DomainError("ce_optimize: n must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("ce_optimize: delta must be in (0,1)");
  if (!(t > 0.0)) throw DomainError("ce_optimize: t must be positive");
  if (budget < 1000) throw DomainError("ce_optimize: budget must be >= 1000");

  ProposalParams q;
  q.seed = seed;
  const std::int64_t elite_count = std::max<std::int64_t>(1, static_cast<std::int64_t>(settings.elite_fraction * budget));

  for (int iter = 0; iter < settings.max_iterations; ++iter) {
    const auto draws =
        draw_many(n, delta, q, budget, Stream::CrossEntropy, static_cast<std::uint64_t>(iter) << 32, exec);

    std::vector<double> totals(draws.size());
    for (std::size_t i = 0; i < draws.size(); ++i) totals[i] = draws[i].total;
    std::nth_element(totals.begin(), totals.end() - elite_count, totals.end());
    const double level_raw = *(totals.end() - elite_count);
    if (iter == 0 && level_raw >= t) return q;  // {T > t} is not rare
    const double level = std::min(level_raw, t);

    std::vector<std::pair<double, double>> maxima;
    double elite_weight = 0.0;
    for (const auto& d : draws) {
      if (d.total >= level) {
        maxima.emplace_back(d.max_component, d.lr);
        elite_weight += d.lr;
      }
    }
    if (maxima.empty() || !(elite_weight > 0.0) || !std::isfinite(elite_weight)) {
      throw NumericalError("ce_optimize: degenerate elite set");
    }

    // The location MLE of a shifted Lomax is the sample minimum; a low
    // quantile keeps that while ignoring stray two-jump elites. Capped at
    // level/2: jumps drawn from g can never pull the minimum back down, and
    // reaching the level with a largest term below level/2 takes two jumps.
    const double loc_hat = std::min(weighted_quantile(maxima, 0.01), 0.5 * level);
    std::vector<std::pair<double, double>> excess;
    double above = 0.0;
    for (const auto& [m, w] : maxima) {
      if (m >= loc_hat) {
        excess.emplace_back(m - loc_hat, w);
        above += w;
      }
    }
    const double scale_hat = lomax_scale_mle(excess);
    const double prob_hat = std::min(kMaxJumpProb, above / elite_weight);

    ProposalParams next = q;
    next.jump_location = settings.smoothing * loc_hat + (1.0 - settings.smoothing) * q.jump_location;
    next.jump_scale = settings.smoothing * scale_hat + (1.0 - settings.smoothing) * q.jump_scale;
    next.jump_prob = settings.smoothing * prob_hat + (1.0 - settings.smoothing) * q.jump_prob;
    next.iterations = iter + 1;
    const double change = std::max({rel_change(next.jump_location, q.jump_location),
                                     rel_change(next.jump_scale, q.jump_scale),
                                     rel_change(next.jump_prob, q.jump_prob)});
    q = next;
    if (level >= t && change < settings.tolerance) break;
  }
  return q;
}

TailEstimate is_estimate(int n, double delta, double t, const ProposalParams& proposal, std::int64_t samples,
                         const Exec& exec) {
  if (n < 1) throw DomainError("is_estimate: n must be >= 1");
  if (!(proposal.jump_prob > 0.0 && proposal.jump_prob < 1.0) || !(proposal.jump_scale > 0.0)) {
    throw DomainError("is_estimate: invalid proposal");
  }
  if (samples < 2) throw DomainError("is_estimate: need at least 2 samples");
  std::vector<Moments> parts(chunk_count(samples));
  for_each_chunk(samples, exec, [&](std::int64_t c, std::int64_t b, std::int64_t e) {
    ProposalSampler s(n, delta, proposal);
    Rng rng = make_rng(proposal.seed, Stream::ImportanceFinal, static_cast<std::uint64_t>(c));
    Moments m;
    for (std::int64_t i = b; i < e; ++i) {
      const Draw d = s.draw(rng);
      if (d.total > t) {
        m.sum += d.lr;
        m.sumsq += d.lr * d.lr;
      }
    }
    parts[c] = m;
  });
  return finish(parts, samples, n, delta, t);
}

TailEstimate plain_mc_estimate(int n, double delta, double t, std::int64_t samples, std::uint64_t seed,
                               const Exec& exec) {
  if (n < 1) throw DomainError("plain_mc_estimate: n must be >= 1");
  if (samples < 2) throw DomainError("plain_mc_estimate: need at least 2 samples");
  std::vector<Moments> parts(chunk_count(samples));
  for_each_chunk(samples, exec, [&](std::int64_t c, std::int64_t b, std::int64_t e) {
    Rng rng = make_rng(seed, Stream::PlainMc, static_cast<std::uint64_t>(c));
    Moments m;
    for (std::int64_t i = b; i < e; ++i) {
      double total = 0.0;
      for (int k = 0; k < n; ++k) total += trunc_cauchy_draw(rng.uniform(), delta);
      if (total > t) m.sum += 1.0;
    }
    m.sumsq = m.sum;
    parts[c] = m;
  });
  return finish(parts, samples, n, delta, t);
}

double big_jump_share(int n, double delta, double t, const ProposalParams& proposal, std::int64_t samples,
                      double frac) {
  const auto draws = draw_many(n, delta, proposal, samples, Stream::ImportanceFinal, 1ULL << 40, Exec{});
  std::int64_t hits = 0, big = 0;
  for (const auto& d : draws) {
    if (d.total <= t) continue;
    ++hits;
    big += d.max_component > frac * t;
  }
  return hits ? static_cast<double>(big) / hits : std::nan("");
}

}  // namespace heavycomb
