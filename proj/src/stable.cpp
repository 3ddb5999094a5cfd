#include "heavycomb/stable.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>

#include "heavycomb/transform.hpp"

namespace heavycomb {

namespace {

constexpr double kPi = boost::math::constants::pi<double>();

// Past these |z| the inversion integral oscillates too fast to be worth it.
constexpr double kGilPelaezReachAlpha1 = 50.0;
constexpr double kGilPelaezReach = 200.0;
// Beyond this the alpha = 1 tail is (1 +/- beta)/(pi |z|) to ~1e-7 relative.
constexpr double kAsymptoteFrom = 1e8;

using GaussLegendre = boost::math::quadrature::gauss<double, 20>;
using Kronrod = boost::math::quadrature::gauss_kronrod<double, 61>;

struct Standardized {
  double z;
};

Standardized standardize(const StableParams& p, double x) {
  double shift = p.mu;
  if (p.alpha == 1.0) shift += 2.0 / kPi * p.beta * p.gamma * std::log(p.gamma);
  return {(x - shift) / p.gamma};
}

double unstandardize(const StableParams& p, double z) {
  double shift = p.mu;
  if (p.alpha == 1.0) shift += 2.0 / kPi * p.beta * p.gamma * std::log(p.gamma);
  return p.gamma * z + shift;
}

double tail_constant(double alpha) { return std::tgamma(alpha) * std::sin(kPi * alpha / 2.0) / kPi; }

detail::CdfPair asymptote(double alpha, double beta, double z) {
  const double c = tail_constant(alpha);
  if (z > 0.0) {
    const double s = c * (1.0 + beta) * std::pow(z, -alpha);
    return {1.0 - s, s};
  }
  const double f = c * (1.0 - beta) * std::pow(-z, -alpha);
  return {f, 1.0 - f};
}

detail::CdfPair cauchy_exact(double z) {
  // arctan form split by sign to keep the small side accurate
  if (z > 0.0) {
    const double s = std::atan(1.0 / z) / kPi;
    return {1.0 - s, s};
  }
  if (z < 0.0) {
    const double f = std::atan(-1.0 / z) / kPi;
    return {f, 1.0 - f};
  }
  return {0.5, 0.5};
}

detail::CdfPair standard_cdf(double alpha, double beta, double z) {
  if (alpha == 1.0) {
    // The light side (beta z < 0) decays double-exponentially; Gil-Pelaez only
    // resolves it to absolute accuracy, the Zolotarev form to relative.
    const bool light_side = beta * z < -1.0;
    if (std::abs(z) <= kGilPelaezReachAlpha1 && !light_side) return detail::gil_pelaez_standard(alpha, beta, z);
    if (beta == 0.0) return cauchy_exact(z);
    if (std::abs(z) <= kAsymptoteFrom) return detail::zolotarev_alpha1_standard(beta, z);
    return asymptote(alpha, beta, z);
  }
  if (std::abs(z) <= kGilPelaezReach) return detail::gil_pelaez_standard(alpha, beta, z);
  return asymptote(alpha, beta, z);
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

void StableParams::validate() const {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("stable: alpha must be in (0, 2]");
  if (!(beta >= -1.0 && beta <= 1.0)) throw DomainError("stable: beta must be in [-1, 1]");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("stable: gamma must be positive");
  if (!std::isfinite(mu)) throw DomainError("stable: mu must be finite");
}

namespace detail {

CdfPair gil_pelaez_standard(double alpha, double beta, double z) {
  const bool log_case = alpha == 1.0;
  const double skew = log_case ? 2.0 * beta / kPi : -beta * std::tan(kPi * alpha / 2.0);
  auto phase = [&](double t) {
    return log_case ? z * t + skew * t * std::log(t) : z * t + skew * std::pow(t, alpha);
  };
  auto integrand = [&](double t) {
    if (t <= 0.0) return 0.0;
    return std::exp(-std::pow(t, alpha)) * std::sin(phase(t)) / t;
  };

  // exp(-t^alpha) / t < 1e-17 beyond t_max
  const double t_max = std::pow(40.0, 1.0 / alpha);
  double omega = std::abs(z) + 1.0;
  if (log_case) {
    omega += std::abs(skew) * (std::log(t_max) + 1.0);
  } else {
    omega += std::abs(skew) * alpha * std::max(1.0, std::pow(t_max, alpha - 1.0));
  }
  const double t0 = std::min(1.0, 1.0 / omega);

  boost::math::quadrature::tanh_sinh<double> ts;
  double integral = ts.integrate(integrand, 0.0, t0, 1e-15);

  const double width = kPi / omega;
  const auto pieces = static_cast<std::int64_t>(std::ceil((t_max - t0) / width));
  if (pieces > 50'000'000) throw NumericalError("stable_cdf: oscillatory range too long");
  for (std::int64_t k = 0; k < pieces; ++k) {
    const double a = t0 + k * width;
    const double b = std::min(t_max, a + width);
    integral += GaussLegendre::integrate(integrand, a, b);
  }
  return {clamp01(0.5 + integral / kPi), clamp01(0.5 - integral / kPi)};
}

CdfPair zolotarev_alpha1_standard(double beta, double z) {
  if (beta == 0.0) throw DomainError("zolotarev_alpha1_standard requires beta != 0");
  if (beta < 0.0) {
    const CdfPair r = zolotarev_alpha1_standard(-beta, -z);
    return {r.survival, r.cdf};
  }
  // theta = pi/2 - phi; V(theta) = (2/pi) (pi/2 + beta theta) / cos(theta)
  //                                 * exp((pi/2 + beta theta) tan(theta) / beta)
  const double offset = -kPi * z / (2.0 * beta);
  auto log_h = [&](double phi) {
    const double c = 0.5 * kPi * (1.0 + beta) - beta * phi;
    if (c <= 0.0) return -HUGE_VAL;
    const double sp = std::sin(phi);
    return offset + std::log(2.0 / kPi) + std::log(c) - std::log(sp) + c * std::cos(phi) / (beta * sp);
  };
  auto below = [&](double phi) {  // exp(-h): contributes to the CDF
    if (phi <= 0.0) return 0.0;
    if (phi >= kPi) return 1.0;
    const double lh = log_h(phi);
    if (lh > 700.0) return 0.0;
    return std::exp(-std::exp(lh));
  };
  auto above = [&](double phi) {  // 1 - exp(-h): contributes to the survival
    if (phi <= 0.0) return 1.0;
    if (phi >= kPi) return 0.0;
    const double lh = log_h(phi);
    if (lh > 700.0) return 1.0;
    return -std::expm1(-std::exp(lh));
  };

  // log_h decreases from +inf at phi = 0 to -inf at phi = pi; split at h = 1.
  double lo = 0.0, hi = kPi;
  for (int i = 0; i < 200 && hi - lo > 1e-300 + 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (log_h(mid) > 0.0) lo = mid;
    else hi = mid;
  }
  const double star = 0.5 * (lo + hi);
  std::array<double, 6> cuts{0.0, 0.25 * star, star, std::min(kPi, 4.0 * star), std::min(kPi, 32.0 * star), kPi};

  double cdf = 0.0, surv = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    // c and sin(phi) both vanish at pi; slivers there are pure roundoff
    if (!(cuts[i + 1] - cuts[i] > 1e-9)) continue;
    cdf += Kronrod::integrate(below, cuts[i], cuts[i + 1], 12, 1e-10);
    surv += Kronrod::integrate(above, cuts[i], cuts[i + 1], 12, 1e-10);
  }
  return {clamp01(cdf / kPi), clamp01(surv / kPi)};
}

}  // namespace detail

double stable_cdf(const StableParams& params, double x) {
  params.validate();
  if (!std::isfinite(x)) throw DomainError("stable_cdf: x must be finite");
  const auto s = standardize(params, x);
  return standard_cdf(params.alpha, params.beta, s.z).cdf;
}

double stable_survival(const StableParams& params, double x) {
  params.validate();
  if (!std::isfinite(x)) throw DomainError("stable_survival: x must be finite");
  const auto s = standardize(params, x);
  return standard_cdf(params.alpha, params.beta, s.z).survival;
}

namespace {

// Solves side(z) = target on the standardized scale, where side is the
// CDF (increasing) or survival (decreasing), in log space.
double solve_standard(double alpha, double beta, double target, bool upper) {
  const double log_target = std::log(target);
  auto f = [&](double z) {
    const auto r = standard_cdf(alpha, beta, z);
    const double v = upper ? r.survival : r.cdf;
    const double lv = v > 0.0 ? std::log(v) : -745.0;
    return upper ? log_target - lv : lv - log_target;  // increasing in z
  };
  double lo = -1.0, hi = 1.0;
  double flo = f(lo), fhi = f(hi);
  for (int i = 0; flo > 0.0 && i < 80; ++i) {
    hi = lo;
    fhi = flo;
    lo *= 2.0;
    flo = f(lo);
  }
  for (int i = 0; fhi < 0.0 && i < 80; ++i) {
    lo = hi;
    flo = fhi;
    hi *= 2.0;
    fhi = f(hi);
  }
  if (flo > 0.0 || fhi < 0.0) throw NumericalError("stable quantile: failed to bracket");
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  std::uintmax_t iters = 300;
  const auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(48), iters);
  return 0.5 * (r.first + r.second);
}

}  // namespace

double stable_quantile(const StableParams& params, double q) {
  params.validate();
  if (!(q > 0.0 && q < 1.0)) throw DomainError("stable_quantile: q must be in (0,1)");
  const double z = q <= 0.5 ? solve_standard(params.alpha, params.beta, q, false)
                            : solve_standard(params.alpha, params.beta, 1.0 - q, true);
  return unstandardize(params, z);
}

double stable_upper_quantile(const StableParams& params, double p) {
  params.validate();
  if (!(p > 0.0 && p < 1.0)) throw DomainError("stable_upper_quantile: p must be in (0,1)");
  const double z = p >= 0.5 ? solve_standard(params.alpha, params.beta, 1.0 - p, false)
                            : solve_standard(params.alpha, params.beta, p, true);
  return unstandardize(params, z);
}

}  // namespace heavycomb
