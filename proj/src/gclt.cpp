#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/expint.hpp>

#include <algorithm>
#include <cmath>

#include "heavycomb/null_models.hpp"
#include "heavycomb/stable.hpp"

namespace heavycomb {

namespace {

constexpr double kPi = boost::math::constants::pi<double>();

struct Pair {
  double cos_part = 0.0;
  double sin_part = 0.0;
};

// int_0^L {cos, sin}(b x) / (1 + x^2) dx. Geometric breakpoints follow the
// 1/(1+x^2) scale, each piece also capped at a quarter period of b x.
// Two Gauss orders per piece; disagreement means the rule did not resolve it.
Pair finite_part(double b, double L) {
  using G20 = boost::math::quadrature::gauss<double, 20>;
  using G30 = boost::math::quadrature::gauss<double, 30>;
  auto fc = [b](double x) { return std::cos(b * x) / (1.0 + x * x); };
  auto fs = [b](double x) { return std::sin(b * x) / (1.0 + x * x); };
  const double max_width = 0.5 * kPi / b;
  Pair acc, check;
  double a = 0.0;
  double next = 1.0;
  while (a < L) {
    const double end = std::min({next, L, a + max_width});
    acc.cos_part += G30::integrate(fc, a, end);
    acc.sin_part += G30::integrate(fs, a, end);
    check.cos_part += G20::integrate(fc, a, end);
    check.sin_part += G20::integrate(fs, a, end);
    a = end;
    if (a >= next) next *= 2.0;
  }
  if (std::abs(acc.cos_part - check.cos_part) > 1e-11 || std::abs(acc.sin_part - check.sin_part) > 1e-11) {
    throw NumericalError("gclt_centering: quadrature did not converge");
  }
  return acc;
}

}  // namespace

GcltCentering gclt_centering(int n, double delta) {
  if (n < 1) throw DomainError("gclt_centering: n must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("gclt_centering: delta must be in (0,1)");
  GcltCentering c;
  c.n = n;
  c.delta = delta;
  c.nu_delta = std::tan(kPi * (delta - 0.5));
  const double b = 1.0 / n;
  const double L = -c.nu_delta;

  // Over [0, inf): int cos(bx)/(1+x^2) = (pi/2) e^{-b},
  //                int sin(bx)/(1+x^2) = (e^{-b} Ei(b) + e^{b} E1(b)) / 2.
  // Over [nu, 0] the integrands are even/odd, giving the finite parts.
  const Pair fin = finite_part(b, L);
  const double half_line_sin = 0.5 * (std::exp(-b) * boost::math::expint(b) + std::exp(b) * boost::math::expint(1, b));
  c.f1n = 0.5 * kPi * std::exp(-b) + fin.cos_part;
  c.f2n = half_line_sin - fin.sin_part;

  const double w = (1.0 - delta) / kPi;
  const double num = delta * std::sin(c.nu_delta * b) + w * c.f2n;
  const double den = delta * std::cos(c.nu_delta * b) + w * c.f1n;
  c.theta_n = std::atan(num / den);
  return c;
}

double gclt_survival(const GcltCentering& c, double x) {
  const double n = c.n;
  return stable_survival(kTruncCauchyLimit, (x - n * n * c.theta_n) / n);
}

double gclt_threshold(const GcltCentering& c, double alpha) {
  const double n = c.n;
  return n * n * c.theta_n + n * stable_upper_quantile(kTruncCauchyLimit, alpha);
}

}  // namespace heavycomb
