#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/digamma.hpp>

#include <cmath>
#include <complex>

#include "heavycomb/pareto_sum.hpp"
#include "heavycomb/transform.hpp"

namespace heavycomb {

namespace {

using cplx = std::complex<double>;

constexpr double kEps = 1e-16;
constexpr int kMaxTerms = 2000;

cplx expm1_c(cplx z) {
  const double x = z.real(), y = z.imag();
  const double s = std::sin(0.5 * y);
  return {std::expm1(x) * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y)};
}

// 1 - a E_{a+1}(z), power series, |z| <= ~1.
cplx laplace_complement_series(double a, cplx z) {
  const double m_round = std::round(a);
  const bool integer_order = std::abs(a - m_round) < 1e-9 && m_round >= 1.0;
  cplx sum = 0.0;
  cplx term = 1.0;  // (-z)^k / k!
  if (!integer_order) {
    for (int k = 1; k < kMaxTerms; ++k) {
      term *= -z / static_cast<double>(k);
      const cplx add = term / (static_cast<double>(k) - a);
      sum += add;
      if (std::abs(add) <= kEps * std::abs(sum) && k > 2) break;
    }
    return std::tgamma(1.0 - a) * std::exp(a * std::log(z)) + a * sum;
  }
  const int m = static_cast<int>(m_round);
  cplx lead = 0.0;
  for (int k = 1; k < kMaxTerms; ++k) {
    term *= -z / static_cast<double>(k);
    if (k == m) {
      lead = term;
      continue;
    }
    const cplx add = term / static_cast<double>(k - m);
    sum += add;
    if (k > m && std::abs(add) <= kEps * std::abs(sum)) break;
  }
  const double psi = boost::math::digamma(static_cast<double>(m + 1));
  return -static_cast<double>(m) * lead * (psi - std::log(z)) + static_cast<double>(m) * sum;
}

// e^z E_nu(z) by the modified Lentz continued fraction; Re z > 0, |z| >~ 1.
cplx scaled_expint_cf(double nu, cplx z) {
  constexpr double tiny = 1e-300;
  cplx b = z + nu;
  cplx c = 1.0 / tiny;
  cplx d = 1.0 / b;
  cplx h = d;
  for (int i = 1; i < kMaxTerms * 10; ++i) {
    const double an = -static_cast<double>(i) * (nu - 1.0 + i);
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const cplx del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw NumericalError("continued fraction for E_nu(z) did not converge");
}

}  // namespace

cplx pareto_laplace_complement(double a, cplx z) {
  if (!(a > 0.0)) throw DomainError("Pareto shape must be positive");
  if (!(z.real() > 0.0)) throw DomainError("Laplace argument needs Re z > 0");
  if (std::abs(z) <= 1.0) {
    const cplx w = laplace_complement_series(a, z);  // 1 - L(z)
    // 1 - e^z L(z) = -(e^z - 1) + e^z (1 - L(z))
    return -expm1_c(z) + std::exp(z) * w;
  }
  return 1.0 - a * scaled_expint_cf(a + 1.0, z);
}

}  // namespace heavycomb
