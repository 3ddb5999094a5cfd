#include "heavycomb/pareto_sum.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <array>
#include <cmath>
#include <cstdint>

#include "heavycomb/transform.hpp"

namespace heavycomb {

namespace {

using cplx = std::complex<double>;

constexpr double kPi = boost::math::constants::pi<double>();

// Abate & Whitt's EULER parameters: A sets the discretization error e^{-A},
// kTerms partial sums are averaged with binomial weights over kEuler more.
constexpr double kA = 18.4;
constexpr int kTerms = 24;
constexpr int kEuler = 13;

cplx log1p_c(cplx w) {
  if (std::abs(w) < 1e-3) {
    cplx term = w, sum = 0.0;
    for (int k = 1; k <= 7; ++k) {
      sum += (k % 2 == 1 ? 1.0 : -1.0) * term / static_cast<double>(k);
      term *= w;
    }
    return sum;
  }
  return std::log(1.0 + w);
}

cplx expm1_c(cplx z) {
  const double x = z.real(), y = z.imag();
  const double s = std::sin(0.5 * y);
  return {std::expm1(x) * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y)};
}

// Laplace transform of x -> P(S - n > x).
double survival_transform_re(double a, int n, cplx s) {
  const cplx c = pareto_laplace_complement(a, s);
  const cplx one_minus_pow = -expm1_c(static_cast<double>(n) * log1p_c(-c));
  return (one_minus_pow / s).real();
}

std::array<double, kEuler + 1> binomial_weights() {
  std::array<double, kEuler + 1> w{};
  double c = 1.0;
  for (int j = 0; j <= kEuler; ++j) {
    w[j] = c / std::ldexp(1.0, kEuler);
    c = c * (kEuler - j) / (j + 1);
  }
  return w;
}

}  // namespace

double box_cox_sum_survival(double eta, int n, double t) {
  if (!(eta > 0.0)) throw DomainError("box_cox_sum_survival: eta must be positive");
  if (n < 1) throw DomainError("box_cox_sum_survival: n must be >= 1");
  if (std::isnan(t)) throw DomainError("box_cox_sum_survival: t is NaN");
  const double a = 1.0 / eta;
  if (n == 1) return t <= 1.0 ? 1.0 : std::exp(-a * std::log(t));
  const double x = t - n;
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;

  static const auto weights = binomial_weights();
  const double scale = std::exp(0.5 * kA) / x;
  double partial = 0.5 * survival_transform_re(a, n, cplx(kA / (2.0 * x), 0.0));
  std::array<double, kEuler + 1> sums{};
  for (int k = 1; k <= kTerms + kEuler; ++k) {
    const cplx s(kA / (2.0 * x), k * kPi / x);
    partial += ((k % 2) ? -1.0 : 1.0) * survival_transform_re(a, n, s);
    if (k >= kTerms) sums[k - kTerms] = partial;
  }
  double acc = 0.0;
  for (int j = 0; j <= kEuler; ++j) acc += weights[j] * sums[j];
  const double g = scale * acc;
  if (g < 0.0) return 0.0;
  if (g > 1.0) return 1.0;
  return g;
}

double box_cox_sum_quantile(double eta, int n, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("box_cox_sum_quantile: alpha must be in (0,1)");
  if (n == 1) return std::exp(-eta * std::log(alpha));
  // Root in u = log(t - n); G is strictly decreasing there.
  auto f = [&](double u) { return std::log(box_cox_sum_survival(eta, n, n + std::exp(u))) - std::log(alpha); };
  double guess = std::log(std::max(1.0, std::exp(eta * std::log(n / alpha))));
  double lo = guess, hi = guess;
  double flo = f(lo), fhi = flo;
  for (int i = 0; flo < 0.0 && i < 200; ++i) {
    hi = lo;
    fhi = flo;
    lo -= 1.0;
    flo = f(lo);
  }
  for (int i = 0; fhi > 0.0 && i < 200; ++i) {
    lo = hi;
    flo = fhi;
    hi += 1.0;
    fhi = f(hi);
  }
  if (!(flo >= 0.0 && fhi <= 0.0)) throw NumericalError("box_cox_sum_quantile: failed to bracket");
  std::uintmax_t iters = 200;
  auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(44), iters);
  return n + std::exp(0.5 * (r.first + r.second));
}

}  // namespace heavycomb
