#pragma once

namespace heavycomb {

/// Stable law S(alpha, beta, gamma, mu) with characteristic function
///   phi(t) = exp{ i mu t - gamma^alpha |t|^alpha (1 - i beta sgn(t) w(alpha, t)) },
///   w = tan(pi alpha / 2) for alpha != 1, w = -(2/pi) log|t| for alpha = 1.
///
/// Scale/location rule: for alpha != 1, X = gamma Z + mu with
/// Z ~ S(alpha, beta, 1, 0). For alpha = 1 the log term adds a shift:
/// X = gamma Z + mu + (2/pi) beta gamma log(gamma).
struct StableParams {
  double alpha = 1.0;
  double beta = 0.0;
  double gamma = 1.0;
  double mu = 0.0;

  void validate() const;
};

/// Limit law of the centered truncated-Cauchy sum, S(1, 1, 1/2, 0).
inline constexpr StableParams kTruncCauchyLimit{1.0, 1.0, 0.5, 0.0};

/// F(x). Gil-Pelaez inversion of phi for moderate |x|; for alpha = 1 and
/// large |x| the Zolotarev (Nolan) integral representation; beyond that the
/// power-tail asymptote.
double stable_cdf(const StableParams& params, double x);

/// 1 - F(x), computed directly in the upper tail.
double stable_survival(const StableParams& params, double x);

/// x with F(x) = q, 0 < q < 1.
double stable_quantile(const StableParams& params, double q);

/// x with 1 - F(x) = p, 0 < p < 1; accurate for p far below machine epsilon.
double stable_upper_quantile(const StableParams& params, double p);

namespace detail {
/// Gil-Pelaez inversion for standardized Z (gamma = 1, mu = 0); returns
/// {F(z), 1 - F(z)}. Exposed for cross-route tests.
struct CdfPair {
  double cdf;
  double survival;
};
CdfPair gil_pelaez_standard(double alpha, double beta, double z);
/// Zolotarev integral for standardized Z, alpha = 1, beta != 0.
CdfPair zolotarev_alpha1_standard(double beta, double z);
}  // namespace detail

}  // namespace heavycomb
