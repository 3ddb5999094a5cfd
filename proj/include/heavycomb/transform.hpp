#pragma once

#include <stdexcept>
#include <string>

namespace heavycomb {

/// Thrown for arguments outside an operation's documented domain.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a numerical routine (quadrature, root finding, sampling)
/// cannot reach its accuracy target.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class TransformKind {
  Fisher,
  Stouffer,
  MinP,
  BoxCox,
  Cauchy,
  TruncCauchy,
  InvGamma,
  LogGamma,
  HigherCriticism,
  BerkJones,
};

/// A p-value transformation g(p) = F_U^{-1}(1 - p) together with its parameters.
///
/// Parameterizations of the two gamma-derived families:
///  - InvGamma(shape a, scale b): U = 1/G with G ~ Gamma(shape a, rate b), so
///    P(U > t) = P(a, b/t) (regularized lower incomplete gamma) and the tail
///    index is a.
///  - LogGamma(shape k, scale s): U = exp(G) with G ~ Gamma(shape k, scale s),
///    so P(U > t) = Q(k, ln(t)/s) for t >= 1. Since
///    Q(k, x) ~ x^(k-1) e^(-x) / Gamma(k), the survival behaves like
///    (ln t / s)^(k-1) t^(-1/s) / Gamma(k): a slowly varying factor times
///    t^(-1/s), hence tail index 1/s (the rate). Rate 1 means scale 1.
struct TransformSpec {
  TransformKind kind = TransformKind::Cauchy;
  double eta = 1.0;     // BoxCox exponent
  double delta = 0.01;  // TruncCauchy truncation
  double shape = 1.0;   // InvGamma / LogGamma
  double scale = 1.0;   // InvGamma / LogGamma

  static TransformSpec fisher() { return {TransformKind::Fisher}; }
  static TransformSpec stouffer() { return {TransformKind::Stouffer}; }
  static TransformSpec min_p() { return {TransformKind::MinP}; }
  static TransformSpec cauchy() { return {TransformKind::Cauchy}; }
  static TransformSpec harmonic_mean() { return box_cox(1.0); }
  static TransformSpec higher_criticism() { return {TransformKind::HigherCriticism}; }
  static TransformSpec berk_jones() { return {TransformKind::BerkJones}; }
  static TransformSpec box_cox(double eta) {
    TransformSpec s{TransformKind::BoxCox};
    s.eta = eta;
    return s;
  }
  static TransformSpec trunc_cauchy(double delta = 0.01) {
    TransformSpec s{TransformKind::TruncCauchy};
    s.delta = delta;
    return s;
  }
  static TransformSpec inv_gamma(double shape, double scale) {
    TransformSpec s{TransformKind::InvGamma};
    s.shape = shape;
    s.scale = scale;
    return s;
  }
  static TransformSpec log_gamma(double shape, double scale) {
    TransformSpec s{TransformKind::LogGamma};
    s.shape = shape;
    s.scale = scale;
    return s;
  }

  /// Throws DomainError if parameters are out of range for the kind.
  void validate() const;

  /// Short human-readable tag, e.g. "BC1.25", "HM", "CAtr".
  std::string label() const;

  friend bool operator==(const TransformSpec&, const TransformSpec&) = default;
};

/// True for BoxCox, Cauchy, TruncCauchy, InvGamma and LogGamma.
bool is_regularly_varying(TransformKind kind);

/// True for kinds that carry an element-wise transform g(p).
bool has_transform(TransformKind kind);

/// g(p). Requires 0 < p < 1.
double transform(const TransformSpec& spec, double p);

/// P(U > t) for U = g(P), P ~ Uniform(0,1). Regularly varying kinds only.
double tail_survival(const TransformSpec& spec, double t);

/// Regular-variation index gamma of U. Regularly varying kinds only.
double tail_index(const TransformSpec& spec);

/// tan((0.5 - p) pi), accurate near both ends.
double cauchy_upper_quantile(double p);

/// 1/2 - atan(t)/pi, accurate for large t.
double cauchy_survival(double t);

/// Parses method names used on the command line and in config files:
/// fisher, stouffer, minp, hm, cauchy, trunc-cauchy, boxcox, invgamma,
/// loggamma, hc, bj. Parameters are taken from `defaults`.
TransformSpec parse_method(const std::string& name, const TransformSpec& defaults = {});

}  // namespace heavycomb
