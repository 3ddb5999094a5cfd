#include "heavycomb/transform.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <sstream>

namespace heavycomb {

namespace {

constexpr double kPi = boost::math::constants::pi<double>();

std::string format_param(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

double cauchy_upper_quantile(double p) {
  if (p < 0.25) return 1.0 / std::tan(kPi * p);
  if (p > 0.75) return -1.0 / std::tan(kPi * (1.0 - p));
  return std::tan((0.5 - p) * kPi);
}

double cauchy_survival(double t) {
  if (t > 0.0) return std::atan(1.0 / t) / kPi;
  return 0.5 - std::atan(t) / kPi;
}

bool is_regularly_varying(TransformKind kind) {
  switch (kind) {
    case TransformKind::BoxCox:
    case TransformKind::Cauchy:
    case TransformKind::TruncCauchy:
    case TransformKind::InvGamma:
    case TransformKind::LogGamma:
      return true;
    default:
      return false;
  }
}

bool has_transform(TransformKind kind) {
  switch (kind) {
    case TransformKind::MinP:
    case TransformKind::HigherCriticism:
    case TransformKind::BerkJones:
      return false;
    default:
      return true;
  }
}

void TransformSpec::validate() const {
  switch (kind) {
    case TransformKind::BoxCox:
      if (!(eta > 0.0) || !std::isfinite(eta)) throw DomainError("BoxCox requires eta > 0");
      break;
    case TransformKind::TruncCauchy:
      if (!(delta > 0.0 && delta < 1.0)) throw DomainError("TruncCauchy requires 0 < delta < 1");
      break;
    case TransformKind::InvGamma:
    case TransformKind::LogGamma:
      if (!(shape > 0.0) || !(scale > 0.0) || !std::isfinite(shape) || !std::isfinite(scale))
        throw DomainError("gamma-derived transforms require shape > 0 and scale > 0");
      break;
    default:
      break;
  }
}

std::string TransformSpec::label() const {
  switch (kind) {
    case TransformKind::Fisher: return "Fisher";
    case TransformKind::Stouffer: return "Stouffer";
    case TransformKind::MinP: return "minP";
    case TransformKind::BoxCox: return eta == 1.0 ? "HM" : "BC" + format_param(eta);
    case TransformKind::Cauchy: return "CA";
    case TransformKind::TruncCauchy: return "CAtr";
    case TransformKind::InvGamma: return "IG(" + format_param(shape) + "," + format_param(scale) + ")";
    case TransformKind::LogGamma: return "LG(" + format_param(shape) + "," + format_param(scale) + ")";
    case TransformKind::HigherCriticism: return "HC";
    case TransformKind::BerkJones: return "BJ";
  }
  return "?";
}

double transform(const TransformSpec& spec, double p) {
  spec.validate();
  if (!(p > 0.0 && p < 1.0)) throw DomainError("transform requires 0 < p < 1");
  switch (spec.kind) {
    case TransformKind::Fisher:
      return -2.0 * std::log(p);
    case TransformKind::Stouffer:
      // -Phi^{-1}(p) = sqrt(2) * erfc^{-1}(2p)
      return boost::math::constants::root_two<double>() * boost::math::erfc_inv(2.0 * p);
    case TransformKind::BoxCox:
      return std::exp(-spec.eta * std::log(p));
    case TransformKind::Cauchy:
      return cauchy_upper_quantile(p);
    case TransformKind::TruncCauchy:
      if (p < 1.0 - spec.delta) return cauchy_upper_quantile(p);
      return -1.0 / std::tan(kPi * spec.delta);  // tan((delta - 0.5) pi)
    case TransformKind::InvGamma:
      return spec.scale / boost::math::gamma_p_inv(spec.shape, p);
    case TransformKind::LogGamma:
      return std::exp(spec.scale * boost::math::gamma_q_inv(spec.shape, p));
    case TransformKind::MinP:
    case TransformKind::HigherCriticism:
    case TransformKind::BerkJones:
      break;
  }
  throw DomainError("no element-wise transform for " + spec.label());
}

double tail_survival(const TransformSpec& spec, double t) {
  spec.validate();
  if (std::isnan(t)) throw DomainError("tail_survival: t is NaN");
  switch (spec.kind) {
    case TransformKind::BoxCox:
      if (t <= 1.0) return 1.0;
      return std::exp(-std::log(t) / spec.eta);
    case TransformKind::Cauchy:
      return cauchy_survival(t);
    case TransformKind::TruncCauchy:
      // Truncation moves the lower-tail mass onto the atom at nu_delta.
      if (t < -1.0 / std::tan(kPi * spec.delta)) return 1.0;
      return cauchy_survival(t);
    case TransformKind::InvGamma:
      if (t <= 0.0) return 1.0;
      if (std::isinf(t)) return 0.0;
      return boost::math::gamma_p(spec.shape, spec.scale / t);
    case TransformKind::LogGamma:
      if (t <= 1.0) return 1.0;
      if (std::isinf(t)) return 0.0;
      return boost::math::gamma_q(spec.shape, std::log(t) / spec.scale);
    default:
      break;
  }
  throw DomainError("tail_survival undefined for " + spec.label());
}

double tail_index(const TransformSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case TransformKind::BoxCox: return 1.0 / spec.eta;
    case TransformKind::Cauchy:
    case TransformKind::TruncCauchy: return 1.0;
    case TransformKind::InvGamma: return spec.shape;
    case TransformKind::LogGamma: return 1.0 / spec.scale;
    default: break;
  }
  throw DomainError("tail_index undefined for " + spec.label());
}

TransformSpec parse_method(const std::string& name, const TransformSpec& defaults) {
  TransformSpec s = defaults;
  if (name == "fisher") s.kind = TransformKind::Fisher;
  else if (name == "stouffer") s.kind = TransformKind::Stouffer;
  else if (name == "minp") s.kind = TransformKind::MinP;
  else if (name == "hm") {
    s.kind = TransformKind::BoxCox;
    s.eta = 1.0;
  } else if (name == "boxcox" || name == "bc") s.kind = TransformKind::BoxCox;
  else if (name == "cauchy" || name == "ca") s.kind = TransformKind::Cauchy;
  else if (name == "trunc-cauchy" || name == "catr") s.kind = TransformKind::TruncCauchy;
  else if (name == "invgamma") s.kind = TransformKind::InvGamma;
  else if (name == "loggamma") s.kind = TransformKind::LogGamma;
  else if (name == "hc") s.kind = TransformKind::HigherCriticism;
  else if (name == "bj") s.kind = TransformKind::BerkJones;
  else throw DomainError("unknown method '" + name + "'");
  s.validate();
  return s;
}

}  // namespace heavycomb
