#include "heavycomb/correlation.hpp"

#include <cmath>
#include <sstream>

#include "heavycomb/transform.hpp"

namespace heavycomb {

CorrelationModel CorrelationModel::exchangeable(double rho) {
  CorrelationModel m;
  m.kind = Kind::Exchangeable;
  m.rho = rho;
  return m;
}

CorrelationModel CorrelationModel::banded(std::vector<double> coefs) {
  CorrelationModel m;
  m.kind = Kind::Banded;
  m.coefs = std::move(coefs);
  return m;
}

CorrelationModel CorrelationModel::dense(Eigen::MatrixXd mat) {
  CorrelationModel m;
  m.kind = Kind::Dense;
  m.matrix = std::move(mat);
  return m;
}

Eigen::MatrixXd CorrelationModel::matrix_for(int n) const {
  switch (kind) {
    case Kind::Independent:
      return Eigen::MatrixXd::Identity(n, n);
    case Kind::Exchangeable: {
      Eigen::MatrixXd s = Eigen::MatrixXd::Constant(n, n, rho);
      s.diagonal().setOnes();
      return s;
    }
    case Kind::Banded: {
      Eigen::MatrixXd s = Eigen::MatrixXd::Identity(n, n);
      for (int i = 0; i < n; ++i) {
        for (std::size_t lag = 1; lag <= coefs.size() && i + static_cast<int>(lag) < n; ++lag) {
          s(i, i + lag) = s(i + lag, i) = coefs[lag - 1];
        }
      }
      return s;
    }
    case Kind::Dense:
      return matrix;
  }
  return {};
}

void CorrelationModel::validate(int n) const {
  if (n < 1) throw DomainError("correlation model: n must be >= 1");
  switch (kind) {
    case Kind::Independent:
      return;
    case Kind::Exchangeable:
      if (!(rho <= 1.0) || (n > 1 && !(rho > -1.0 / (n - 1)))) {
        throw DomainError("exchangeable rho must lie in (-1/(n-1), 1]");
      }
      return;
    case Kind::Banded:
    case Kind::Dense: {
      const Eigen::MatrixXd s = matrix_for(n);
      if (s.rows() != n || s.cols() != n) throw DomainError("correlation matrix has wrong size");
      if (!s.isApprox(s.transpose(), 1e-12)) throw DomainError("correlation matrix is not symmetric");
      if ((s.diagonal().array() - 1.0).abs().maxCoeff() > 1e-12) throw DomainError("correlation matrix needs a unit diagonal");
      Eigen::LLT<Eigen::MatrixXd> llt(s);
      if (llt.info() != Eigen::Success) throw DomainError("correlation matrix is not positive definite");
      return;
    }
  }
}

std::string CorrelationModel::label() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Independent:
      os << "independent";
      break;
    case Kind::Exchangeable:
      os << "exchangeable(" << rho << ")";
      break;
    case Kind::Banded:
      os << "banded(" << coefs.size() << ")";
      break;
    case Kind::Dense:
      os << "dense(" << matrix.rows() << ")";
      break;
  }
  return os.str();
}

ZSampler::ZSampler(const CorrelationModel& model, int n) : n_(n) {
  model.validate(n);
  using K = CorrelationModel::Kind;
  if (model.kind == K::Independent || (model.kind == K::Exchangeable && model.rho == 0.0) || n == 1) {
    mode_ = Mode::Iid;
    return;
  }
  if (model.kind == K::Exchangeable && model.rho > 0.0) {
    mode_ = Mode::Factor;
    a_ = std::sqrt(model.rho);
    b_ = std::sqrt(1.0 - model.rho);
    return;
  }
  mode_ = Mode::Cholesky;
  Eigen::LLT<Eigen::MatrixXd> llt(model.matrix_for(n));
  if (llt.info() != Eigen::Success) throw DomainError("correlation matrix is not positive definite");
  lower_ = llt.matrixL();
}

void ZSampler::sample(Rng& rng, std::span<double> out) const {
  switch (mode_) {
    case Mode::Iid:
      for (double& v : out) v = rng.normal();
      return;
    case Mode::Factor: {
      const double shared = a_ * rng.normal();
      if (b_ == 0.0) {
        for (double& v : out) v = shared;
        return;
      }
      for (double& v : out) v = shared + b_ * rng.normal();
      return;
    }
    case Mode::Cholesky: {
      Eigen::VectorXd e(n_);
      for (int i = 0; i < n_; ++i) e[i] = rng.normal();
      Eigen::Map<Eigen::VectorXd>(out.data(), n_) = lower_.triangularView<Eigen::Lower>() * e;
      return;
    }
  }
}

std::vector<double> sample_z(const CorrelationModel& model, int n, Rng& rng) {
  ZSampler s(model, n);
  std::vector<double> out(n);
  s.sample(rng, out);
  return out;
}

double z_to_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

std::vector<double> z_to_p(const std::vector<double>& z) {
  std::vector<double> p(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) p[i] = z_to_p(z[i]);
  return p;
}

}  // namespace heavycomb
