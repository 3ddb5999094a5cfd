#pragma once

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

#include "heavycomb/rng.hpp"

namespace heavycomb {

struct CorrelationModel {
  enum class Kind { Independent, Exchangeable, Banded, Dense };

  Kind kind = Kind::Independent;
  double rho = 0.0;           // Exchangeable
  std::vector<double> coefs;  // Banded: corr at lag 1..d0
  Eigen::MatrixXd matrix;     // Dense

  static CorrelationModel independent() { return {}; }
  static CorrelationModel exchangeable(double rho);
  static CorrelationModel banded(std::vector<double> coefs);
  static CorrelationModel dense(Eigen::MatrixXd m);

  /// Throws DomainError if the model is not a valid correlation for size n.
  void validate(int n) const;
  std::string label() const;
  Eigen::MatrixXd matrix_for(int n) const;
};

/// Draws N(0, Sigma) vectors for one model and size. Exchangeable with
/// rho >= 0 uses the one-factor form sqrt(rho) Z0 + sqrt(1-rho) Z_i (rho = 1
/// gives identical coordinates); other structured cases use a Cholesky factor.
class ZSampler {
 public:
  ZSampler(const CorrelationModel& model, int n);
  int n() const { return n_; }
  void sample(Rng& rng, std::span<double> out) const;

 private:
  enum class Mode { Iid, Factor, Cholesky };
  int n_;
  Mode mode_ = Mode::Iid;
  double a_ = 0.0, b_ = 1.0;
  Eigen::MatrixXd lower_;
};

/// One draw of N(0, Sigma).
std::vector<double> sample_z(const CorrelationModel& model, int n, Rng& rng);

/// Two-sided p = 2 (1 - Phi(|z|)).
double z_to_p(double z);
std::vector<double> z_to_p(const std::vector<double>& z);

}  // namespace heavycomb
