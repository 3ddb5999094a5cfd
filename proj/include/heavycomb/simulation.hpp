#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "heavycomb/correlation.hpp"
#include "heavycomb/kernels.hpp"
#include "heavycomb/null_models.hpp"
#include "heavycomb/transform.hpp"

namespace heavycomb {

enum class SignPattern { AllPositive, Alternating };

/// Mean shift mu0 on the first s of n z-scores.
struct SignalSpec {
  int n = 1;
  int s = 0;
  double mu0 = 0.0;
  SignPattern sign = SignPattern::AllPositive;

  static SignalSpec null(int n) { return {n, 0, 0.0}; }
  /// mu0 = sqrt(4 ln n) / s^0.1.
  static SignalSpec sparse_weak(int n, int s);
  /// s = round(n^(1 - beta)), mu0 = sqrt(2 tau ln n).
  static SignalSpec calibrated(int n, double beta, double tau);
  void validate() const;
};

enum class ThresholdKind { Analytic, EmpiricalCorrected };

std::string threshold_kind_name(ThresholdKind k);
ThresholdKind parse_threshold_kind(const std::string& s);

struct SimCell {
  std::string method;
  std::string model;
  double alpha = 0.0;
  double rejection_rate = 0.0;
  double mc_se = 0.0;
  std::int64_t reps = 0;
  std::uint64_t seed = 0;
  double threshold_used = 0.0;
  ThresholdKind threshold_kind = ThresholdKind::Analytic;

  bool operator==(const SimCell&) const = default;
};

struct SimReport {
  std::string experiment;  // "type1", "power", "discrete"
  int n = 0;
  std::vector<SimCell> cells;

  bool operator==(const SimReport&) const = default;
};

struct SimOptions {
  Exec exec;
  /// Null used for Box-Cox/HM analytic thresholds.
  HarmonicNull box_cox_null = HarmonicNull::Exact;
  /// Replicates behind the HC/BJ null and behind corrected thresholds.
  std::int64_t empirical_reps = 100'000;
  std::int64_t null_reps = 1'000'000;
};

/// Orientation used throughout the engine: larger score, more evidence.
/// Fisher, Stouffer, Box-Cox, Cauchy, truncated Cauchy and the gamma families
/// score sum g(p_i); minP scores -log p_(1); HC and BJ their statistics.
double method_score(const TransformSpec& method, std::span<const double> p);

/// Score threshold equivalent to combined_p <= alpha under independence.
double analytic_threshold(const TransformSpec& method, int n, double alpha, const SimOptions& opts = {},
                          std::uint64_t seed = 1);

/// Scores of every method on `reps` draws; result[m][r].
std::vector<std::vector<double>> simulate_scores(const std::vector<TransformSpec>& methods,
                                                 const CorrelationModel& model, const SignalSpec& signal,
                                                 std::int64_t reps, std::uint64_t seed, Stream stream,
                                                 const Exec& exec = {});

/// Empirical (1 - alpha) quantile; rejection uses score > threshold.
double empirical_upper_quantile(std::vector<double> values, double alpha);

SimReport type1_table(const std::vector<TransformSpec>& methods, const CorrelationModel& model, int n,
                      const std::vector<double>& alphas, std::int64_t reps, std::uint64_t seed,
                      const SimOptions& opts = {});

double corrected_threshold(const TransformSpec& method, const CorrelationModel& model, int n, double alpha,
                           std::int64_t reps, std::uint64_t seed, const SimOptions& opts = {});

SimReport power_table(const std::vector<TransformSpec>& methods, const CorrelationModel& model,
                      const SignalSpec& signal, const std::vector<double>& alphas, std::int64_t reps, bool corrected,
                      std::uint64_t seed, const SimOptions& opts = {});

struct RatioPoint {
  double alpha = 0.0;
  double t_alpha = 0.0;
  double y = 0.0;
  double log_y = 0.0;

  bool operator==(const RatioPoint&) const = default;
};

/// y(alpha) = n P(U > t_alpha) / alpha with t_alpha the empirical (1 - alpha)
/// quantile of T = sum g(p_i).
std::vector<RatioPoint> ratio_curve(const TransformSpec& spec, const CorrelationModel& model, int n,
                                    const std::vector<double>& alphas, std::int64_t reps, std::uint64_t seed,
                                    const Exec& exec = {});

/// Exact y(alpha) when all n p-values coincide (rho = 1): T = n g(p),
/// t_alpha = n g(alpha). Box-Cox gives y = n^(1 - 1/eta).
std::vector<RatioPoint> ratio_curve_rank_one(const TransformSpec& spec, int n, const std::vector<double>& alphas);

/// Maximum percent inflation (max over models of rate - alpha) / alpha, per
/// method and alpha, from type-I tables run on each model.
struct InflationCell {
  std::string method;
  double alpha = 0.0;
  double max_rate = 0.0;
  std::string worst_model;
  double percent_inflation = 0.0;
};
std::vector<InflationCell> inflation_grid(const std::vector<SimReport>& type1_reports);

}  // namespace heavycomb
