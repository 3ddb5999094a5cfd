#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "heavycomb/null_models.hpp"
#include "heavycomb/simulation.hpp"

namespace heavycomb {

using nlohmann::json;

inline constexpr double kDefaultClampEpsilon = 1e-15;

/// Name accepted by parse_method ("hm", "boxcox", "trunc-cauchy", ...).
std::string method_key(const TransformSpec& spec);
json method_to_json(const TransformSpec& spec);
TransformSpec method_from_json(const json& j);

/// Moves p = 1 to 1 - eps for every method except the truncated Cauchy,
/// whose g(1) is finite. Returns the number of values moved.
int apply_clamp_policy(const TransformSpec& method, std::vector<double>& pvals, double eps = kDefaultClampEpsilon);

/// Shortest text that parses back to the same double.
std::string format_double(double v);
/// Strict parse of a whole field; throws DomainError naming `what`.
double parse_double(const std::string& field, const std::string& what);
std::int64_t parse_int(const std::string& field, const std::string& what);

/// Whitespace-separated p-values.
std::vector<double> parse_pvalue_list(std::istream& in);

// --- single combination record ---------------------------------------------

json combined_to_json(const CombinedResult& r, int clamped_count = 0);
CombinedResult combined_from_json(const json& j, int* clamped_count = nullptr);

// --- region tables ----------------------------------------------------------

struct RegionRow {
  std::string unit_id;
  std::string region_id;
  std::optional<double> p;  // empty for "NA"
  std::optional<double> weight;

  bool operator==(const RegionRow&) const = default;
};

/// Header "unit_id<TAB>region_id<TAB>p" with an optional "weight" column,
/// columns in any order. p is "NA" or a number in (0,1].
struct RegionTable {
  std::vector<RegionRow> rows;
  bool has_weights = false;

  bool operator==(const RegionTable&) const = default;
};

RegionTable parse_region_table(std::istream& in);
void write_region_table(std::ostream& out, const RegionTable& t);

struct RegionResult {
  std::string region_id;
  int n_units = 0;
  double statistic = 0.0;
  double combined_p = 1.0;
  Route route = Route::Exact;
  double q_value = 1.0;
  bool bh_significant = false;
  bool bonferroni_significant = false;
  int clamped_count = 0;

  bool operator==(const RegionResult&) const = default;
};

struct RegionOptions {
  double fdr_q = 0.05;
  double bonferroni_alpha = 0.05;
  double clamp_epsilon = kDefaultClampEpsilon;
  CombineOptions combine;
};

/// One combined p per region, BH q-values and Bonferroni flags across
/// regions; rows sorted by region_id.
std::vector<RegionResult> aggregate_regions(const RegionTable& t, const TransformSpec& method,
                                            const RegionOptions& opts = {});

void write_region_results(std::ostream& out, const std::vector<RegionResult>& rows);
std::vector<RegionResult> parse_region_results(std::istream& in);

/// Synthetic regions: "SLC2A9" (520 units, 17 with p < 1e-4, 5 with
/// p > 0.99 including one exact 1), "PCSK6" (540 units, 8 with p < 1e-4,
/// 9 with p > 0.99), and `null_regions` regions of uniform p-values.
RegionTable make_region_fixture(std::uint64_t seed, int null_regions = 40);

// --- simulation reports -----------------------------------------------------

json sim_report_to_json(const SimReport& r);
SimReport sim_report_from_json(const json& j);
/// Long format, one row per cell, with the experiment and n repeated.
void write_sim_report_tsv(std::ostream& out, const SimReport& r);
SimReport parse_sim_report_tsv(std::istream& in);

struct RatioRow {
  std::string method;
  std::string model;
  int n = 0;
  std::int64_t reps = 0;
  std::uint64_t seed = 0;
  RatioPoint point;

  bool operator==(const RatioRow&) const = default;
};
void write_ratio_tsv(std::ostream& out, const std::vector<RatioRow>& rows);
std::vector<RatioRow> parse_ratio_tsv(std::istream& in);

void write_inflation_tsv(std::ostream& out, const std::vector<InflationCell>& rows);

// --- run configuration ------------------------------------------------------

/// Keys mirror the command-line flags: method, eta, delta, rho, n, reps,
/// seed, alpha, corrected, out, plus s, mu0, p11, null_reps, clamp_epsilon,
/// threads. method, rho and alpha take a scalar or an array.
struct RunConfig {
  std::vector<std::string> methods;
  double eta = 1.0;
  double delta = 0.01;
  std::vector<double> rhos;
  int n = 100;
  std::int64_t reps = 100'000;
  std::uint64_t seed = 1;
  std::vector<double> alphas;
  bool corrected = false;
  std::string out;
  int s = 0;
  std::optional<double> mu0;
  double p11 = 0.0;
  std::int64_t null_reps = 1'000'000;
  double clamp_epsilon = kDefaultClampEpsilon;
  int threads = 0;

  bool operator==(const RunConfig&) const = default;

  /// Throws DomainError if a value is outside its documented range.
  void validate() const;
  std::vector<TransformSpec> method_specs() const;
};

/// Throws DomainError naming the first unknown key.
RunConfig run_config_from_json(const json& j);
json run_config_to_json(const RunConfig& c);
/// Overlays the keys present in `j` onto `base`; returns the keys applied.
std::vector<std::string> overlay_run_config(RunConfig& base, const json& j);

}  // namespace heavycomb
