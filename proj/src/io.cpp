#include "heavycomb/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "heavycomb/multiple_testing.hpp"
#include "heavycomb/rng.hpp"

namespace heavycomb {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

bool is_blank(const std::string& s) { return s.find_first_not_of(" \t") == std::string::npos; }

std::string at_line(std::size_t lineno) { return " (line " + std::to_string(lineno) + ")"; }

void check_header(const std::string& header, const std::vector<std::string>& expected, const std::string& what) {
  if (split_tabs(header) == expected) return;
  std::string want;
  for (const auto& e : expected) want += (want.empty() ? "" : ",") + e;
  throw DomainError(what + ": expected header columns " + want);
}

std::uint64_t parse_seed(const std::string& field) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || res.ec != std::errc() || res.ptr != field.data() + field.size())
    throw DomainError("invalid seed: '" + field + "'");
  return v;
}

template <class F>
void for_each_row(std::istream& in, std::size_t ncols, const std::string& what, F&& f) {
  std::string line;
  std::size_t lineno = 1;
  while (next_line(in, line)) {
    ++lineno;
    if (is_blank(line)) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != ncols) throw DomainError(what + ": expected " + std::to_string(ncols) + " fields" + at_line(lineno));
    f(fields, lineno);
  }
}

bool parse_flag(const std::string& s, const std::string& what) {
  if (s == "1") return true;
  if (s == "0") return false;
  throw DomainError("invalid flag for " + what + ": '" + s + "'");
}

// --- json helpers with key-named errors ---

double json_number(const json& v, const std::string& key) {
  if (!v.is_number()) throw DomainError("config key '" + key + "' must be a number");
  return v.get<double>();
}

std::int64_t json_integer(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw DomainError("config key '" + key + "' must be an integer");
  return v.get<std::int64_t>();
}

std::vector<double> json_number_list(const json& v, const std::string& key) {
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) throw DomainError("config key '" + key + "' must be a number or an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) out.push_back(json_number(e, key));
  return out;
}

template <class T>
T json_field(const json& j, const char* key) {
  if (!j.contains(key)) throw DomainError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw DomainError(std::string("field '") + key + "' has the wrong type");
  }
}

}  // namespace

// --- methods and clamping ---------------------------------------------------

std::string method_key(const TransformSpec& spec) {
  switch (spec.kind) {
    case TransformKind::Fisher: return "fisher";
    case TransformKind::Stouffer: return "stouffer";
    case TransformKind::MinP: return "minp";
    case TransformKind::BoxCox: return spec.eta == 1.0 ? "hm" : "boxcox";
    case TransformKind::Cauchy: return "cauchy";
    case TransformKind::TruncCauchy: return "trunc-cauchy";
    case TransformKind::InvGamma: return "invgamma";
    case TransformKind::LogGamma: return "loggamma";
    case TransformKind::HigherCriticism: return "hc";
    case TransformKind::BerkJones: return "bj";
  }
  return "?";
}

json method_to_json(const TransformSpec& spec) {
  json j{{"name", method_key(spec)}, {"label", spec.label()}};
  switch (spec.kind) {
    case TransformKind::BoxCox: j["eta"] = spec.eta; break;
    case TransformKind::TruncCauchy: j["delta"] = spec.delta; break;
    case TransformKind::InvGamma:
    case TransformKind::LogGamma:
      j["shape"] = spec.shape;
      j["scale"] = spec.scale;
      break;
    default: break;
  }
  return j;
}

TransformSpec method_from_json(const json& j) {
  TransformSpec d;
  if (j.contains("eta")) d.eta = json_field<double>(j, "eta");
  if (j.contains("delta")) d.delta = json_field<double>(j, "delta");
  if (j.contains("shape")) d.shape = json_field<double>(j, "shape");
  if (j.contains("scale")) d.scale = json_field<double>(j, "scale");
  return parse_method(json_field<std::string>(j, "name"), d);
}

int apply_clamp_policy(const TransformSpec& method, std::vector<double>& pvals, double eps) {
  if (!(eps > 0.0 && eps < 1e-3)) throw DomainError("clamp_epsilon must be in (0, 1e-3)");
  if (method.kind == TransformKind::TruncCauchy) return 0;
  int moved = 0;
  for (double& p : pvals) {
    if (p == 1.0) {
      p = 1.0 - eps;
      ++moved;
    }
  }
  return moved;
}

// --- numbers ----------------------------------------------------------------

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& field, const std::string& what) {
  double v = 0.0;
  const char* b = field.data();
  const char* e = b + field.size();
  if (b != e && *b == '+') ++b;
  const auto res = std::from_chars(b, e, v);
  if (field.empty() || res.ec != std::errc() || res.ptr != e)
    throw DomainError("invalid number for " + what + ": '" + field + "'");
  return v;
}

std::int64_t parse_int(const std::string& field, const std::string& what) {
  std::int64_t v = 0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || res.ec != std::errc() || res.ptr != field.data() + field.size())
    throw DomainError("invalid integer for " + what + ": '" + field + "'");
  return v;
}

std::vector<double> parse_pvalue_list(std::istream& in) {
  std::vector<double> out;
  std::string tok;
  while (in >> tok) {
    const double p = parse_double(tok, "p-value");
    if (!(p > 0.0 && p <= 1.0)) throw DomainError("p-value outside (0,1]: '" + tok + "'");
    out.push_back(p);
  }
  if (out.empty()) throw DomainError("empty p-value list");
  return out;
}

// --- combination record -----------------------------------------------------

json combined_to_json(const CombinedResult& r, int clamped_count) {
  json j{{"method", r.method.label()},
         {"method_spec", method_to_json(r.method)},
         {"n", r.n},
         {"T", r.statistic},
         {"p_combined", r.combined_p},
         {"route", route_name(r.route)}};
  if (r.bounds) j["bounds"] = {{"lower", r.bounds->lower}, {"upper", r.bounds->upper}};
  if (r.std_error) j["stderr"] = *r.std_error;
  j["in_validated_range"] = r.in_validated_range;
  j["clamped_to_bounds"] = r.clamped_to_bounds;
  j["low_precision"] = r.low_precision;
  j["weight_rescale"] = r.weight_rescale;
  j["clamped_count"] = clamped_count;
  return j;
}

CombinedResult combined_from_json(const json& j, int* clamped_count) {
  CombinedResult r;
  if (!j.contains("method_spec")) throw DomainError("missing field 'method_spec'");
  r.method = method_from_json(j.at("method_spec"));
  r.n = json_field<int>(j, "n");
  r.statistic = json_field<double>(j, "T");
  r.combined_p = json_field<double>(j, "p_combined");
  r.route = parse_route(json_field<std::string>(j, "route"));
  if (j.contains("bounds")) {
    const auto& b = j.at("bounds");
    r.bounds = Bounds{json_field<double>(b, "lower"), json_field<double>(b, "upper")};
  }
  if (j.contains("stderr")) r.std_error = json_field<double>(j, "stderr");
  r.in_validated_range = json_field<bool>(j, "in_validated_range");
  r.clamped_to_bounds = json_field<bool>(j, "clamped_to_bounds");
  r.low_precision = json_field<bool>(j, "low_precision");
  r.weight_rescale = json_field<double>(j, "weight_rescale");
  if (clamped_count) *clamped_count = json_field<int>(j, "clamped_count");
  return r;
}

// --- region tables ----------------------------------------------------------

RegionTable parse_region_table(std::istream& in) {
  std::string header;
  if (!next_line(in, header) || is_blank(header)) throw DomainError("empty regions file");
  const auto cols = split_tabs(header);
  int unit_col = -1, region_col = -1, p_col = -1, weight_col = -1;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    int* slot = cols[i] == "unit_id" ? &unit_col
                : cols[i] == "region_id" ? &region_col
                : cols[i] == "p" ? &p_col
                : cols[i] == "weight" ? &weight_col
                : nullptr;
    if (!slot) throw DomainError("regions file: unknown column '" + cols[i] + "'");
    if (*slot >= 0) throw DomainError("regions file: duplicate column '" + cols[i] + "'");
    *slot = static_cast<int>(i);
  }
  if (unit_col < 0 || region_col < 0 || p_col < 0)
    throw DomainError("regions file: header needs unit_id, region_id and p");

  RegionTable t;
  t.has_weights = weight_col >= 0;
  std::set<std::pair<std::string, std::string>> seen;
  for_each_row(in, cols.size(), "regions file", [&](const std::vector<std::string>& f, std::size_t lineno) {
    RegionRow row;
    row.unit_id = f[unit_col];
    row.region_id = f[region_col];
    if (row.unit_id.empty() || row.region_id.empty()) throw DomainError("regions file: empty id" + at_line(lineno));
    if (!seen.emplace(row.unit_id, row.region_id).second)
      throw DomainError("regions file: duplicate unit '" + row.unit_id + "' in region '" + row.region_id + "'" +
                        at_line(lineno));
    if (f[p_col] != "NA") {
      const double p = parse_double(f[p_col], "p" + at_line(lineno));
      if (!(p > 0.0 && p <= 1.0)) throw DomainError("regions file: p outside (0,1]" + at_line(lineno));
      row.p = p;
    }
    if (t.has_weights) {
      const double w = parse_double(f[weight_col], "weight" + at_line(lineno));
      if (!(w > 0.0) || !std::isfinite(w)) throw DomainError("regions file: weight must be positive" + at_line(lineno));
      row.weight = w;
    }
    t.rows.push_back(std::move(row));
  });
  if (t.rows.empty()) throw DomainError("empty regions file");
  return t;
}

void write_region_table(std::ostream& out, const RegionTable& t) {
  out << "unit_id\tregion_id\tp" << (t.has_weights ? "\tweight" : "") << '\n';
  for (const auto& r : t.rows) {
    out << r.unit_id << '\t' << r.region_id << '\t' << (r.p ? format_double(*r.p) : "NA");
    if (t.has_weights) out << '\t' << format_double(r.weight.value_or(1.0));
    out << '\n';
  }
}

std::vector<RegionResult> aggregate_regions(const RegionTable& t, const TransformSpec& method,
                                            const RegionOptions& opts) {
  if (t.rows.empty()) throw DomainError("empty regions file");
  struct Group {
    std::vector<double> p;
    std::vector<double> w;
  };
  std::map<std::string, Group> groups;
  for (const auto& r : t.rows) {
    auto& g = groups[r.region_id];
    if (!r.p) continue;
    g.p.push_back(*r.p);
    if (t.has_weights) g.w.push_back(r.weight.value_or(1.0));
  }

  std::vector<RegionResult> out;
  out.reserve(groups.size());
  for (auto& [id, g] : groups) {
    if (g.p.empty()) throw DomainError("region '" + id + "' has no parseable p-values");
    RegionResult rr;
    rr.region_id = id;
    rr.n_units = static_cast<int>(g.p.size());
    rr.clamped_count = apply_clamp_policy(method, g.p, opts.clamp_epsilon);
    CombineOptions co = opts.combine;
    if (t.has_weights) co.weights = g.w;
    const CombinedResult c = combine(method, g.p, co);
    rr.statistic = c.statistic;
    rr.combined_p = c.combined_p;
    rr.route = c.route;
    out.push_back(std::move(rr));
  }

  std::vector<double> ps;
  for (const auto& r : out) ps.push_back(r.combined_p);
  const auto q = bh_adjust(ps);
  const auto bonf = bonferroni(ps, opts.bonferroni_alpha);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].q_value = q[i];
    out[i].bh_significant = q[i] <= opts.fdr_q;
    out[i].bonferroni_significant = bonf[i];
  }
  return out;
}

namespace {
const std::vector<std::string> kRegionResultHeader{
    "region_id", "n_units", "T", "p_combined", "route", "q_value", "bh_significant", "bonferroni_significant",
    "clamped_count"};
}

void write_region_results(std::ostream& out, const std::vector<RegionResult>& rows) {
  for (std::size_t i = 0; i < kRegionResultHeader.size(); ++i) out << (i ? "\t" : "") << kRegionResultHeader[i];
  out << '\n';
  for (const auto& r : rows) {
    out << r.region_id << '\t' << r.n_units << '\t' << format_double(r.statistic) << '\t'
        << format_double(r.combined_p) << '\t' << route_name(r.route) << '\t' << format_double(r.q_value) << '\t'
        << (r.bh_significant ? 1 : 0) << '\t' << (r.bonferroni_significant ? 1 : 0) << '\t' << r.clamped_count
        << '\n';
  }
}

std::vector<RegionResult> parse_region_results(std::istream& in) {
  std::string header;
  if (!next_line(in, header)) throw DomainError("region results: empty input");
  check_header(header, kRegionResultHeader, "region results");
  std::vector<RegionResult> out;
  for_each_row(in, kRegionResultHeader.size(), "region results", [&](const auto& f, std::size_t) {
    RegionResult r;
    r.region_id = f[0];
    r.n_units = static_cast<int>(parse_int(f[1], "n_units"));
    r.statistic = parse_double(f[2], "T");
    r.combined_p = parse_double(f[3], "p_combined");
    r.route = parse_route(f[4]);
    r.q_value = parse_double(f[5], "q_value");
    r.bh_significant = parse_flag(f[6], "bh_significant");
    r.bonferroni_significant = parse_flag(f[7], "bonferroni_significant");
    r.clamped_count = static_cast<int>(parse_int(f[8], "clamped_count"));
    out.push_back(std::move(r));
  });
  return out;
}

RegionTable make_region_fixture(std::uint64_t seed, int null_regions) {
  if (null_regions < 0) throw DomainError("fixture: null_regions must be >= 0");
  Rng rng = make_rng(seed, Stream::Fixture, 0);
  RegionTable t;
  auto add = [&](const std::string& region, int& k, double p) {
    t.rows.push_back({region + "_u" + std::to_string(k++), region, p, std::nullopt});
  };
  auto log_uniform = [&](double lo, double hi) { return std::exp(std::log(lo) + rng.uniform() * std::log(hi / lo)); };
  auto signal_region = [&](const std::string& region, int size, int strong, double strong_lo,
                           const std::vector<double>& near_one) {
    int k = 0;
    for (int i = 0; i < strong; ++i) add(region, k, log_uniform(strong_lo, 1e-4));
    for (double p : near_one) add(region, k, p);
    const int rest = size - strong - static_cast<int>(near_one.size());
    for (int i = 0; i < rest; ++i) add(region, k, 1e-3 + rng.uniform() * (0.99 - 1e-3));
  };
  signal_region("SLC2A9", 520, 17, 1e-5, {0.995, 0.9999, 1.0 - 1e-6, 1.0 - 1e-7, 1.0});
  signal_region("PCSK6", 540, 8, 1e-6,
                {0.991, 0.993, 0.995, 0.997, 0.999, 0.9999, 1.0 - 1e-5, 1.0 - 1e-6, 1.0 - 1e-7});
  for (int r = 0; r < null_regions; ++r) {
    char name[16];
    std::snprintf(name, sizeof name, "R%03d", r + 1);
    const int size = 20 + static_cast<int>(rng.uniform() * 581);
    int k = 0;
    for (int i = 0; i < size; ++i) add(name, k, rng.uniform());
  }
  return t;
}

// --- simulation reports -----------------------------------------------------

json sim_report_to_json(const SimReport& r) {
  json cells = json::array();
  for (const auto& c : r.cells) {
    cells.push_back({{"method", c.method},
                     {"model", c.model},
                     {"alpha", c.alpha},
                     {"rejection_rate", c.rejection_rate},
                     {"mc_se", c.mc_se},
                     {"reps", c.reps},
                     {"seed", c.seed},
                     {"threshold", c.threshold_used},
                     {"threshold_kind", threshold_kind_name(c.threshold_kind)}});
  }
  return {{"experiment", r.experiment}, {"n", r.n}, {"cells", cells}};
}

SimReport sim_report_from_json(const json& j) {
  SimReport r;
  r.experiment = json_field<std::string>(j, "experiment");
  r.n = json_field<int>(j, "n");
  if (!j.contains("cells") || !j.at("cells").is_array()) throw DomainError("missing field 'cells'");
  for (const auto& e : j.at("cells")) {
    SimCell c;
    c.method = json_field<std::string>(e, "method");
    c.model = json_field<std::string>(e, "model");
    c.alpha = json_field<double>(e, "alpha");
    c.rejection_rate = json_field<double>(e, "rejection_rate");
    c.mc_se = json_field<double>(e, "mc_se");
    c.reps = json_field<std::int64_t>(e, "reps");
    c.seed = json_field<std::uint64_t>(e, "seed");
    c.threshold_used = json_field<double>(e, "threshold");
    c.threshold_kind = parse_threshold_kind(json_field<std::string>(e, "threshold_kind"));
    r.cells.push_back(std::move(c));
  }
  return r;
}

namespace {
const std::vector<std::string> kSimHeader{"experiment", "n",    "method", "model",     "alpha",         "rejection_rate",
                                          "mc_se",      "reps", "seed",   "threshold", "threshold_kind"};
const std::vector<std::string> kRatioHeader{"method", "model", "n", "reps", "seed", "alpha", "t_alpha", "y", "log_y"};
}  // namespace

void write_sim_report_tsv(std::ostream& out, const SimReport& r) {
  for (std::size_t i = 0; i < kSimHeader.size(); ++i) out << (i ? "\t" : "") << kSimHeader[i];
  out << '\n';
  for (const auto& c : r.cells) {
    out << r.experiment << '\t' << r.n << '\t' << c.method << '\t' << c.model << '\t' << format_double(c.alpha)
        << '\t' << format_double(c.rejection_rate) << '\t' << format_double(c.mc_se) << '\t' << c.reps << '\t'
        << c.seed << '\t' << format_double(c.threshold_used) << '\t' << threshold_kind_name(c.threshold_kind)
        << '\n';
  }
}

SimReport parse_sim_report_tsv(std::istream& in) {
  std::string header;
  if (!next_line(in, header)) throw DomainError("sim report: empty input");
  check_header(header, kSimHeader, "sim report");
  SimReport r;
  bool first = true;
  for_each_row(in, kSimHeader.size(), "sim report", [&](const auto& f, std::size_t lineno) {
    const int n = static_cast<int>(parse_int(f[1], "n"));
    if (first) {
      r.experiment = f[0];
      r.n = n;
      first = false;
    } else if (f[0] != r.experiment || n != r.n) {
      throw DomainError("sim report: mixed experiments" + at_line(lineno));
    }
    SimCell c;
    c.method = f[2];
    c.model = f[3];
    c.alpha = parse_double(f[4], "alpha");
    c.rejection_rate = parse_double(f[5], "rejection_rate");
    c.mc_se = parse_double(f[6], "mc_se");
    c.reps = parse_int(f[7], "reps");
    c.seed = parse_seed(f[8]);
    c.threshold_used = parse_double(f[9], "threshold");
    c.threshold_kind = parse_threshold_kind(f[10]);
    r.cells.push_back(std::move(c));
  });
  return r;
}

void write_ratio_tsv(std::ostream& out, const std::vector<RatioRow>& rows) {
  for (std::size_t i = 0; i < kRatioHeader.size(); ++i) out << (i ? "\t" : "") << kRatioHeader[i];
  out << '\n';
  for (const auto& r : rows) {
    out << r.method << '\t' << r.model << '\t' << r.n << '\t' << r.reps << '\t' << r.seed << '\t'
        << format_double(r.point.alpha) << '\t' << format_double(r.point.t_alpha) << '\t' << format_double(r.point.y)
        << '\t' << format_double(r.point.log_y) << '\n';
  }
}

std::vector<RatioRow> parse_ratio_tsv(std::istream& in) {
  std::string header;
  if (!next_line(in, header)) throw DomainError("ratio curve: empty input");
  check_header(header, kRatioHeader, "ratio curve");
  std::vector<RatioRow> out;
  for_each_row(in, kRatioHeader.size(), "ratio curve", [&](const auto& f, std::size_t) {
    RatioRow r;
    r.method = f[0];
    r.model = f[1];
    r.n = static_cast<int>(parse_int(f[2], "n"));
    r.reps = parse_int(f[3], "reps");
    r.seed = parse_seed(f[4]);
    r.point.alpha = parse_double(f[5], "alpha");
    r.point.t_alpha = parse_double(f[6], "t_alpha");
    r.point.y = parse_double(f[7], "y");
    r.point.log_y = parse_double(f[8], "log_y");
    out.push_back(std::move(r));
  });
  return out;
}

void write_inflation_tsv(std::ostream& out, const std::vector<InflationCell>& rows) {
  out << "method\talpha\tmax_rate\tworst_model\tpercent_inflation\n";
  for (const auto& r : rows) {
    out << r.method << '\t' << format_double(r.alpha) << '\t' << format_double(r.max_rate) << '\t' << r.worst_model
        << '\t' << format_double(r.percent_inflation) << '\n';
  }
}

// --- run configuration ------------------------------------------------------

void RunConfig::validate() const {
  if (n < 1) throw DomainError("n must be >= 1");
  if (reps < 1) throw DomainError("reps must be >= 1");
  if (null_reps < 1) throw DomainError("null_reps must be >= 1");
  for (double a : alphas) {
    if (!(a > 0.0 && a < 1.0)) throw DomainError("alpha must be in (0,1)");
  }
  for (double r : rhos) {
    if (!(r > -1.0 && r <= 1.0)) throw DomainError("rho must be in (-1,1]");
  }
  if (!(eta > 0.0)) throw DomainError("eta must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must be in (0,1)");
  if (s < 0 || s > n) throw DomainError("s must be in [0, n]");
  if (mu0 && !(*mu0 >= 0.0 && std::isfinite(*mu0))) throw DomainError("mu0 must be >= 0");
  if (!(p11 >= 0.0 && p11 < 1.0)) throw DomainError("p11 must be in [0,1)");
  if (!(clamp_epsilon > 0.0 && clamp_epsilon < 1e-3)) throw DomainError("clamp_epsilon must be in (0, 1e-3)");
  if (threads < 0) throw DomainError("threads must be >= 0");
  method_specs();
}

std::vector<TransformSpec> RunConfig::method_specs() const {
  TransformSpec d;
  d.eta = eta;
  d.delta = delta;
  std::vector<TransformSpec> out;
  for (const auto& m : methods) out.push_back(parse_method(m, d));
  return out;
}

std::vector<std::string> overlay_run_config(RunConfig& c, const json& j) {
  if (!j.is_object()) throw DomainError("config must be a JSON object");
  std::vector<std::string> applied;
  for (const auto& [key, v] : j.items()) {
    if (key == "method") {
      c.methods.clear();
      if (v.is_string()) {
        c.methods.push_back(v.get<std::string>());
      } else if (v.is_array()) {
        for (const auto& e : v) {
          if (!e.is_string()) throw DomainError("config key 'method' must hold strings");
          c.methods.push_back(e.get<std::string>());
        }
      } else {
        throw DomainError("config key 'method' must be a string or an array of strings");
      }
    } else if (key == "eta") {
      c.eta = json_number(v, key);
    } else if (key == "delta") {
      c.delta = json_number(v, key);
    } else if (key == "rho") {
      c.rhos = json_number_list(v, key);
    } else if (key == "n") {
      c.n = static_cast<int>(json_integer(v, key));
    } else if (key == "reps") {
      c.reps = json_integer(v, key);
    } else if (key == "seed") {
      if (!v.is_number_unsigned()) throw DomainError("config key 'seed' must be a non-negative integer");
      c.seed = v.get<std::uint64_t>();
    } else if (key == "alpha") {
      c.alphas = json_number_list(v, key);
    } else if (key == "corrected") {
      if (!v.is_boolean()) throw DomainError("config key 'corrected' must be a boolean");
      c.corrected = v.get<bool>();
    } else if (key == "out") {
      if (!v.is_string()) throw DomainError("config key 'out' must be a string");
      c.out = v.get<std::string>();
    } else if (key == "s") {
      c.s = static_cast<int>(json_integer(v, key));
    } else if (key == "mu0") {
      c.mu0 = json_number(v, key);
    } else if (key == "p11") {
      c.p11 = json_number(v, key);
    } else if (key == "null_reps") {
      c.null_reps = json_integer(v, key);
    } else if (key == "clamp_epsilon") {
      c.clamp_epsilon = json_number(v, key);
    } else if (key == "threads") {
      c.threads = static_cast<int>(json_integer(v, key));
    } else {
      throw DomainError("unknown config key '" + key + "'");
    }
    applied.push_back(key);
  }
  return applied;
}

RunConfig run_config_from_json(const json& j) {
  RunConfig c;
  overlay_run_config(c, j);
  return c;
}

json run_config_to_json(const RunConfig& c) {
  json j{{"method", c.methods},  {"eta", c.eta},           {"delta", c.delta},         {"rho", c.rhos},
         {"n", c.n},             {"reps", c.reps},         {"seed", c.seed},           {"alpha", c.alphas},
         {"corrected", c.corrected}, {"out", c.out},       {"s", c.s},                 {"p11", c.p11},
         {"null_reps", c.null_reps}, {"clamp_epsilon", c.clamp_epsilon}, {"threads", c.threads}};
  if (c.mu0) j["mu0"] = *c.mu0;
  return j;
}

}  // namespace heavycomb
