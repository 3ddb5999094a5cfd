// heavycomb command-line front end.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "heavycomb/discrete.hpp"
#include "heavycomb/io.hpp"
#include "heavycomb/simulation.hpp"

namespace hc = heavycomb;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct Flags {
  hc::RunConfig cfg;
  std::string config_path;
  std::string input;
  std::vector<std::string> pvalues;
  std::vector<double> weights;
  double fdr_q = 0.05;
  double bonferroni_alpha = 0.05;
  std::string hm_null = "tail";
  std::int64_t fixture_seed = -1;
  std::string format = "tsv";
};

// Options whose names match config keys, so a config value can be reported
// as overriding a flag given on the command line.
const std::vector<std::pair<std::string, std::string>> kFlagKeys{
    {"--method", "method"}, {"--eta", "eta"},         {"--delta", "delta"},
    {"--rho", "rho"},       {"--n", "n"},             {"--reps", "reps"},
    {"--seed", "seed"},     {"--alpha", "alpha"},     {"--corrected", "corrected"},
    {"--out", "out"},       {"--s", "s"},             {"--mu0", "mu0"},
    {"--p11", "p11"},       {"--null-reps", "null_reps"}, {"--clamp-epsilon", "clamp_epsilon"},
    {"--threads", "threads"}};

// One value per occurrence, so positional p-values are not swallowed.
void repeatable(CLI::Option* opt) { opt->expected(1)->allow_extra_args(false)->multi_option_policy(CLI::MultiOptionPolicy::TakeAll); }

void add_common(CLI::App* sub, Flags& f) {
  auto& c = f.cfg;
  repeatable(sub->add_option("--method", c.methods, "Combination method (repeatable)"));
  sub->add_option("--eta", c.eta, "Box-Cox exponent");
  sub->add_option("--delta", c.delta, "Truncation level of the truncated Cauchy");
  repeatable(sub->add_option("--rho", c.rhos, "Exchangeable correlation (repeatable)"));
  sub->add_option("--n", c.n, "Number of p-values per test");
  sub->add_option("--reps", c.reps, "Monte Carlo replicates");
  sub->add_option("--seed", c.seed, "Random seed");
  repeatable(sub->add_option("--alpha", c.alphas, "Significance level (repeatable)"));
  sub->add_flag("--corrected", c.corrected, "Use empirically corrected thresholds");
  sub->add_option("--out", c.out, "Output path (default stdout)");
  sub->add_option("--s", c.s, "Number of signals");
  sub->add_option("--mu0", c.mu0, "Signal mean (default sqrt(4 ln n) / s^0.1)");
  sub->add_option("--p11", c.p11, "Cell probability for the discrete study");
  sub->add_option("--null-reps", c.null_reps, "Replicates behind corrected thresholds");
  sub->add_option("--clamp-epsilon", c.clamp_epsilon, "p = 1 is moved to 1 - eps");
  sub->add_option("--threads", c.threads, "Worker threads (default HEAVYCOMB_THREADS)");
  sub->add_option("--config", f.config_path, "JSON run configuration; its keys win over flags");
}

void load_config(CLI::App* sub, Flags& f) {
  if (f.config_path.empty()) return;
  std::ifstream in(f.config_path);
  if (!in) throw hc::DomainError("cannot open config file '" + f.config_path + "'");
  hc::json j;
  try {
    j = hc::json::parse(in);
  } catch (const hc::json::parse_error& e) {
    throw hc::DomainError("config file '" + f.config_path + "' is not valid JSON: " + e.what());
  }
  for (const auto& key : hc::overlay_run_config(f.cfg, j)) {
    for (const auto& [flag, k] : kFlagKeys) {
      if (k == key && sub->count(flag) > 0)
        std::cerr << "warning: config key '" << key << "' overrides " << flag << "\n";
    }
  }
}

hc::SimOptions sim_options(const hc::RunConfig& c) {
  hc::SimOptions o;
  o.exec.threads = c.threads;
  o.null_reps = c.null_reps;
  return o;
}

std::vector<hc::CorrelationModel> models(const hc::RunConfig& c) {
  std::vector<hc::CorrelationModel> out;
  const std::vector<double> rhos = c.rhos.empty() ? std::vector<double>{0.0} : c.rhos;
  for (double r : rhos) out.push_back(r == 0.0 ? hc::CorrelationModel::independent() : hc::CorrelationModel::exchangeable(r));
  return out;
}

std::vector<hc::TransformSpec> methods_or(const hc::RunConfig& c, std::vector<std::string> fallback) {
  hc::RunConfig tmp = c;
  if (tmp.methods.empty()) tmp.methods = std::move(fallback);
  return tmp.method_specs();
}

std::vector<double> alphas_or(const hc::RunConfig& c, std::vector<double> fallback) {
  return c.alphas.empty() ? fallback : c.alphas;
}

template <class Writer>
void emit(const std::string& path, Writer&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path);
  if (!out) throw hc::DomainError("cannot open output file '" + path + "'");
  write(out);
}

hc::SimReport merge_reports(const std::vector<hc::SimReport>& parts) {
  hc::SimReport all = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) all.cells.insert(all.cells.end(), parts[i].cells.begin(), parts[i].cells.end());
  return all;
}

void emit_report(const Flags& f, const hc::SimReport& r) {
  emit(f.cfg.out, [&](std::ostream& os) {
    if (f.format == "json") os << hc::sim_report_to_json(r).dump(2) << '\n';
    else hc::write_sim_report_tsv(os, r);
  });
}

const std::vector<std::string> kDefaultMethods{"fisher", "stouffer", "minp", "hm", "cauchy", "trunc-cauchy"};

int run_combine(const Flags& f) {
  const auto& c = f.cfg;
  if (c.methods.size() != 1) throw hc::DomainError("combine takes exactly one --method");
  std::vector<double> p;
  if (!f.input.empty()) {
    if (f.input == "-") {
      p = hc::parse_pvalue_list(std::cin);
    } else {
      std::ifstream in(f.input);
      if (!in) throw hc::DomainError("cannot open input file '" + f.input + "'");
      p = hc::parse_pvalue_list(in);
    }
  }
  for (const auto& s : f.pvalues) {
    const double v = hc::parse_double(s, "p-value");
    if (!(v > 0.0 && v <= 1.0)) throw hc::DomainError("p-value outside (0,1]: '" + s + "'");
    p.push_back(v);
  }
  if (p.empty()) throw hc::DomainError("no p-values given");
  const hc::TransformSpec method = c.method_specs().front();
  const int clamped = hc::apply_clamp_policy(method, p, c.clamp_epsilon);
  hc::CombineOptions opts;
  if (!f.weights.empty()) opts.weights = f.weights;
  opts.box_cox_null = f.hm_null == "exact" ? hc::HarmonicNull::Exact : hc::HarmonicNull::TailApprox;
  if (!c.alphas.empty()) opts.alpha_hint = c.alphas.front();
  opts.seed = c.seed;
  const auto r = hc::combine(method, p, opts);
  emit(c.out, [&](std::ostream& os) { os << hc::combined_to_json(r, clamped).dump(2) << '\n'; });
  return 0;
}

int run_regions(const Flags& f) {
  const auto& c = f.cfg;
  hc::RegionTable table;
  if (!f.input.empty()) {
    std::ifstream in(f.input);
    if (!in) throw hc::DomainError("cannot open regions file '" + f.input + "'");
    table = hc::parse_region_table(in);
  } else if (f.fixture_seed >= 0) {
    table = hc::make_region_fixture(static_cast<std::uint64_t>(f.fixture_seed));
  } else {
    throw hc::DomainError("regions needs --input or --fixture-seed");
  }
  const hc::TransformSpec method = methods_or(c, {"hm"}).front();
  hc::RegionOptions opts;
  opts.fdr_q = f.fdr_q;
  opts.bonferroni_alpha = f.bonferroni_alpha;
  opts.clamp_epsilon = c.clamp_epsilon;
  opts.combine.seed = c.seed;
  const auto rows = hc::aggregate_regions(table, method, opts);
  emit(c.out, [&](std::ostream& os) { hc::write_region_results(os, rows); });
  return 0;
}

int run_type1(const Flags& f) {
  const auto& c = f.cfg;
  const auto methods = methods_or(c, kDefaultMethods);
  std::vector<hc::SimReport> parts;
  for (const auto& m : models(c))
    parts.push_back(hc::type1_table(methods, m, c.n, alphas_or(c, {0.01, 0.001}), c.reps, c.seed, sim_options(c)));
  emit_report(f, merge_reports(parts));
  return 0;
}

int run_power(const Flags& f) {
  const auto& c = f.cfg;
  const auto methods = methods_or(c, kDefaultMethods);
  hc::SignalSpec signal = hc::SignalSpec::sparse_weak(c.n, c.s);
  if (c.mu0) signal.mu0 = *c.mu0;
  std::vector<hc::SimReport> parts;
  for (const auto& m : models(c))
    parts.push_back(hc::power_table(methods, m, signal, alphas_or(c, {0.001}), c.reps, c.corrected, c.seed,
                                    sim_options(c)));
  emit_report(f, merge_reports(parts));
  return 0;
}

int run_ratio(const Flags& f) {
  const auto& c = f.cfg;
  const auto methods = methods_or(c, {"hm"});
  const auto alphas = alphas_or(c, {1e-2, 1e-3, 1e-4});
  hc::Exec exec;
  exec.threads = c.threads;
  std::vector<hc::RatioRow> rows;
  for (const auto& spec : methods) {
    for (const auto& m : models(c)) {
      const bool rank_one = m.kind == hc::CorrelationModel::Kind::Exchangeable && m.rho == 1.0;
      const auto pts = rank_one ? hc::ratio_curve_rank_one(spec, c.n, alphas)
                                : hc::ratio_curve(spec, m, c.n, alphas, c.reps, c.seed, exec);
      for (const auto& pt : pts)
        rows.push_back({spec.label(), m.label(), c.n, rank_one ? 0 : c.reps, c.seed, pt});
    }
  }
  emit(c.out, [&](std::ostream& os) { hc::write_ratio_tsv(os, rows); });
  return 0;
}

int run_calibrate(const Flags& f) {
  const auto& c = f.cfg;
  const auto methods = methods_or(c, kDefaultMethods);
  std::vector<hc::SimReport> reports;
  hc::RunConfig grid = c;
  if (grid.rhos.empty()) grid.rhos = {0.0, 0.3, 0.6, 0.9};
  for (const auto& m : models(grid))
    reports.push_back(hc::type1_table(methods, m, c.n, alphas_or(c, {0.05, 0.01}), c.reps, c.seed, sim_options(c)));
  const auto cells = hc::inflation_grid(reports);
  emit(c.out, [&](std::ostream& os) { hc::write_inflation_tsv(os, cells); });
  return 0;
}

int run_discrete(const Flags& f) {
  const auto& c = f.cfg;
  hc::DiscreteStudyOptions opts;
  opts.clamp_epsilon = c.clamp_epsilon;
  opts.sim = sim_options(c);
  const auto r = hc::discrete_study(c.p11, alphas_or(c, {0.05, 0.01, 0.001}), c.reps, c.seed, opts);
  emit_report(f, r);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heavy-tailed p-value combination"};
  app.require_subcommand(1);
  Flags f;

  struct Command {
    const char* name;
    const char* help;
    int (*run)(const Flags&);
  };
  const std::vector<Command> commands{
      {"combine", "Combine one set of p-values (JSON record)", run_combine},
      {"regions", "Per-region combination with BH and Bonferroni (TSV)", run_regions},
      {"simulate-type1", "Type-I error table (TSV)", run_type1},
      {"simulate-power", "Power table (TSV)", run_power},
      {"ratio-curve", "Dependence ratio y(alpha) curve (TSV)", run_ratio},
      {"calibrate", "Maximum percent type-I inflation over correlation levels (TSV)", run_calibrate},
      {"discrete-study", "Fisher-exact 2x2 table study (TSV)", run_discrete},
  };
  std::vector<CLI::App*> subs;
  for (const auto& cmd : commands) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    add_common(sub, f);
    subs.push_back(sub);
    const std::string name = cmd.name;
    if (name == "combine") {
      sub->add_option("pvalues", f.pvalues, "p-values");
      sub->add_option("--input", f.input, "File of whitespace-separated p-values ('-' for stdin)");
      repeatable(sub->add_option("--weight", f.weights, "Weight per p-value (repeatable)"));
      sub->add_option("--hm-null", f.hm_null, "Box-Cox/HM null: tail or exact")->check(CLI::IsMember({"tail", "exact"}));
    } else if (name == "regions") {
      sub->add_option("--input", f.input, "Region table (unit_id, region_id, p[, weight])");
      sub->add_option("--fixture-seed", f.fixture_seed, "Use the synthetic region fixture");
      sub->add_option("--fdr-q", f.fdr_q, "BH level");
      sub->add_option("--bonferroni-alpha", f.bonferroni_alpha, "Bonferroni family-wise level");
    } else if (name == "simulate-type1" || name == "simulate-power" || name == "discrete-study") {
      sub->add_option("--format", f.format, "tsv or json")->check(CLI::IsMember({"tsv", "json"}));
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (!subs[i]->parsed()) continue;
      load_config(subs[i], f);
      f.cfg.validate();
      return commands[i].run(f);
    }
  } catch (const hc::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitInput;
}
