// critsat: command-line front end for the random 2-SAT fixing toolkit.
//
// Exit codes: 0 success, 10 SAT / 20 UNSAT (solve), 64 usage or invalid
// input, 74 I/O failure, 70 internal error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "critsat/critsat.hpp"

using namespace critsat;
using nlohmann::json;

namespace {

constexpr int kExitSat = 10;
constexpr int kExitUnsat = 20;
constexpr int kExitUsage = 64;
constexpr int kExitInternal = 70;
constexpr int kExitIo = 74;

struct Options {
  std::int32_t n = 0;
  std::int64_t m = -1;
  std::int32_t k = 2;
  std::optional<std::int32_t> f;
  std::vector<double> q;
  std::vector<double> alpha;
  std::vector<std::int32_t> n_list;
  std::int64_t trials = -1;
  std::uint64_t seed = 1;
  int workers = 0;
  std::string format;
  std::string out;
  std::string config;
  std::string mode = "plain";
  std::string fixing = "uniform";
  std::string fix;
  std::string input = "-";
  std::string regime = "over";
  std::string plot;
  std::optional<std::int64_t> round_cap;
  std::int64_t x0 = 1;
  std::int64_t gen = 100;
  bool enumerate = false;
  bool quiet = false;
};

void emit(const Options& o, const std::string& text) {
  if (o.out.empty())
    std::cout << text << std::flush;
  else
    atomic_write(o.out, text);
}

CnfFormula read_formula(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return parse_dimacs(ss.str());
  }
  return parse_dimacs(read_file(path));
}

FixedSet parse_fixed(const std::string& spec) {
  std::vector<Literal> lits;
  std::string tok;
  std::istringstream in(spec);
  while (std::getline(in, tok, ',')) {
    if (tok.empty()) continue;
    std::int32_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || v == 0)
      throw Error(ErrorKind::SyntaxError, "bad literal '" + tok + "' in --fix");
    lits.emplace_back(v);
  }
  return FixedSet(std::move(lits));
}

// Fixed set from --fix, or a uniform random one of size --f drawn from --seed.
FixedSet choose_fixed(const Options& o, std::int32_t n) {
  if (!o.fix.empty() && o.f) throw Error(ErrorKind::InvalidSpec, "give either --fix or --f, not both");
  if (!o.fix.empty()) {
    FixedSet fixed = parse_fixed(o.fix);
    fixed.check_range(n);
    return fixed;
  }
  if (o.f) {
    if (*o.f < 0 || *o.f > n) throw Error(ErrorKind::InvalidSpec, "--f must lie in [0, n]");
    auto rng = derive_stream(cell_seed(o.seed, "cli-fix", {}), 0);
    return sample_fixed_set(n, *o.f, rng);
  }
  return {};
}

PropagationMode parse_mode(const std::string& m) {
  if (m == "plain") return PropagationMode::Plain;
  if (m == "proof" || m == "proof-faithful") return PropagationMode::ProofFaithful;
  throw Error(ErrorKind::InvalidSpec, "unknown --mode '" + m + "' (plain | proof)");
}

TableFormat parse_table_format(const std::string& f) {
  if (f.empty() || f == "csv") return TableFormat::Csv;
  if (f == "json") return TableFormat::Json;
  throw Error(ErrorKind::InvalidSpec, "unknown --format '" + f + "' (csv | json)");
}

ProgressFn progress_fn(const Options& o) {
  if (o.quiet) return {};
  return [](const std::string& msg) { std::cerr << "[critsat] " << msg << "\n"; };
}

std::string table_text(const SweepTable& table, TableFormat format) {
  return format == TableFormat::Csv ? to_csv(table) : to_json(table).dump(2) + "\n";
}

int cmd_generate(const Options& o) {
  SampleSpec spec{o.n, o.m, o.k};
  spec.validate();
  auto rng = derive_stream(cell_seed(o.seed, "cli-generate", {}), 0);
  emit(o, write_dimacs(sample_formula(spec, rng)));
  return 0;
}

int cmd_solve(const Options& o) {
  const CnfFormula phi = read_formula(o.input);
  bool sat = false;
  std::optional<Assignment> witness;
  if (phi.max_width() <= 2) {
    Verdict v = solve_2sat(phi);
    sat = v.sat();
    witness = std::move(v.witness);
  } else {
    // Wider clauses fall back to exhaustive search, so n is bounded.
    sat = brute_force_sat(phi).sat;
    if (sat) {
      const auto n = phi.n_vars();
      for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        Assignment x(static_cast<std::size_t>(n));
        for (std::int32_t v = 1; v <= n; ++v) x.set(v, (mask >> (v - 1)) & 1u);
        if (evaluate(phi, x)) {
          witness = x;
          break;
        }
      }
    }
  }
  std::ostringstream out;
  if (o.format == "json") {
    json j = {{"status", sat ? "SAT" : "UNSAT"}};
    if (witness) {
      std::vector<std::int32_t> lits;
      for (std::int32_t v = 1; v <= phi.n_vars(); ++v) lits.push_back((*witness)[v] ? v : -v);
      j["witness"] = lits;
    }
    out << j.dump() << "\n";
  } else {
    out << "s " << (sat ? "SATISFIABLE" : "UNSATISFIABLE") << "\n";
    if (witness) {
      out << "v";
      for (std::int32_t v = 1; v <= phi.n_vars(); ++v) out << " " << ((*witness)[v] ? v : -v);
      out << " 0\n";
    }
  }
  emit(o, out.str());
  return sat ? kExitSat : kExitUnsat;
}

int cmd_fix(const Options& o) {
  const CnfFormula phi = read_formula(o.input);
  const FixedSet fixed = choose_fixed(o, phi.n_vars());
  std::ostringstream out;
  out << "c fixed";
  for (Literal l : fixed) out << " " << l.value();
  out << "\n" << write_dimacs(with_units(phi, fixed));
  emit(o, out.str());
  return 0;
}

int cmd_propagate(const Options& o) {
  const CnfFormula phi = read_formula(o.input);
  const FixedSet fixed = choose_fixed(o, phi.n_vars());
  PropagateOptions opts;
  opts.round_cap = o.round_cap;
  PropagationTrace trace;
  if (parse_mode(o.mode) == PropagationMode::Plain) {
    trace = propagate(phi, fixed, opts);
  } else {
    auto rng = derive_stream(cell_seed(o.seed, "cli-propagate", {}), 0);
    trace = propagate_proof_faithful(phi, fixed, opts, rng);
  }
  std::string text;
  for (const auto& r : trace.rounds) text += to_json(r).dump() + "\n";
  text += verdict_json(trace).dump() + "\n";
  emit(o, text);
  return 0;
}

int cmd_probs(const Options& o) {
  if (!o.f) throw Error(ErrorKind::InvalidSpec, "probs needs --f");
  json j = {{"n", o.n}, {"f", *o.f}, {"probs", to_json(clause_category_probs(o.n, *o.f))}};
  if (o.enumerate) {
    const auto c = enumerate_category_counts(o.n, *o.f);
    j["counts"] = {{"m0", c[0]}, {"m1", c[1]}, {"m2", c[2]}, {"mstar", c[3]}};
  }
  emit(o, j.dump(2) + "\n");
  return 0;
}

int cmd_gw(const Options& o) {
  const std::int64_t trials = o.trials < 0 ? 100000 : o.trials;
  const GwSurvival s = gw_survival(o.x0, o.gen, trials, o.seed, o.workers);
  json j = to_json(s);
  j["x0"] = o.x0;
  j["generations"] = o.gen;
  j["scaled_estimate"] = static_cast<double>(o.gen) * s.estimate;
  emit(o, j.dump(2) + "\n");
  return 0;
}

int cmd_budget(const Options& o) {
  if (o.q.size() != 1) throw Error(ErrorKind::InvalidSpec, "budget needs exactly one --q");
  BudgetRegime regime;
  if (o.regime == "over") regime = BudgetRegime::Over;
  else if (o.regime == "under") regime = BudgetRegime::Under;
  else throw Error(ErrorKind::InvalidSpec, "unknown --regime '" + o.regime + "' (over | under)");
  emit(o, to_json(rounds_budget(o.n, o.q[0], regime)).dump(2) + "\n");
  return 0;
}

int cmd_sweep(const Options& o, const CLI::App& sub) {
  SweepConfig cfg;
  if (!o.config.empty()) cfg = sweep_config_from_json(json::parse(read_file(o.config), nullptr, true, true));
  if (sub.count("--n")) cfg.n_list = o.n_list;
  if (sub.count("--q")) cfg.q_list = o.q;
  if (sub.count("--alpha")) {
    if (o.alpha.size() != 1) throw Error(ErrorKind::InvalidSpec, "sweep takes a single --alpha");
    cfg.alpha = o.alpha[0];
  }
  if (sub.count("--trials")) cfg.trials = o.trials;
  if (sub.count("--seed")) cfg.seed = o.seed;
  if (sub.count("--workers")) cfg.workers = o.workers;
  if (sub.count("--mode")) cfg.mode = parse_mode(o.mode);
  if (sub.count("--fixing")) {
    if (o.fixing == "uniform") cfg.fixing = FixingMode::Uniform;
    else if (o.fixing == "canonical") cfg.fixing = FixingMode::Canonical;
    else throw Error(ErrorKind::InvalidSpec, "unknown --fixing '" + o.fixing + "'");
  }
  if (o.f) cfg.f_override = o.f;
  cfg.validate();
  const TableFormat format = parse_table_format(o.format);

  AuditSummary audit;
  const SweepTable table = run_figure2_sweep(cfg, &audit, progress_fn(o));
  if (!o.quiet)
    std::cerr << "[critsat] audit: " << audit.mismatches << " mismatches in " << audit.audited << " audited trials\n";
  if (audit.mismatches > 0) throw std::logic_error("propagation verdict disagreed with direct solve");
  emit(o, table_text(table, format));
  if (!o.out.empty()) atomic_write(o.out + ".config.json", to_json(cfg).dump(2) + "\n");
  if (!o.plot.empty()) emit_plot(table, o.plot);
  return 0;
}

int cmd_window(const Options& o) {
  WindowConfig cfg;
  if (!o.n_list.empty()) cfg.n_list = o.n_list;
  if (!o.alpha.empty()) cfg.alpha_list = o.alpha;
  if (o.trials >= 0) cfg.trials = o.trials;
  cfg.seed = o.seed;
  cfg.workers = o.workers;
  const TableFormat format = parse_table_format(o.format);
  emit(o, table_text(run_window_study(cfg, progress_fn(o)), format));
  return 0;
}

int cmd_trajectory(const Options& o) {
  TrajectoryConfig cfg;
  if (o.n_list.size() > 1) throw Error(ErrorKind::InvalidSpec, "trajectory takes a single --n");
  if (!o.n_list.empty()) cfg.n = o.n_list[0];
  if (!o.q.empty()) cfg.q_list = o.q;
  if (o.alpha.size() > 1) throw Error(ErrorKind::InvalidSpec, "trajectory takes a single --alpha");
  if (!o.alpha.empty()) cfg.alpha = o.alpha[0];
  if (o.trials >= 0) cfg.trials = o.trials;
  cfg.f_override = o.f;
  cfg.seed = o.seed;
  cfg.workers = o.workers;
  cfg.mode = parse_mode(o.mode);
  cfg.round_cap = o.round_cap;
  json out = json::array();
  for (const auto& s : run_trajectory_study(cfg, progress_fn(o))) out.push_back(to_json(s));
  emit(o, out.dump(2) + "\n");
  return 0;
}

int cmd_distcheck(const Options& o) {
  if (!o.f) throw Error(ErrorKind::InvalidSpec, "distcheck needs --f");
  const std::int64_t samples = o.trials < 0 ? 100000 : o.trials;
  const DistributionReport rep = run_distribution_check(o.n, *o.f, o.m < 0 ? o.n : o.m, samples, o.seed, o.workers);
  emit(o, to_json(rep).dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random 2-SAT under variable fixing: sampling, solving, propagation and experiments."};
  app.require_subcommand(1);
  Options o;

  auto out_opt = [&](CLI::App* s) { s->add_option("--out", o.out, "write output to this file (atomically) instead of stdout"); };
  auto seed_opt = [&](CLI::App* s) { s->add_option("--seed", o.seed, "master seed")->capture_default_str(); };
  auto workers_opt = [&](CLI::App* s) {
    s->add_option("--workers", o.workers, std::string("worker threads (default: $") + kWorkersEnvVar + " or all cores)");
  };
  auto input_opt = [&](CLI::App* s) { s->add_option("input", o.input, "DIMACS CNF file, - for stdin")->capture_default_str(); };

  auto* gen = app.add_subcommand("generate", "sample F_k(n, m) and print it as DIMACS");
  gen->add_option("--n", o.n, "number of variables")->required();
  gen->add_option("--m", o.m, "number of clauses")->required();
  gen->add_option("--k", o.k, "clause width")->capture_default_str();
  seed_opt(gen);
  out_opt(gen);

  auto* solve = app.add_subcommand("solve", "decide a CNF (linear time for width <= 2); exit 10 SAT, 20 UNSAT");
  input_opt(solve);
  solve->add_option("--format", o.format, "text (s/v lines) or json");
  out_opt(solve);

  auto* fix = app.add_subcommand("fix", "append unit clauses for a fixed literal set and print the DIMACS");
  input_opt(fix);
  fix->add_option("--fix", o.fix, "comma-separated literals, e.g. -3,4");
  fix->add_option("--f", o.f, "fix this many uniformly random literals instead");
  seed_opt(fix);
  out_opt(fix);

  auto* prop = app.add_subcommand("propagate", "round-by-round unit propagation; JSON line per round, then the verdict");
  input_opt(prop);
  prop->add_option("--fix", o.fix, "comma-separated literals, e.g. -3,4");
  prop->add_option("--f", o.f, "fix this many uniformly random literals instead");
  prop->add_option("--mode", o.mode, "plain or proof (truncate/pad the residual each round)")->capture_default_str();
  prop->add_option("--round-cap", o.round_cap, "maximum number of rounds (default n)");
  seed_opt(prop);
  out_opt(prop);

  auto* probs = app.add_subcommand("probs", "exact clause category probabilities under L = [n] \\ [n-f]");
  probs->add_option("--n", o.n, "number of variables")->required();
  probs->add_option("--f", o.f, "number of fixed variables")->required();
  probs->add_flag("--enumerate", o.enumerate, "also count categories by enumerating every clause");
  out_opt(probs);

  auto* gw = app.add_subcommand("gw", "survival of the critical Poisson(1) Galton-Watson process");
  gw->add_option("--x0", o.x0, "initial population")->capture_default_str();
  gw->add_option("--gen", o.gen, "generations")->capture_default_str();
  gw->add_option("--trials", o.trials, "independent runs (default 100000)");
  seed_opt(gw);
  workers_opt(gw);
  out_opt(gw);

  auto* budget = app.add_subcommand("budget", "propagation round budget for f = n^q");
  budget->add_option("--n", o.n, "number of variables")->required();
  budget->add_option("--q", o.q, "fixing exponent in (0, 1/2]")->required()->expected(1);
  budget->add_option("--regime", o.regime, "over or under")->capture_default_str();
  out_opt(budget);

  auto* sweep = app.add_subcommand("sweep", "P(SAT) against q = log_n f at alpha = 1, with an unfixed baseline");
  sweep->add_option("--config", o.config, "JSON file with sweep settings; flags override it");
  sweep->add_option("--n", o.n_list, "variable counts")->expected(1, -1);
  sweep->add_option("--q", o.q, "fixing exponents")->expected(1, -1);
  sweep->add_option("--alpha", o.alpha, "clause density")->expected(1);
  sweep->add_option("--f", o.f, "fix exactly this many variables in every cell");
  sweep->add_option("--trials", o.trials, "trials per cell");
  sweep->add_option("--mode", o.mode, "plain or proof");
  sweep->add_option("--fixing", o.fixing, "uniform or canonical fixed sets");
  sweep->add_option("--format", o.format, "csv or json");
  sweep->add_option("--plot", o.plot, "also write an SVG plot here");
  sweep->add_flag("--quiet", o.quiet, "no progress on stderr");
  seed_opt(sweep);
  workers_opt(sweep);
  out_opt(sweep);

  auto* window = app.add_subcommand("window", "plain P(F_2(n, alpha n) in SAT) over a grid");
  window->add_option("--n", o.n_list, "variable counts")->expected(1, -1);
  window->add_option("--alpha", o.alpha, "clause densities")->expected(1, -1);
  window->add_option("--trials", o.trials, "trials per cell (default 2000)");
  window->add_option("--format", o.format, "csv or json");
  window->add_flag("--quiet", o.quiet, "no progress on stderr");
  seed_opt(window);
  workers_opt(window);
  out_opt(window);

  auto* traj = app.add_subcommand("trajectory", "per-round unit counts M_1 and extinction statistics");
  traj->add_option("--n", o.n_list, "number of variables (default 100000)")->expected(1);
  traj->add_option("--q", o.q, "fixing exponents (default 0.2 0.45)")->expected(1, -1);
  traj->add_option("--f", o.f, "fix exactly this many variables");
  traj->add_option("--alpha", o.alpha, "clause density")->expected(1);
  traj->add_option("--trials", o.trials, "trials per q (default 2000)");
  traj->add_option("--mode", o.mode, "plain or proof")->capture_default_str();
  traj->add_option("--round-cap", o.round_cap, "rounds per trial (default floor(n^(1-2q) ln n))");
  traj->add_flag("--quiet", o.quiet, "no progress on stderr");
  seed_opt(traj);
  workers_opt(traj);
  out_opt(traj);

  auto* dist = app.add_subcommand("distcheck", "category counts against the multinomial law");
  dist->add_option("--n", o.n, "number of variables")->required();
  dist->add_option("--f", o.f, "number of fixed variables")->required();
  dist->add_option("--m", o.m, "clauses per formula (default n)");
  dist->add_option("--trials", o.trials, "number of sampled formulas (default 100000)");
  seed_opt(dist);
  workers_opt(dist);
  out_opt(dist);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_generate(o);
    if (solve->parsed()) return cmd_solve(o);
    if (fix->parsed()) return cmd_fix(o);
    if (prop->parsed()) return cmd_propagate(o);
    if (probs->parsed()) return cmd_probs(o);
    if (gw->parsed()) return cmd_gw(o);
    if (budget->parsed()) return cmd_budget(o);
    if (sweep->parsed()) return cmd_sweep(o, *sweep);
    if (window->parsed()) return cmd_window(o);
    if (traj->parsed()) return cmd_trajectory(o);
    if (dist->parsed()) return cmd_distcheck(o);
  } catch (const Error& e) {
    std::cerr << "critsat: " << e.what() << "\n";
    return e.kind() == ErrorKind::IoError ? kExitIo : kExitUsage;
  } catch (const json::exception& e) {
    std::cerr << "critsat: bad JSON: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "critsat: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
