// Acceptance suite. Runs criteria 1-10 once, then reruns all of them with a
// different worker count and requires byte-identical result tables (11).
// Prints one PASS/FAIL line per criterion; exit status is the number of
// failures (capped at 1).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "critsat/critsat.hpp"

using namespace critsat;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  std::string table;  // everything the criterion computed, for the rerun comparison
  double seconds = 0.0;
};

struct Criterion {
  int id;
  std::string title;
  double time_limit;  // seconds, 0 for none
  std::function<Outcome(std::uint64_t seed, int workers)> run;
};

std::string fmt(double x) { return format_double(x); }

std::string fixed3(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

// 1. Closed-form category law equals exhaustive enumeration over D.
Outcome criterion1(std::uint64_t, int) {
  Outcome o;
  std::int64_t checked = 0, mismatches = 0;
  std::ostringstream table;
  for (std::int64_t n = 2; n <= 30; ++n) {
    const std::int64_t d = 4 * n * (n - 1) / 2;
    for (std::int64_t f = 0; f <= n; ++f) {
      const auto counts = enumerate_category_counts(n, f);
      const auto probs = clause_category_probs(n, f).as_array();
      bool eq = true;
      for (std::size_t k = 0; k < 4; ++k) eq = eq && probs[k] == Rational(counts[k], d);
      ++checked;
      if (!eq) ++mismatches;
      table << n << "," << f << "," << counts[0] << "," << counts[1] << "," << counts[2] << "," << counts[3] << "\n";
    }
  }
  o.pass = mismatches == 0;
  o.detail = std::to_string(checked) + " (n, f) pairs, " + std::to_string(mismatches) + " mismatches";
  o.table = table.str();
  return o;
}

// 2. solve_2sat against exhaustive search on small random 2-CNFs.
Outcome criterion2(std::uint64_t seed, int workers) {
  constexpr std::int64_t kTrials = 10000;
  const auto cs = cell_seed(seed, "acceptance-solver", {});
  struct R {
    std::uint8_t agree = 0, witness_ok = 0, sat = 0;
  };
  auto res = run_trials(kTrials, workers, [&](std::int64_t t) {
    auto rng = derive_stream(cs, static_cast<std::uint64_t>(t));
    const auto n = static_cast<std::int32_t>(2 + rng.below(11));  // 2..12
    const auto m = static_cast<std::int64_t>(rng.below(31));       // 0..30
    const CnfFormula phi = sample_formula({n, m, 2}, rng);
    const Verdict v = solve_2sat(phi);
    const BruteForceResult bf = brute_force_sat(phi);
    R r;
    r.sat = bf.sat;
    r.agree = v.sat() == bf.sat;
    r.witness_ok = !v.sat() || (v.witness && evaluate(phi, *v.witness));
    return r;
  });
  std::int64_t agree = 0, witness_ok = 0, sat = 0;
  std::string table;
  for (const auto& r : res) {
    agree += r.agree;
    witness_ok += r.witness_ok;
    sat += r.sat;
    table += static_cast<char>('0' + r.sat);
  }
  Outcome o;
  o.pass = agree == kTrials && witness_ok == kTrials;
  o.detail = std::to_string(agree) + "/" + std::to_string(kTrials) + " agree, " + std::to_string(witness_ok) +
             " witnesses valid, " + std::to_string(sat) + " SAT instances";
  o.table = table;
  return o;
}

// 3. Round-by-round propagation plus residual solve decides Phi_L exactly.
Outcome criterion3(std::uint64_t seed, int workers) {
  constexpr std::int64_t kTrials = 10000;
  const auto cs = cell_seed(seed, "acceptance-decomposition", {});
  struct R {
    std::uint8_t agree = 0, sat = 0, outcome = 0;
  };
  auto res = run_trials(kTrials, workers, [&](std::int64_t t) {
    auto rng = derive_stream(cs, static_cast<std::uint64_t>(t));
    const auto n = static_cast<std::int32_t>(2 + rng.below(11));
    const auto m = static_cast<std::int64_t>(rng.below(3 * static_cast<std::uint64_t>(n) + 1));
    const auto f = static_cast<std::int32_t>(rng.below(static_cast<std::uint64_t>(n) + 1));
    const CnfFormula phi = sample_formula({n, m, 2}, rng);
    const FixedSet fixed = sample_fixed_set(n, f, rng);
    const PropagationTrace trace = propagate(phi, fixed);
    const bool truth = brute_force_sat(with_units(phi, fixed)).sat;
    R r;
    r.sat = truth;
    r.agree = trace.satisfiable() == std::optional<bool>(truth);
    r.outcome = static_cast<std::uint8_t>(trace.outcome);
    return r;
  });
  std::int64_t agree = 0, sat = 0;
  std::map<int, std::int64_t> outcomes;
  std::string table;
  for (const auto& r : res) {
    agree += r.agree;
    sat += r.sat;
    ++outcomes[r.outcome];
    table += static_cast<char>('0' + r.sat);
    table += static_cast<char>('0' + r.outcome);
  }
  Outcome o;
  o.pass = agree == kTrials;
  o.detail = std::to_string(agree) + "/" + std::to_string(kTrials) + " agree (" + std::to_string(sat) +
             " SAT; contradiction " + std::to_string(outcomes[0]) + ", exhausted " + std::to_string(outcomes[1]) +
             ", capped " + std::to_string(outcomes[2]) + ")";
  o.table = table;
  return o;
}

// 4. The relabelling G preserves satisfiability per instance and maps the
//    uniform law on D to itself.
Outcome criterion4(std::uint64_t seed, int workers) {
  constexpr std::int64_t kInstances = 1000;
  const auto cs = cell_seed(seed, "acceptance-coupling", {});
  auto res = run_trials(kInstances, workers, [&](std::int64_t t) {
    auto rng = derive_stream(cs, static_cast<std::uint64_t>(t));
    const auto n = static_cast<std::int32_t>(2 + rng.below(9));  // 2..10
    const auto m = static_cast<std::int64_t>(rng.below(3 * static_cast<std::uint64_t>(n) + 1));
    const auto f = static_cast<std::int32_t>(rng.below(static_cast<std::uint64_t>(n) + 1));
    const CnfFormula phi = sample_formula({n, m, 2}, rng);
    const FixedSet fixed = sample_fixed_set(n, f, rng);
    const Coupling g = relabel_coupling(phi, fixed);
    const bool lhs = brute_force_sat(with_units(phi, fixed)).sat;
    const bool rhs = brute_force_sat(with_units(g.formula, g.canonical)).sat;
    return static_cast<std::uint8_t>((lhs == rhs ? 2 : 0) + (lhs ? 1 : 0));
  });
  std::int64_t agree = 0;
  std::string table;
  for (auto r : res) {
    agree += r >> 1;
    table += static_cast<char>('0' + r);
  }

  // Chi-square of G(Phi, L) clause frequencies, n = 4, m = 1, against the
  // uniform law on the 24 clauses of D.
  constexpr std::int32_t n = 4;
  constexpr std::int64_t kSamples = 100000;
  std::map<std::pair<std::int32_t, std::int32_t>, std::size_t> index;
  for (std::int32_t a = 1; a <= n; ++a)
    for (std::int32_t b = a + 1; b <= n; ++b)
      for (std::int32_t sa : {1, -1})
        for (std::int32_t sb : {1, -1}) index.emplace(std::pair{sa * a, sb * b}, index.size());
  const auto cs2 = cell_seed(seed, "acceptance-coupling-chi", {});
  auto cells = run_trials(kSamples, workers, [&](std::int64_t t) {
    auto rng = derive_stream(cs2, static_cast<std::uint64_t>(t));
    const CnfFormula phi = sample_formula({n, 1, 2}, rng);
    const auto f = static_cast<std::int32_t>(rng.below(n + 1));
    const FixedSet fixed = sample_fixed_set(n, f, rng);
    const Clause c = relabel_coupling(phi, fixed).formula[0];
    return static_cast<std::int32_t>(index.at({c[0].value(), c[1].value()}));
  });
  std::vector<std::int64_t> observed(index.size(), 0);
  for (auto c : cells) ++observed[static_cast<std::size_t>(c)];
  const std::vector<double> probs(index.size(), 1.0 / static_cast<double>(index.size()));
  const ChiSquareResult chi = chi_square_gof(observed, probs);
  for (auto c : observed) table += "," + std::to_string(c);

  Outcome o;
  o.pass = agree == kInstances && chi.passes(0.001);
  o.detail = std::to_string(agree) + "/" + std::to_string(kInstances) + " instances agree; chi2 = " +
             fixed3(chi.statistic) + " (df " + std::to_string(chi.df) + ", p = " + fixed3(chi.p_value) + ")";
  o.table = table;
  return o;
}

// 5. Category counts follow Multinomial(m, p(n, f)).
Outcome criterion5(std::uint64_t seed, int workers) {
  const DistributionReport rep = run_distribution_check(100, 10, 100, 100000, seed, workers);
  Outcome o;
  o.pass = rep.passes(0.001);
  std::ostringstream d, t;
  d << "z = (";
  for (std::size_t k = 0; k < 4; ++k) d << (k ? ", " : "") << fixed3(rep.z[k]);
  d << "), chi2 = " << fixed3(rep.chi.statistic) << " (df " << rep.chi.df << ", p = " << fixed3(rep.chi.p_value) << ")";
  for (std::size_t k = 0; k < 4; ++k) t << rep.pooled_counts[k] << "," << fmt(rep.empirical_var[k]) << ";";
  o.detail = d.str();
  o.table = t.str();
  return o;
}

// 6. P(F_1(n, m) in SAT) >= (1 - m/n)^m, and P(F_1(2, 2) in SAT) = 3/4.
Outcome criterion6(std::uint64_t seed, int workers) {
  constexpr std::int64_t kTrials = 10000;
  auto estimate = [&](std::int32_t n, std::int64_t m) {
    const auto cs = cell_seed(seed, "acceptance-1sat", {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(m)});
    auto res = run_trials(kTrials, workers, [&](std::int64_t t) {
      auto rng = derive_stream(cs, static_cast<std::uint64_t>(t));
      const CnfFormula phi = sample_formula({n, m, 1}, rng);
      std::vector<Literal> units;
      for (const auto& c : phi.clauses()) units.push_back(c[0]);
      return static_cast<std::uint8_t>(solve_1sat(units).sat());
    });
    std::int64_t sat = 0;
    for (auto r : res) sat += r;
    return sat;
  };
  bool pass = true;
  std::ostringstream table;
  double worst_margin = std::numeric_limits<double>::infinity();
  std::string worst_cell;
  int cells = 0;
  for (std::int32_t n : {4, 8, 16}) {
    for (std::int64_t m = 0; m <= n; ++m) {
      const std::int64_t sat = estimate(n, m);
      ++cells;
      const double p = static_cast<double>(sat) / kTrials;
      const double sigma = binomial_stderr(p, kTrials);
      const double bound = one_sat_bound(n, m);
      const double margin = p - (bound - 3.0 * sigma);
      if (margin < 0.0) pass = false;
      if (margin < worst_margin) {
        worst_margin = margin;
        worst_cell = "(" + std::to_string(n) + "," + std::to_string(m) + ")";
      }
      table << n << "," << m << "," << sat << "\n";
    }
  }
  const std::int64_t small = estimate(2, 2);
  const double p22 = static_cast<double>(small) / kTrials;
  table << "2,2," << small << "\n";
  const bool small_ok = std::fabs(p22 - 0.75) <= 0.02;
  Outcome o;
  o.pass = pass && small_ok;
  o.detail = "bound holds on all " + std::to_string(cells) + " cells: " + std::string(pass ? "yes" : "no") + " (tightest " + worst_cell +
             ", margin " + fixed3(worst_margin) + "); P(F1(2,2) SAT) = " + fixed3(p22);
  o.table = table.str();
  return o;
}

// Linear interpolation of the first downward crossing of `level` by the
// curve (q_i, p_i), or nullopt if it does not cross within the grid.
std::optional<double> crossing(const std::vector<const SweepRow*>& rows, double level) {
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const double p0 = rows[i]->p_hat, p1 = rows[i + 1]->p_hat;
    if (p0 >= level && p1 < level) return *rows[i]->q + (p0 - level) / (p0 - p1) * (*rows[i + 1]->q - *rows[i]->q);
  }
  return std::nullopt;
}

// 7. Shape of the q sweep at desk scale.
Outcome criterion7(std::uint64_t seed, int workers) {
  SweepConfig cfg;  // n in {1e3, 1e4, 1e5}, q in {0.05, ..., 0.50}, 2000 trials, alpha 1
  cfg.seed = seed;
  cfg.workers = workers;
  AuditSummary audit;
  const SweepTable table = run_figure2_sweep(cfg, &audit, [](const std::string& msg) { std::cerr << "  " << msg << "\n"; });
  const std::string id = cfg.experiment_id();

  std::map<std::int32_t, std::vector<const SweepRow*>> curves;
  std::map<std::int32_t, const SweepRow*> baseline;
  for (const auto& r : table.rows) {
    if (r.q)
      curves[r.n].push_back(&r);
    else
      baseline[r.n] = &r;
  }

  std::ostringstream d;
  // (a) non-increasing in q up to 3 sigma
  bool a_ok = true;
  double worst_rise = -1.0;
  for (auto& [n, rows] : curves) {
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
      const double rise = (rows[i + 1]->p_hat - rows[i]->p_hat) / pooled_sigma(rows[i]->stderr_, rows[i + 1]->stderr_);
      worst_rise = std::max(worst_rise, rise);
      if (rise > 3.0) a_ok = false;
    }
  }
  d << "(a) " << (a_ok ? "ok" : "FAIL") << " max rise " << fixed3(worst_rise) << " sigma; ";

  // (b) the 0.75 -> 0.25 baseline transition width shrinks strictly with n
  bool b_ok = true;
  std::optional<double> prev_width;
  d << "(b) widths";
  for (auto& [n, rows] : curves) {
    const double base = baseline.at(n)->p_hat;
    const auto hi = crossing(rows, 0.75 * base);
    const auto lo = crossing(rows, 0.25 * base);
    if (!hi || !lo) {
      b_ok = false;
      d << " n=" << n << ":undefined";
      continue;
    }
    const double width = *lo - *hi;
    d << " n=" << n << ":" << fixed3(width);
    if (prev_width && !(width < *prev_width)) b_ok = false;
    prev_width = width;
  }
  d << (b_ok ? " ok; " : " FAIL; ");

  // (c) separation across q = 1/3
  const SweepRow* small45 = table.find(id, 1000, 0.45);
  const SweepRow* large45 = table.find(id, 100000, 0.45);
  const double sep = (small45->p_hat - large45->p_hat) / pooled_sigma(small45->stderr_, large45->stderr_);
  bool c_ok = sep > 3.0;
  d << "(c) q=0.45 gap " << fixed3(sep) << " sigma";
  for (auto& [n, rows] : curves) {
    const SweepRow* r15 = table.find(id, n, 0.15);
    const SweepRow* b = baseline.at(n);
    const double z = (b->p_hat - r15->p_hat) / pooled_sigma(b->stderr_, r15->stderr_);
    d << ", n=" << n << " q=0.15 vs baseline " << fixed3(r15->p_hat) << "/" << fixed3(b->p_hat) << " (" << fixed3(z)
      << " sigma)";
    if (std::fabs(z) > 3.0) c_ok = false;
  }
  d << (c_ok ? " ok" : " FAIL");
  d << "; audit " << audit.mismatches << "/" << audit.audited << " mismatches";

  Outcome o;
  o.pass = a_ok && b_ok && c_ok;
  o.detail = d.str();
  o.table = to_csv(table);
  return o;
}

// 8. At alpha = 1 both outcomes keep appearing as n grows.
Outcome criterion8(std::uint64_t seed, int workers) {
  WindowConfig cfg;
  cfg.n_list = {1000, 10000, 100000};
  cfg.alpha_list = {1.0};
  cfg.trials = 2000;
  cfg.seed = seed;
  cfg.workers = workers;
  const SweepTable table = run_window_study(cfg);
  bool pass = true;
  std::ostringstream d;
  for (const auto& r : table.rows) {
    const std::int64_t unsat = r.trials - r.sat_count;
    if (r.sat_count < 5 || unsat < 5) pass = false;
    d << "n=" << r.n << ": " << r.sat_count << " SAT / " << unsat << " UNSAT; ";
  }
  Outcome o;
  o.pass = pass;
  o.detail = d.str();
  o.table = to_csv(table);
  return o;
}

// 9. Critical Poisson(1) branching: t P(survive t) -> 2 and P(X_1 = 0) = 1/e.
Outcome criterion9(std::uint64_t seed, int workers) {
  const GwSurvival s100 = gw_survival(1, 100, 1000000, seed, workers);
  const GwSurvival s1 = gw_survival(1, 1, 100000, seed, workers);
  const double scaled = 100.0 * s100.estimate;
  const double extinct1 = 1.0 - s1.estimate;
  Outcome o;
  o.pass = scaled >= 1.7 && scaled <= 2.3 && std::fabs(extinct1 - std::exp(-1.0)) <= 0.005;
  o.detail = "100 P(survive 100) = " + fixed3(scaled) + " (want [1.7, 2.3]); P(X1 = 0) = " + fixed3(extinct1) +
             " (want " + fixed3(std::exp(-1.0)) + " +- 0.005)";
  o.table = std::to_string(s100.survivors) + "," + std::to_string(s1.survivors);
  return o;
}

// 10. Unit chains die out below q = 1/3 and persist above.
Outcome criterion10(std::uint64_t seed, int workers) {
  TrajectoryConfig cfg;
  cfg.n = 100000;
  cfg.q_list = {0.20, 0.45};
  cfg.trials = 2000;
  cfg.seed = seed;
  cfg.workers = workers;
  const auto stats = run_trajectory_study(cfg);
  const TrajectoryStats& lo = stats[0];
  const TrajectoryStats& hi = stats[1];
  const double gap = (lo.extinct_fraction() - hi.extinct_fraction()) /
                     pooled_sigma(lo.extinct_stderr(), hi.extinct_stderr());
  Outcome o;
  o.pass = lo.extinct_fraction() >= 0.9 && gap > 3.0;
  std::ostringstream d, t;
  for (const auto* s : {&lo, &hi}) {
    d << "q=" << fmt(s->q) << " (f=" << s->f << ", cap " << s->round_cap << "): extinct " << fixed3(s->extinct_fraction())
      << ", contradicted " << s->contradicted << ", capped " << s->capped << "; ";
    t << s->extinct << "," << s->contradicted << "," << s->capped << ";";
    for (const auto& [r, c] : s->extinction_hist) t << r << ":" << c << " ";
    for (const auto& [r, c] : s->contradiction_hist) t << r << ":" << c << " ";
    for (const auto& rq : s->per_round) t << rq.p10 << "/" << rq.p50 << "/" << rq.p90 << "/" << fmt(rq.mean_m1) << " ";
    t << "\n";
  }
  d << "gap " << fixed3(gap) << " sigma";
  o.detail = d.str();
  o.table = t.str();
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"critsat acceptance suite"};
  std::uint64_t seed = 20240611;
  int workers = 0;
  int rerun_workers = 0;
  std::vector<int> only;
  app.add_option("--seed", seed, "master seed");
  app.add_option("--workers", workers, "worker threads for the first pass (default: $CRITSAT_WORKERS or all cores)");
  app.add_option("--rerun-workers", rerun_workers, "worker threads for the reproducibility pass (default: first + 2)");
  app.add_option("--only", only, "run only these criteria (1-10); 11 still reruns them");
  CLI11_PARSE(app, argc, argv);

  const int first = resolve_workers(workers);
  const int second = rerun_workers > 0 ? rerun_workers : first + 2;

  const std::vector<Criterion> criteria{
      {1, "category law equals enumeration (n <= 30)", 10.0, criterion1},
      {2, "2-SAT solver agrees with brute force", 30.0, criterion2},
      {3, "propagation decomposition is exact", 0.0, criterion3},
      {4, "relabelling coupling", 0.0, criterion4},
      {5, "multinomial category law", 120.0, criterion5},
      {6, "1-SAT lower bound", 0.0, criterion6},
      {7, "q sweep shape at desk scale", 1800.0, criterion7},
      {8, "scaling window at alpha = 1", 0.0, criterion8},
      {9, "critical Galton-Watson survival", 0.0, criterion9},
      {10, "unit-chain extinction contrast", 0.0, criterion10},
  };
  auto selected = [&](int id) { return only.empty() || std::find(only.begin(), only.end(), id) != only.end(); };

  std::cout << "seed " << seed << ", workers " << first << " (rerun with " << second << ")\n" << std::flush;
  int failures = 0;
  std::map<int, Outcome> first_pass;
  for (const auto& c : criteria) {
    if (!selected(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(seed, first);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string timing = fixed3(o.seconds) + " s";
    if (c.time_limit > 0.0) {
      timing += " (limit " + fmt(c.time_limit) + " s)";
      if (o.seconds > c.time_limit) o.pass = false;
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.title << " -- " << o.detail << " ["
              << timing << "]\n"
              << std::flush;
    if (!o.pass) ++failures;
    first_pass[c.id] = std::move(o);
  }

  std::vector<int> differing;
  for (const auto& c : criteria) {
    if (!selected(c.id)) continue;
    Outcome o;
    try {
      o = c.run(seed, second);
    } catch (const std::exception& e) {
      o.table = std::string("exception: ") + e.what();
    }
    if (o.table != first_pass[c.id].table || o.table.empty()) differing.push_back(c.id);
    std::cerr << "  rerun of criterion " << c.id << " done\n";
  }
  std::string diff_list;
  for (int id : differing) diff_list += (diff_list.empty() ? "" : ",") + std::to_string(id);
  const bool repro = differing.empty();
  std::cout << (repro ? "PASS" : "FAIL") << " criterion 11: reproducibility across worker counts -- "
            << first_pass.size() << " criteria rerun with " << second << " workers, "
            << (repro ? "all tables identical" : "tables differ for " + diff_list) << "\n";
  if (!repro) ++failures;

  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " criteria failed") << "\n";
  return failures == 0 ? 0 : 1;
}
