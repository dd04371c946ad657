#pragma once

// Monte Carlo studies of random 2-SAT with fixed variables.
//
// Every trial draws from its own stream, derive_stream(cell_seed, trial),
// where cell_seed hashes the master seed with the experiment name and the
// cell coordinates. Results are stored by trial index and reduced in index
// order, so the worker count never changes an output.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <functional>
#include <limits>
#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <type_traits>
#include <vector>

#include "critsat/formula.hpp"
#include "critsat/propagation.hpp"
#include "critsat/rng.hpp"
#include "critsat/sampling.hpp"
#include "critsat/solve.hpp"
#include "critsat/stats.hpp"
#include "critsat/theory.hpp"

namespace critsat {

inline constexpr const char* kWorkersEnvVar = "CRITSAT_WORKERS";

// Explicit count if positive, else $CRITSAT_WORKERS, else the hardware
// concurrency.
inline int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv(kWorkersEnvVar)) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(t) for t in [0, trials) on up to `workers` threads and returns the
// results indexed by t.
template <class Fn>
auto run_trials(std::int64_t trials, int workers, Fn&& fn) {
  using Result = decltype(fn(std::int64_t{0}));
  static_assert(!std::is_same_v<Result, bool>, "vector<bool> is not safe for concurrent writes");
  std::vector<Result> results(static_cast<std::size_t>(std::max<std::int64_t>(trials, 0)));
  if (trials <= 0) return results;
  const int threads = static_cast<int>(std::min<std::int64_t>(resolve_workers(workers), trials));
  if (threads <= 1) {
    for (std::int64_t t = 0; t < trials; ++t) results[static_cast<std::size_t>(t)] = fn(t);
    return results;
  }
  std::atomic<std::int64_t> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::int64_t t = next++; t < trials; t = next++) results[static_cast<std::size_t>(t)] = fn(t);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
          next = trials;
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

inline std::uint64_t double_bits(double x) {
  std::uint64_t bits;
  std::memcpy(&bits, &x, sizeof bits);
  return bits;
}

inline std::uint64_t cell_seed(std::uint64_t master, std::string_view experiment,
                               std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a
  for (char c : experiment) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  h = splitmix64_mix(master ^ h);
  for (auto k : keys) h = splitmix64_mix(h ^ k);
  return h;
}

// f = floor(n^q), with q = 0 meaning a single fixed variable.
inline std::int32_t fixed_count(std::int32_t n, double q) {
  if (q == 0.0) return std::min<std::int32_t>(1, n);
  const auto f = static_cast<std::int32_t>(std::floor(std::pow(static_cast<double>(n), q) + 1e-9));
  return std::clamp<std::int32_t>(f, 0, n);
}

enum class PropagationMode { Plain, ProofFaithful };
enum class FixingMode { Uniform, Canonical };

inline std::string_view to_string(PropagationMode m) { return m == PropagationMode::Plain ? "plain" : "proof-faithful"; }
inline std::string_view to_string(FixingMode m) { return m == FixingMode::Uniform ? "uniform" : "canonical"; }

using ProgressFn = std::function<void(const std::string&)>;

struct SweepRow {
  std::string experiment_id;
  std::int32_t n = 0;
  double alpha = 1.0;
  std::optional<double> q;  // empty for unfixed rows
  std::int32_t f = 0;
  std::int64_t trials = 0;
  std::int64_t sat_count = 0;
  double p_hat = 0.0;
  double stderr_ = 0.0;
  std::uint64_t seed = 0;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct SweepTable {
  std::vector<SweepRow> rows;

  const SweepRow* find(std::string_view experiment, std::int32_t n, std::optional<double> q) const {
    for (const auto& r : rows)
      if (r.experiment_id == experiment && r.n == n && r.q == q) return &r;
    return nullptr;
  }
  friend bool operator==(const SweepTable&, const SweepTable&) = default;
};

inline SweepRow make_row(std::string experiment, std::int32_t n, double alpha, std::optional<double> q,
                         std::int32_t f, std::int64_t trials, std::int64_t sat, std::uint64_t seed) {
  SweepRow row{std::move(experiment), n, alpha, q, f, trials, sat, 0.0, 0.0, seed};
  row.p_hat = trials > 0 ? static_cast<double>(sat) / static_cast<double>(trials) : 0.0;
  row.stderr_ = binomial_stderr(row.p_hat, trials);
  return row;
}

struct SweepConfig {
  std::vector<std::int32_t> n_list{1000, 10000, 100000};
  std::vector<double> q_list{0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45, 0.50};
  double alpha = 1.0;
  std::int64_t trials = 2000;
  std::uint64_t seed = 1;
  PropagationMode mode = PropagationMode::Plain;
  FixingMode fixing = FixingMode::Uniform;
  std::optional<std::int32_t> f_override;
  bool include_baseline = true;
  int workers = 0;

  void validate() const {
    if (trials < 1) throw Error(ErrorKind::InvalidSpec, "trials must be >= 1");
    if (!(alpha > 0.0)) throw Error(ErrorKind::InvalidSpec, "alpha must be positive");
    if (n_list.empty() || q_list.empty()) throw Error(ErrorKind::InvalidSpec, "n_list and q_list must be nonempty");
    for (auto n : n_list)
      if (n < 2) throw Error(ErrorKind::InvalidSpec, "every n must be >= 2");
    for (double q : q_list)
      if (!(q >= 0.0 && q < 1.0)) throw Error(ErrorKind::InvalidSpec, "every q must lie in [0, 1)");
    if (f_override) {
      for (auto n : n_list)
        if (*f_override < 0 || *f_override > n) throw Error(ErrorKind::InvalidSpec, "f override out of range");
    }
  }

  std::string experiment_id() const {
    std::string id = "figure2";
    if (fixing == FixingMode::Canonical) id += "-canonical";
    if (mode == PropagationMode::ProofFaithful) id += "-proof";
    return id;
  }
};

// Cross-check of the propagation verdict against a direct 2-SAT solve of
// the formula with the fixed literals added as units.
struct AuditSummary {
  std::int64_t audited = 0;
  std::int64_t mismatches = 0;
};

inline constexpr std::int32_t kAuditMaxVars = 1000;
inline constexpr std::int64_t kAuditStride = 100;

namespace detail {

inline std::int64_t clause_count(std::int32_t n, double alpha) {
  return static_cast<std::int64_t>(std::floor(alpha * static_cast<double>(n)));
}

struct SweepTrial {
  bool sat = false;
  bool audited = false;
  bool mismatch = false;
};

inline SweepTrial fixed_trial(std::int32_t n, std::int64_t m, std::int32_t f, FixingMode fixing,
                              PropagationMode mode, RngStream rng, bool audit) {
  const CnfFormula phi = sample_formula({n, m, 2}, rng);
  const FixedSet fixed = fixing == FixingMode::Uniform ? sample_fixed_set(n, f, rng) : canonical_fixed_set(n, f);
  const PropagationTrace trace =
      mode == PropagationMode::Plain ? propagate(phi, fixed) : propagate_proof_faithful(phi, fixed, {}, rng);
  SweepTrial out;
  out.sat = trace.satisfiable().value_or(false);
  if (audit && mode == PropagationMode::Plain) {
    out.audited = true;
    out.mismatch = solve_2sat(with_units(phi, fixed), false).sat() != out.sat;
  }
  return out;
}

}  // namespace detail

// Satisfiability of F_2(n, floor(alpha n)) restricted by f = floor(n^q)
// fixed variables, one row per (n, q), plus an unfixed baseline row per n.
inline SweepTable run_figure2_sweep(const SweepConfig& config, AuditSummary* audit = nullptr,
                                    const ProgressFn& progress = {}) {
  config.validate();
  SweepTable table;
  AuditSummary summary;
  const std::string id = config.experiment_id();
  for (std::int32_t n : config.n_list) {
    const std::int64_t m = detail::clause_count(n, config.alpha);
    if (config.include_baseline) {
      const std::uint64_t cs = cell_seed(config.seed, id + "-baseline", {static_cast<std::uint64_t>(n), double_bits(config.alpha)});
      auto sats = run_trials(config.trials, config.workers, [&](std::int64_t t) {
        auto rng = derive_stream(cs, static_cast<std::uint64_t>(t));
        return static_cast<std::uint8_t>(solve_2sat(sample_formula({n, m, 2}, rng), false).sat());
      });
      std::int64_t sat = 0;
      for (auto s : sats) sat += s;
      table.rows.push_back(make_row(id + "-baseline", n, config.alpha, std::nullopt, 0, config.trials, sat, config.seed));
      if (progress) progress(id + " n=" + std::to_string(n) + " baseline done");
    }
    for (double q : config.q_list) {
      const std::int32_t f = config.f_override ? *config.f_override : fixed_count(n, q);
      const std::uint64_t cs = cell_seed(config.seed, id, {static_cast<std::uint64_t>(n), double_bits(q), double_bits(config.alpha)});
      const bool auditable = n <= kAuditMaxVars;
      auto trials = run_trials(config.trials, config.workers, [&](std::int64_t t) {
        return detail::fixed_trial(n, m, f, config.fixing, config.mode, derive_stream(cs, static_cast<std::uint64_t>(t)),
                                   auditable && t % kAuditStride == 0);
      });
      std::int64_t sat = 0;
      for (const auto& tr : trials) {
        sat += tr.sat;
        summary.audited += tr.audited;
        summary.mismatches += tr.mismatch;
      }
      table.rows.push_back(make_row(id, n, config.alpha, q, f, config.trials, sat, config.seed));
      if (progress) progress(id + " n=" + std::to_string(n) + " q=" + std::to_string(q) + " done");
    }
  }
  if (audit) *audit = summary;
  return table;
}

struct WindowConfig {
  std::vector<std::int32_t> n_list{1000, 10000, 100000};
  std::vector<double> alpha_list{1.0};
  std::int64_t trials = 2000;
  std::uint64_t seed = 1;
  int workers = 0;

  void validate() const {
    if (trials < 1) throw Error(ErrorKind::InvalidSpec, "trials must be >= 1");
    if (n_list.empty() || alpha_list.empty()) throw Error(ErrorKind::InvalidSpec, "n_list and alpha_list must be nonempty");
    for (auto n : n_list)
      if (n < 2) throw Error(ErrorKind::InvalidSpec, "every n must be >= 2");
    for (double a : alpha_list)
      if (!(a > 0.0)) throw Error(ErrorKind::InvalidSpec, "alpha must be positive");
  }
};

// Plain satisfiability of F_2(n, floor(alpha n)).
inline SweepTable run_window_study(const WindowConfig& config, const ProgressFn& progress = {}) {
  config.validate();
  SweepTable table;
  for (std::int32_t n : config.n_list) {
    for (double alpha : config.alpha_list) {
      const std::int64_t m = detail::clause_count(n, alpha);
      const std::uint64_t cs = cell_seed(config.seed, "window", {static_cast<std::uint64_t>(n), double_bits(alpha)});
      auto sats = run_trials(config.trials, config.workers, [&](std::int64_t t) {
        auto rng = derive_stream(cs, static_cast<std::uint64_t>(t));
        return static_cast<std::uint8_t>(solve_2sat(sample_formula({n, m, 2}, rng), false).sat());
      });
      std::int64_t sat = 0;
      for (auto s : sats) sat += s;
      table.rows.push_back(make_row("window", n, alpha, std::nullopt, 0, config.trials, sat, config.seed));
      if (progress) progress("window n=" + std::to_string(n) + " alpha=" + std::to_string(alpha) + " done");
    }
  }
  return table;
}

struct TrajectoryConfig {
  std::int32_t n = 100000;
  std::vector<double> q_list{0.20, 0.45};
  std::optional<std::int32_t> f_override;
  double alpha = 1.0;
  std::int64_t trials = 2000;
  std::uint64_t seed = 1;
  PropagationMode mode = PropagationMode::Plain;
  // Defaults to the over-fixed budget floor(n^(1-2q) ln n) when q is in
  // (0, 1/2], otherwise n.
  std::optional<std::int64_t> round_cap;
  int workers = 0;

  void validate() const {
    if (trials < 0) throw Error(ErrorKind::InvalidSpec, "trials must be >= 0");
    if (n < 3) throw Error(ErrorKind::InvalidSpec, "n must be >= 3");
    if (!(alpha > 0.0)) throw Error(ErrorKind::InvalidSpec, "alpha must be positive");
    if (round_cap && *round_cap < 0) throw Error(ErrorKind::InvalidSpec, "round cap must be nonnegative");
    for (double q : q_list)
      if (!(q >= 0.0 && q < 1.0)) throw Error(ErrorKind::InvalidSpec, "every q must lie in [0, 1)");
  }

  std::int64_t cap_for(double q) const {
    if (round_cap) return *round_cap;
    if (q > 0.0 && q <= 0.5) return std::max<std::int64_t>(1, rounds_budget(n, q, BudgetRegime::Over).rounds);
    return n;
  }
};

struct RoundQuantiles {
  std::int64_t round = 0;
  std::int64_t active = 0;  // trials that executed this round
  std::int64_t p10 = 0, p50 = 0, p90 = 0;
  double mean_m1 = 0.0;
  double mean_cumulative = 0.0;
};

struct TrajectoryStats {
  std::int32_t n = 0;
  double q = 0.0;
  std::int32_t f = 0;
  std::int64_t trials = 0;
  std::int64_t round_cap = 0;
  std::int64_t extinct = 0;       // reached M_1 = 0 without contradiction
  std::int64_t contradicted = 0;
  std::int64_t capped = 0;
  std::map<std::int64_t, std::int64_t> extinction_hist;      // round -> trials
  std::map<std::int64_t, std::int64_t> contradiction_hist;   // round -> trials
  std::vector<RoundQuantiles> per_round;
  // Trials that never reach M_1 = 0 count as extinct at round +infinity, so
  // this is infinite once half the trials are contradicted or capped.
  double median_extinction_round = 0.0;
  double median_termination_round = 0.0;

  double extinct_fraction() const { return trials > 0 ? static_cast<double>(extinct) / static_cast<double>(trials) : 0.0; }
  double extinct_stderr() const { return binomial_stderr(extinct_fraction(), trials); }
};

namespace detail {

inline double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

// Nearest-rank quantile of sorted data.
inline std::int64_t quantile_sorted(const std::vector<std::int64_t>& sorted, double p) {
  if (sorted.empty()) return 0;
  auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(sorted.size())));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

struct TrajectoryTrial {
  std::vector<std::int64_t> m1;
  std::vector<std::int64_t> cumulative;
  PropagationOutcome outcome = PropagationOutcome::ExhaustedFixedSet;
};

}  // namespace detail

// Per-round unit counts M_1^(r) of the propagation, without solving the
// residual.
inline std::vector<TrajectoryStats> run_trajectory_study(const TrajectoryConfig& config,
                                                         const ProgressFn& progress = {}) {
  config.validate();
  std::vector<TrajectoryStats> out;
  const std::int64_t m = detail::clause_count(config.n, config.alpha);
  for (double q : config.q_list) {
    TrajectoryStats st;
    st.n = config.n;
    st.q = q;
    st.f = config.f_override ? *config.f_override : fixed_count(config.n, q);
    st.trials = config.trials;
    st.round_cap = config.cap_for(q);
    const std::uint64_t cs = cell_seed(config.seed, "trajectory",
                                       {static_cast<std::uint64_t>(config.n), double_bits(q), double_bits(config.alpha)});
    auto trials = run_trials(config.trials, config.workers, [&](std::int64_t t) {
      auto rng = derive_stream(cs, static_cast<std::uint64_t>(t));
      const CnfFormula phi = sample_formula({config.n, m, 2}, rng);
      const FixedSet fixed = sample_fixed_set(config.n, st.f, rng);
      PropagateOptions opts;
      opts.round_cap = st.round_cap;
      opts.solve_residual = false;
      const PropagationTrace trace = config.mode == PropagationMode::Plain
                                         ? propagate(phi, fixed, opts)
                                         : propagate_proof_faithful(phi, fixed, opts, rng);
      detail::TrajectoryTrial tr;
      tr.outcome = trace.outcome;
      for (const auto& rec : trace.rounds) {
        tr.m1.push_back(rec.counts.m1);
        tr.cumulative.push_back(rec.cumulative_fixed);
      }
      return tr;
    });

    std::vector<double> extinction_rounds, termination_rounds;
    std::size_t max_rounds = 0;
    for (const auto& tr : trials) {
      const auto rounds = static_cast<std::int64_t>(tr.m1.size());
      termination_rounds.push_back(static_cast<double>(rounds));
      extinction_rounds.push_back(tr.outcome == PropagationOutcome::ExhaustedFixedSet
                                      ? static_cast<double>(rounds)
                                      : std::numeric_limits<double>::infinity());
      max_rounds = std::max(max_rounds, tr.m1.size());
      switch (tr.outcome) {
        case PropagationOutcome::Contradiction:
          ++st.contradicted;
          ++st.contradiction_hist[rounds];
          break;
        case PropagationOutcome::ExhaustedFixedSet:
          ++st.extinct;
          ++st.extinction_hist[rounds];
          break;
        case PropagationOutcome::RoundCap: ++st.capped; break;
      }
    }
    for (std::size_t r = 0; r < max_rounds; ++r) {
      std::vector<std::int64_t> vals;
      double cum = 0.0;
      for (const auto& tr : trials) {
        if (r < tr.m1.size()) {
          vals.push_back(tr.m1[r]);
          cum += static_cast<double>(tr.cumulative[r]);
        }
      }
      std::sort(vals.begin(), vals.end());
      RoundQuantiles rq;
      rq.round = static_cast<std::int64_t>(r) + 1;
      rq.active = static_cast<std::int64_t>(vals.size());
      rq.p10 = detail::quantile_sorted(vals, 0.10);
      rq.p50 = detail::quantile_sorted(vals, 0.50);
      rq.p90 = detail::quantile_sorted(vals, 0.90);
      double sum = 0.0;
      for (auto v : vals) sum += static_cast<double>(v);
      rq.mean_m1 = sum / static_cast<double>(vals.size());
      rq.mean_cumulative = cum / static_cast<double>(vals.size());
      st.per_round.push_back(rq);
    }
    st.median_extinction_round = detail::median_of(extinction_rounds);
    st.median_termination_round = detail::median_of(termination_rounds);
    if (progress) progress("trajectory n=" + std::to_string(config.n) + " q=" + std::to_string(q) + " done");
    out.push_back(std::move(st));
  }
  return out;
}

struct DistributionReport {
  std::int64_t n = 0, f = 0, m = 0, samples = 0;
  std::array<double, 4> probs{};
  std::array<double, 4> expected_mean{}, empirical_mean{};
  std::array<double, 4> expected_var{}, empirical_var{};
  std::array<double, 4> z{};  // (empirical mean - m p_k) / sqrt(m p_k (1 - p_k) / samples)
  std::array<std::int64_t, 4> pooled_counts{};
  ChiSquareResult chi;
  bool means_within_4sigma = false;

  bool passes(double significance = 0.001) const { return means_within_4sigma && chi.passes(significance); }
};

// Category counts (M_0, M_1, M_2, M_*) of F_2(n, m) under L = [n] \ [n-f],
// against Multinomial(m, p(n, f)). The pooled chi-square treats all
// samples * m clauses as one multinomial draw.
inline DistributionReport run_distribution_check(std::int64_t n, std::int64_t f, std::int64_t m,
                                                 std::int64_t samples, std::uint64_t seed, int workers = 0) {
  if (samples < 1 || m < 0 || n < 2 || f < 0 || f > n)
    throw Error(ErrorKind::InvalidSpec, "need samples >= 1, m >= 0, n >= 2, 0 <= f <= n");
  DistributionReport rep;
  rep.n = n;
  rep.f = f;
  rep.m = m;
  rep.samples = samples;
  rep.probs = clause_category_probs(n, f).as_double();
  const auto n32 = static_cast<std::int32_t>(n);
  const FixedSet fixed = canonical_fixed_set(n32, static_cast<std::int32_t>(f));
  const std::uint64_t cs = cell_seed(seed, "distcheck", {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(f),
                                                         static_cast<std::uint64_t>(m)});
  auto counts = run_trials(samples, workers, [&](std::int64_t t) {
    auto rng = derive_stream(cs, static_cast<std::uint64_t>(t));
    const Partition p = partition_clauses(sample_formula({n32, m, 2}, rng), fixed);
    return std::array<std::int64_t, 4>{p.counts.m0, p.counts.m1, p.counts.m2, p.counts.mstar};
  });
  const double s = static_cast<double>(samples);
  rep.means_within_4sigma = true;
  for (std::size_t k = 0; k < 4; ++k) {
    double sum = 0.0, sumsq = 0.0;
    for (const auto& c : counts) {
      sum += static_cast<double>(c[k]);
      sumsq += static_cast<double>(c[k]) * static_cast<double>(c[k]);
      rep.pooled_counts[k] += c[k];
    }
    const double p = rep.probs[k];
    rep.expected_mean[k] = static_cast<double>(m) * p;
    rep.expected_var[k] = static_cast<double>(m) * p * (1.0 - p);
    rep.empirical_mean[k] = sum / s;
    rep.empirical_var[k] = samples > 1 ? (sumsq - sum * sum / s) / (s - 1.0) : 0.0;
    const double sigma = std::sqrt(rep.expected_var[k] / s);
    const double diff = rep.empirical_mean[k] - rep.expected_mean[k];
    rep.z[k] = sigma > 0.0 ? diff / sigma : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    if (std::fabs(rep.z[k]) > 4.0) rep.means_within_4sigma = false;
  }
  rep.chi = chi_square_gof(rep.pooled_counts, rep.probs);
  return rep;
}

struct GwSurvival {
  std::int64_t trials = 0;
  std::int64_t survivors = 0;
  double estimate = 0.0;
  double stderr_ = 0.0;
};

// Fraction of independent Poisson(1) branching processes started from x0
// that are still alive after `gen` generations.
inline GwSurvival gw_survival(std::int64_t x0, std::int64_t gen, std::int64_t trials, std::uint64_t seed,
                              int workers = 0) {
  if (trials < 1) throw Error(ErrorKind::InvalidSpec, "trials must be >= 1");
  GwConfig cfg{x0, gen};
  cfg.validate();
  const std::uint64_t cs = cell_seed(seed, "gw", {static_cast<std::uint64_t>(x0), static_cast<std::uint64_t>(gen)});
  auto alive = run_trials(trials, workers, [&](std::int64_t t) {
    auto rng = derive_stream(cs, static_cast<std::uint64_t>(t));
    return static_cast<std::uint8_t>(gw_run(cfg, rng) > 0);
  });
  GwSurvival out;
  out.trials = trials;
  for (auto a : alive) out.survivors += a;
  out.estimate = static_cast<double>(out.survivors) / static_cast<double>(trials);
  out.stderr_ = binomial_stderr(out.estimate, trials);
  return out;
}

}  // namespace critsat
