#pragma once

// Round-based unit propagation on 2-CNF formulas under a fixed literal set.
//
// Given a consistent set L, every clause falls in exactly one category:
//   C_star  some literal is in L                    (satisfied)
//   C_0     both literals are in -L                 (falsified)
//   C_1     one literal in -L, the other uncovered  (reduced to a unit)
//   C_2     neither variable covered                (untouched)
// The formula restricted by L is satisfiable iff C_0 is empty, the unit
// literals are free of complementary pairs, and the C_2 clauses restricted
// by the induced set of units are satisfiable. Iterating that statement on
// the C_2 clauses gives the rounds recorded in a PropagationTrace.

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "critsat/formula.hpp"
#include "critsat/rng.hpp"
#include "critsat/sampling.hpp"
#include "critsat/solve.hpp"

namespace critsat {

enum class Category : std::uint8_t { Unsatisfied = 0, Unit = 1, Untouched = 2, Satisfied = 3 };

struct CategoryCounts {
  std::int64_t m0 = 0;
  std::int64_t m1 = 0;
  std::int64_t m2 = 0;
  std::int64_t mstar = 0;

  std::int64_t total() const { return m0 + m1 + m2 + mstar; }
  friend bool operator==(const CategoryCounts&, const CategoryCounts&) = default;
};

struct Partition {
  std::vector<std::size_t> c0, c1, c2, cstar;
  CategoryCounts counts;
  std::vector<Literal> unit_literals;  // in clause order, one per C_1 clause
  CnfFormula residual2;
};

namespace detail {

inline void require_width2(const CnfFormula& formula) {
  for (const Clause& c : formula.clauses())
    if (c.width() != 2) throw Error(ErrorKind::ClauseWidthError, "unit propagation expects a 2-CNF formula");
}

// +1 when the literal is in L, -1 when it is in -L, 0 when uncovered.
inline int relation(const std::vector<std::int8_t>& state, Literal l) {
  const int s = state[static_cast<std::size_t>(l.var())];
  return l.positive() ? s : -s;
}

// Category of a 2-clause given the polarity relation of each literal; for
// C_1, unit_pos is the index of the uncovered literal.
inline Category classify(int r0, int r1, int& unit_pos) {
  if (r0 > 0 || r1 > 0) return Category::Satisfied;
  if (r0 < 0 && r1 < 0) return Category::Unsatisfied;
  if (r0 < 0) {
    unit_pos = 1;
    return Category::Unit;
  }
  if (r1 < 0) {
    unit_pos = 0;
    return Category::Unit;
  }
  return Category::Untouched;
}

inline std::vector<std::int8_t> fixed_state(const FixedSet& fixed, std::int32_t n_vars) {
  std::vector<std::int8_t> state(static_cast<std::size_t>(n_vars) + 1, 0);
  for (Literal l : fixed) state[static_cast<std::size_t>(l.var())] = l.positive() ? 1 : -1;
  return state;
}

}  // namespace detail

inline Partition partition_clauses(const CnfFormula& formula, const FixedSet& fixed) {
  detail::require_width2(formula);
  fixed.check_range(formula.n_vars());
  const auto state = detail::fixed_state(fixed, formula.n_vars());
  Partition p;
  std::vector<Clause> residual;
  for (std::size_t j = 0; j < formula.size(); ++j) {
    const Clause& c = formula[j];
    int unit_pos = -1;
    switch (detail::classify(detail::relation(state, c[0]), detail::relation(state, c[1]), unit_pos)) {
      case Category::Satisfied: p.cstar.push_back(j); break;
      case Category::Unsatisfied: p.c0.push_back(j); break;
      case Category::Unit:
        p.c1.push_back(j);
        p.unit_literals.push_back(c[static_cast<std::size_t>(unit_pos)]);
        break;
      case Category::Untouched:
        p.c2.push_back(j);
        residual.push_back(c);
        break;
    }
  }
  p.counts = {static_cast<std::int64_t>(p.c0.size()), static_cast<std::int64_t>(p.c1.size()),
              static_cast<std::int64_t>(p.c2.size()), static_cast<std::int64_t>(p.cstar.size())};
  p.residual2 = CnfFormula(formula.n_vars(), std::move(residual));
  return p;
}

// L(phi_1): the unit literals whose complement is not also a unit.
inline FixedSet induced_fixed_set(std::span<const Literal> units) {
  std::unordered_set<std::int32_t> seen;
  seen.reserve(units.size() * 2);
  for (Literal l : units) seen.insert(l.value());
  std::vector<Literal> kept;
  for (Literal l : units)
    if (!seen.count(-l.value())) kept.push_back(l);
  return FixedSet(std::move(kept));
}

struct RoundRecord {
  std::int64_t round_index = 0;
  CategoryCounts counts;
  bool unit_conflict = false;
  FixedSet induced_fixed;
  // S^(r) = S^(r-1) + M_1^(r), with S^(0) the size of the initial fixed set.
  std::int64_t cumulative_fixed = 0;
  // Proof-faithful mode only: clauses appended (> 0) or dropped (< 0)
  // after the round.
  std::int64_t padding = 0;

  bool contradiction() const { return counts.m0 > 0 || unit_conflict; }
  std::int64_t distinct_units() const { return static_cast<std::int64_t>(induced_fixed.size()); }
};

struct RoundResult {
  RoundRecord record;
  CnfFormula residual2;
  FixedSet next_fixed;
};

inline RoundResult propagation_round(const CnfFormula& formula2, const FixedSet& fixed,
                                     std::int64_t round_index = 1, std::int64_t prev_cumulative = -1) {
  Partition p = partition_clauses(formula2, fixed);
  RoundResult out;
  out.record.round_index = round_index;
  out.record.counts = p.counts;
  out.record.unit_conflict = !solve_1sat(p.unit_literals).sat();
  out.record.induced_fixed = induced_fixed_set(p.unit_literals);
  out.record.cumulative_fixed =
      (prev_cumulative < 0 ? static_cast<std::int64_t>(fixed.size()) : prev_cumulative) + p.counts.m1;
  out.next_fixed = out.record.induced_fixed;
  out.residual2 = std::move(p.residual2);
  return out;
}

enum class PropagationOutcome {
  Contradiction,      // some round had M_0 > 0 or complementary units
  ExhaustedFixedSet,  // the induced set became empty; residual remains
  RoundCap,           // stopped with a nonempty pending fixed set
};

inline std::string_view to_string(PropagationOutcome o) {
  switch (o) {
    case PropagationOutcome::Contradiction: return "CONTRADICTION";
    case PropagationOutcome::ExhaustedFixedSet: return "EXHAUSTED_FIXED_SET";
    case PropagationOutcome::RoundCap: return "ROUND_CAP";
  }
  return "UNKNOWN";
}

struct PropagationTrace {
  std::vector<RoundRecord> rounds;
  PropagationOutcome outcome = PropagationOutcome::ExhaustedFixedSet;
  CnfFormula residual;
  FixedSet pending;  // nonempty only for RoundCap
  std::optional<Verdict> final_verdict;

  // Satisfiability of the restricted formula, when decided.
  std::optional<bool> satisfiable() const {
    if (outcome == PropagationOutcome::Contradiction) return false;
    if (final_verdict) return final_verdict->sat();
    return std::nullopt;
  }
};

struct PropagateOptions {
  // Maximum number of rounds; defaults to n. Every round with a nonempty
  // fixed set fixes at least one new variable, so the default never binds.
  std::optional<std::int64_t> round_cap;
  bool solve_residual = true;
};

namespace detail {

inline void finish_trace(PropagationTrace& trace, bool solve_residual) {
  if (!solve_residual || trace.outcome == PropagationOutcome::Contradiction) return;
  if (trace.pending.empty())
    trace.final_verdict = solve_2sat(trace.residual, false);
  else
    trace.final_verdict = solve_2sat(with_units(trace.residual, trace.pending), false);
}

}  // namespace detail

// Runs rounds until the induced set is empty, a contradiction occurs, or the
// cap is reached. Each round only visits clauses containing a variable of the
// current fixed set, so a full run costs O(n + m); the records are identical
// to iterating propagation_round on the successive residuals.
inline PropagationTrace propagate(const CnfFormula& formula, const FixedSet& fixed,
                                  const PropagateOptions& options = {}) {
  detail::require_width2(formula);
  fixed.check_range(formula.n_vars());
  const std::int32_t n = formula.n_vars();
  const std::int64_t cap = options.round_cap.value_or(n);
  if (cap < 0) throw Error(ErrorKind::InvalidSpec, "round cap must be nonnegative");
  const std::size_t m = formula.size();

  PropagationTrace trace;
  if (fixed.empty() || cap == 0) {
    trace.outcome = fixed.empty() ? PropagationOutcome::ExhaustedFixedSet : PropagationOutcome::RoundCap;
    trace.residual = formula;
    trace.pending = fixed;
    detail::finish_trace(trace, options.solve_residual);
    return trace;
  }

  // Occurrence lists, variable -> clause indices.
  const auto nv = static_cast<std::size_t>(n);
  std::vector<std::int32_t> occ_offsets(nv + 2, 0);
  for (const Clause& c : formula.clauses()) {
    ++occ_offsets[static_cast<std::size_t>(c[0].var()) + 1];
    ++occ_offsets[static_cast<std::size_t>(c[1].var()) + 1];
  }
  for (std::size_t v = 0; v <= nv; ++v) occ_offsets[v + 1] += occ_offsets[v];
  std::vector<std::int32_t> occ(static_cast<std::size_t>(occ_offsets[nv + 1]));
  {
    std::vector<std::int32_t> fill(occ_offsets.begin(), occ_offsets.end() - 1);
    for (std::size_t j = 0; j < m; ++j) {
      const Clause& c = formula[j];
      occ[static_cast<std::size_t>(fill[static_cast<std::size_t>(c[0].var())]++)] = static_cast<std::int32_t>(j);
      occ[static_cast<std::size_t>(fill[static_cast<std::size_t>(c[1].var())]++)] = static_cast<std::int32_t>(j);
    }
  }

  std::vector<std::uint8_t> alive(m, 1);
  std::vector<std::int8_t> state(nv + 1, 0);
  // Per-variable polarity bits of the units seen in the current round.
  std::vector<std::uint8_t> unit_bits(nv + 1, 0);
  std::vector<std::int32_t> unit_vars;
  std::int64_t alive_count = static_cast<std::int64_t>(m);
  std::int64_t cumulative = static_cast<std::int64_t>(fixed.size());
  std::vector<Literal> current(fixed.begin(), fixed.end());

  for (std::int64_t r = 1;; ++r) {
    for (Literal l : current) state[static_cast<std::size_t>(l.var())] = l.positive() ? 1 : -1;

    RoundRecord rec;
    rec.round_index = r;
    std::int64_t touched = 0;
    unit_vars.clear();
    for (Literal l : current) {
      const auto v = static_cast<std::size_t>(l.var());
      for (auto k = occ_offsets[v]; k < occ_offsets[v + 1]; ++k) {
        const auto j = static_cast<std::size_t>(occ[static_cast<std::size_t>(k)]);
        if (!alive[j]) continue;
        alive[j] = 0;
        ++touched;
        const Clause& c = formula[j];
        int unit_pos = -1;
        switch (detail::classify(detail::relation(state, c[0]), detail::relation(state, c[1]), unit_pos)) {
          case Category::Satisfied: ++rec.counts.mstar; break;
          case Category::Unsatisfied: ++rec.counts.m0; break;
          case Category::Unit: {
            ++rec.counts.m1;
            const Literal u = c[static_cast<std::size_t>(unit_pos)];
            auto& bits = unit_bits[static_cast<std::size_t>(u.var())];
            if (bits == 0) unit_vars.push_back(u.var());
            bits |= u.positive() ? 1 : 2;
            break;
          }
          case Category::Untouched: break;  // unreachable: c contains a covered variable
        }
      }
    }
    rec.counts.m2 = alive_count - touched;
    alive_count -= touched;

    std::vector<Literal> next;
    for (std::int32_t v : unit_vars) {
      auto& bits = unit_bits[static_cast<std::size_t>(v)];
      if (bits == 3)
        rec.unit_conflict = true;
      else
        next.emplace_back(bits == 1 ? v : -v);
      bits = 0;
    }
    rec.induced_fixed = FixedSet(next);
    cumulative += rec.counts.m1;
    rec.cumulative_fixed = cumulative;
    const bool contradiction = rec.contradiction();
    trace.rounds.push_back(std::move(rec));

    if (contradiction) {
      trace.outcome = PropagationOutcome::Contradiction;
      break;
    }
    if (next.empty()) {
      trace.outcome = PropagationOutcome::ExhaustedFixedSet;
      break;
    }
    if (r == cap) {
      trace.outcome = PropagationOutcome::RoundCap;
      trace.pending = trace.rounds.back().induced_fixed;
      break;
    }
    current = std::move(next);
  }

  std::vector<Clause> residual;
  residual.reserve(static_cast<std::size_t>(alive_count));
  for (std::size_t j = 0; j < m; ++j)
    if (alive[j]) residual.push_back(formula[j]);
  trace.residual = CnfFormula(n, std::move(residual));
  detail::finish_trace(trace, options.solve_residual);
  return trace;
}

// Auxiliary process used in the over-fixed analysis: after round r the C_2
// clauses are truncated, or padded with fresh uniform clauses over the
// variables not fixed before round r, to exactly (n - floor(ln n) * S^(r-1))+
// clauses, where S^(0) = |L| and S^(r) = S^(r-1) + (M_1^(r) - 1)+.
// The verdict describes the auxiliary formula, not the input.
inline PropagationTrace propagate_proof_faithful(const CnfFormula& formula, const FixedSet& fixed,
                                                 const PropagateOptions& options, RngStream& rng) {
  detail::require_width2(formula);
  fixed.check_range(formula.n_vars());
  const std::int32_t n = formula.n_vars();
  const std::int64_t cap = options.round_cap.value_or(n);
  if (cap < 0) throw Error(ErrorKind::InvalidSpec, "round cap must be nonnegative");
  const auto log_n = n >= 2 ? static_cast<std::int64_t>(std::floor(std::log(static_cast<double>(n)))) : 0;

  PropagationTrace trace;
  CnfFormula current_formula = formula;
  FixedSet current = fixed;
  std::vector<std::uint8_t> used(static_cast<std::size_t>(n) + 1, 0);
  std::int64_t s_prev = static_cast<std::int64_t>(fixed.size());  // S^(r-1)
  std::int64_t cumulative = s_prev;

  if (fixed.empty() || cap == 0) {
    trace.outcome = fixed.empty() ? PropagationOutcome::ExhaustedFixedSet : PropagationOutcome::RoundCap;
    trace.residual = formula;
    trace.pending = fixed;
    detail::finish_trace(trace, options.solve_residual);
    return trace;
  }

  for (std::int64_t r = 1;; ++r) {
    for (Literal l : current) used[static_cast<std::size_t>(l.var())] = 1;
    RoundResult round = propagation_round(current_formula, current, r, cumulative);
    cumulative = round.record.cumulative_fixed;

    const std::int64_t target = std::max<std::int64_t>(0, n - log_n * s_prev);
    std::vector<Clause> clauses = round.residual2.clauses();
    const auto have = static_cast<std::int64_t>(clauses.size());
    if (have > target) {
      clauses.resize(static_cast<std::size_t>(target));
    } else if (have < target) {
      std::vector<std::int32_t> free_vars;
      for (std::int32_t v = 1; v <= n; ++v)
        if (!used[static_cast<std::size_t>(v)]) free_vars.push_back(v);
      if (free_vars.size() >= 2) {
        const auto pool = static_cast<std::int32_t>(free_vars.size());
        for (std::int64_t j = have; j < target; ++j) {
          const Clause c = sample_clause(pool, 2, rng);
          clauses.push_back(Clause::from_sorted_pair(
              Literal(c[0].positive() ? free_vars[static_cast<std::size_t>(c[0].var() - 1)]
                                      : -free_vars[static_cast<std::size_t>(c[0].var() - 1)]),
              Literal(c[1].positive() ? free_vars[static_cast<std::size_t>(c[1].var() - 1)]
                                      : -free_vars[static_cast<std::size_t>(c[1].var() - 1)])));
        }
      }
    }
    round.record.padding = static_cast<std::int64_t>(clauses.size()) - have;
    current_formula = CnfFormula(n, std::move(clauses));
    s_prev += std::max<std::int64_t>(0, round.record.counts.m1 - 1);

    const bool contradiction = round.record.contradiction();
    trace.rounds.push_back(round.record);
    if (contradiction) {
      trace.outcome = PropagationOutcome::Contradiction;
      break;
    }
    if (round.next_fixed.empty()) {
      trace.outcome = PropagationOutcome::ExhaustedFixedSet;
      break;
    }
    if (r == cap) {
      trace.outcome = PropagationOutcome::RoundCap;
      trace.pending = round.next_fixed;
      break;
    }
    current = std::move(round.next_fixed);
  }
  trace.residual = std::move(current_formula);
  detail::finish_trace(trace, options.solve_residual);
  return trace;
}

// Relabeling that carries an arbitrary consistent fixed set onto the
// canonical set [n] \ [n-f] (all positive).
//
// With the fixed literals l_1..l_f sorted by variable and the remaining
// variables l_{f+1} < ... < l_n ascending, the permutation is
// gamma(|l_i|) = n + 1 - i and the sign map is theta(|l_i|) = sgn(l_i) for
// fixed variables, +1 otherwise. Each literal l maps to
// theta(|l|) * sgn(l) * gamma(|l|) and clauses are re-sorted by variable.
struct Coupling {
  CnfFormula formula;
  std::vector<std::int32_t> permutation;  // permutation[v - 1] = gamma(v)
  std::vector<std::int8_t> sign;          // sign[v - 1] = theta(v)
  FixedSet canonical;

  Literal map(Literal l) const {
    const auto idx = static_cast<std::size_t>(l.var() - 1);
    const std::int32_t s = sign[idx] * (l.positive() ? 1 : -1);
    return Literal(s * permutation[idx]);
  }
};

inline Coupling relabel_coupling(const CnfFormula& formula, const FixedSet& fixed) {
  const std::int32_t n = formula.n_vars();
  fixed.check_range(n);
  const auto f = static_cast<std::int32_t>(fixed.size());
  Coupling g;
  g.permutation.assign(static_cast<std::size_t>(n), 0);
  g.sign.assign(static_cast<std::size_t>(n), 1);
  std::int32_t i = 1;
  for (Literal l : fixed) {  // sorted by variable
    const auto idx = static_cast<std::size_t>(l.var() - 1);
    g.permutation[idx] = n + 1 - i++;
    g.sign[idx] = l.positive() ? 1 : -1;
  }
  for (std::int32_t v = 1; v <= n; ++v) {
    auto& slot = g.permutation[static_cast<std::size_t>(v - 1)];
    if (slot == 0) slot = n + 1 - i++;
  }

  std::vector<Clause> clauses;
  clauses.reserve(formula.size());
  std::array<Literal, kMaxClauseWidth> buf{};
  for (const Clause& c : formula.clauses()) {
    for (std::size_t k = 0; k < c.width(); ++k) buf[k] = g.map(c[k]);
    clauses.push_back(canonicalize_clause(std::span<const Literal>(buf.data(), c.width())));
  }
  g.formula = CnfFormula(n, std::move(clauses));
  g.canonical = canonical_fixed_set(n, f);
  return g;
}

}  // namespace critsat
