#pragma once

// Decision procedures: linear-time 2-SAT through strongly connected
// components of the implication graph, 1-SAT consistency, and a truth-table
// oracle for small n.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_set>
#include <vector>

#include "critsat/formula.hpp"

namespace critsat {

enum class SatStatus { Sat, Unsat };

struct Verdict {
  SatStatus status = SatStatus::Sat;
  std::optional<Assignment> witness;

  bool sat() const { return status == SatStatus::Sat; }
};

// Iterative Tarjan in Pearce's single-array form: one int32 per vertex holds
// the DFS index while the vertex is open and its component id once closed,
// which keeps the working set small on graphs that do not fit in cache.
// Component ids are assigned in the order components complete, which is a
// reverse topological order of the condensation (sinks first).
class SccFinder {
 public:
  // offsets has size vertices+1; targets[offsets[v]..offsets[v+1]) are the
  // successors of v.
  std::vector<std::int32_t> run(std::span<const std::int32_t> offsets, std::span<const std::int32_t> targets) {
    const auto n = static_cast<std::int32_t>(offsets.size()) - 1;
    // rindex: 0 = unvisited, [1, n] = open DFS index, (n, 2n] = closed
    // (component). Closed values always exceed open ones, so a closed
    // successor never lowers the root index. Stored next to the vertex's
    // edge offset so that entering a vertex touches one cache line.
    nodes_.resize(static_cast<std::size_t>(n) + 1);
    for (std::size_t v = 0; v <= static_cast<std::size_t>(n); ++v) nodes_[v] = {offsets[v], 0};
    stack_.clear();
    frames_.clear();
    std::int32_t index = 1;
    std::int32_t c = 2 * n;

    for (std::int32_t root = 0; root < n; ++root) {
      if (nodes_[static_cast<std::size_t>(root)].rindex != 0) continue;
      nodes_[static_cast<std::size_t>(root)].rindex = index++;
      frames_.push_back({root, nodes_[static_cast<std::size_t>(root)].edge, true});
      while (!frames_.empty()) {
        Frame& fr = frames_.back();
        const auto v = static_cast<std::size_t>(fr.vertex);
        if (fr.edge < nodes_[v + 1].edge) {
          const auto w = static_cast<std::size_t>(targets[static_cast<std::size_t>(fr.edge)]);
          Node& nw = nodes_[w];
          if (nw.rindex == 0) {
            // descend; the edge is revisited after w closes
            nw.rindex = index++;
            frames_.push_back({static_cast<std::int32_t>(w), nw.edge, true});
            continue;
          }
          if (nw.rindex < nodes_[v].rindex) {
            nodes_[v].rindex = nw.rindex;
            fr.root = false;
          }
          ++fr.edge;
          continue;
        }
        if (fr.root) {
          --index;
          const std::int32_t rv = nodes_[v].rindex;
          while (!stack_.empty() && rv <= nodes_[static_cast<std::size_t>(stack_.back())].rindex) {
            nodes_[static_cast<std::size_t>(stack_.back())].rindex = c;
            stack_.pop_back();
            --index;
          }
          nodes_[v].rindex = c--;
        } else {
          stack_.push_back(fr.vertex);
        }
        frames_.pop_back();
      }
    }
    std::vector<std::int32_t> comp(static_cast<std::size_t>(n));
    for (std::size_t v = 0; v < comp.size(); ++v) comp[v] = 2 * n - nodes_[v].rindex;
    return comp;
  }

 private:
  struct Frame {
    std::int32_t vertex;
    std::int32_t edge;
    bool root;
  };
  struct Node {
    std::int32_t edge;
    std::int32_t rindex;
  };

  std::vector<Node> nodes_;
  std::vector<std::int32_t> stack_;
  std::vector<Frame> frames_;
};

namespace detail {

// Literal l maps to vertex 2(|l|-1) for positive, 2(|l|-1)+1 for negative.
inline std::int32_t vertex_of(Literal l) { return 2 * (l.var() - 1) + (l.positive() ? 0 : 1); }

}  // namespace detail

// Unit clauses (l) enter the graph as the implication -l -> l.
inline Verdict solve_2sat(const CnfFormula& formula, bool want_witness = true) {
  const std::int32_t n = formula.n_vars();
  const auto vertices = static_cast<std::size_t>(2 * n);
  std::vector<std::int32_t> offsets(vertices + 1, 0);

  for (const Clause& c : formula.clauses()) {
    if (c.width() > 2)
      throw Error(ErrorKind::ClauseWidthError, "solve_2sat accepts clauses of width <= 2");
    if (c.width() == 1) {
      ++offsets[static_cast<std::size_t>(detail::vertex_of(-c[0])) + 1];
    } else {
      ++offsets[static_cast<std::size_t>(detail::vertex_of(-c[0])) + 1];
      ++offsets[static_cast<std::size_t>(detail::vertex_of(-c[1])) + 1];
    }
  }
  for (std::size_t v = 0; v < vertices; ++v) offsets[v + 1] += offsets[v];
  std::vector<std::int32_t> targets(static_cast<std::size_t>(offsets[vertices]));
  std::vector<std::int32_t> fill(offsets.begin(), offsets.end() - 1);
  auto add = [&](Literal from, Literal to) {
    targets[static_cast<std::size_t>(fill[static_cast<std::size_t>(detail::vertex_of(from))]++)] =
        detail::vertex_of(to);
  };
  for (const Clause& c : formula.clauses()) {
    if (c.width() == 1) {
      add(-c[0], c[0]);
    } else {
      add(-c[0], c[1]);
      add(-c[1], c[0]);
    }
  }

  SccFinder scc;
  const auto comp = scc.run(offsets, targets);
  Verdict verdict;
  for (std::int32_t v = 0; v < n; ++v) {
    if (comp[static_cast<std::size_t>(2 * v)] == comp[static_cast<std::size_t>(2 * v + 1)]) {
      verdict.status = SatStatus::Unsat;
      return verdict;
    }
  }
  if (want_witness) {
    // A literal is true iff its component comes later in topological order,
    // i.e. completed earlier in Tarjan.
    Assignment x(static_cast<std::size_t>(n));
    for (std::int32_t v = 0; v < n; ++v)
      x.set(v + 1, comp[static_cast<std::size_t>(2 * v)] < comp[static_cast<std::size_t>(2 * v + 1)]);
    verdict.witness = std::move(x);
  }
  return verdict;
}

// SAT iff no complementary pair occurs. No witness: the variable count is
// not known from a bare literal list.
inline Verdict solve_1sat(std::span<const Literal> units) {
  std::unordered_set<std::int32_t> seen;
  seen.reserve(units.size() * 2);
  for (Literal l : units) seen.insert(l.value());
  for (Literal l : units)
    if (seen.count(-l.value())) return Verdict{SatStatus::Unsat, std::nullopt};
  return Verdict{SatStatus::Sat, std::nullopt};
}

struct BruteForceResult {
  bool sat = false;
  std::uint64_t model_count = 0;
};

inline constexpr std::int32_t kBruteForceMaxVars = 24;

// Exhaustive truth table over all 2^n assignments.
inline BruteForceResult brute_force_sat(const CnfFormula& formula) {
  const std::int32_t n = formula.n_vars();
  if (n > kBruteForceMaxVars)
    throw Error(ErrorKind::TooLarge, "brute force limited to n <= " + std::to_string(kBruteForceMaxVars));
  struct Masks {
    std::uint32_t pos = 0, neg = 0;
  };
  std::vector<Masks> masks;
  masks.reserve(formula.size());
  for (const Clause& c : formula.clauses()) {
    Masks mk;
    for (Literal l : c) (l.positive() ? mk.pos : mk.neg) |= 1u << (l.var() - 1);
    masks.push_back(mk);
  }
  BruteForceResult result;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t bits = 0; bits < total; ++bits) {
    const auto x = static_cast<std::uint32_t>(bits);
    bool ok = true;
    for (const Masks& mk : masks) {
      if (((x & mk.pos) | (~x & mk.neg)) == 0) {
        ok = false;
        break;
      }
    }
    if (ok) ++result.model_count;
  }
  result.sat = result.model_count > 0;
  return result;
}

}  // namespace critsat
