#pragma once

// Uniform sampling of clauses from D = {(l_1..l_k) : |l_1| < ... < |l_k|},
// of random formulas F_k(n, m), and of consistent fixed sets.

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <unordered_set>
#include <vector>

#include "critsat/formula.hpp"
#include "critsat/rng.hpp"

namespace critsat {

struct SampleSpec {
  std::int32_t n = 0;
  std::int64_t m = 0;
  std::int32_t k = 2;

  void validate() const {
    if (k < 1 || static_cast<std::size_t>(k) > kMaxClauseWidth)
      throw Error(ErrorKind::InvalidSpec, "clause width k must be in [1, " + std::to_string(kMaxClauseWidth) + "]");
    if (n < 0 || m < 0) throw Error(ErrorKind::InvalidSpec, "n and m must be nonnegative");
    if (m > 0 && n < k) throw Error(ErrorKind::InvalidSpec, "need n >= k when m > 0");
  }
};

// |D| = 2^k * C(n, k); the k variables are drawn without replacement, sorted,
// and given independent fair signs.
inline Clause sample_clause(std::int32_t n, std::int32_t k, RngStream& rng) {
  if (k < 1 || static_cast<std::size_t>(k) > kMaxClauseWidth || n < k)
    throw Error(ErrorKind::InvalidSpec, "sample_clause needs n >= k >= 1");
  const auto nn = static_cast<std::uint64_t>(n);
  if (k == 2) {
    auto a = static_cast<std::int32_t>(rng.below(nn)) + 1;
    auto b = static_cast<std::int32_t>(rng.below(nn - 1)) + 1;
    if (b >= a) ++b;
    if (b < a) std::swap(a, b);
    const Literal la(rng.coin() ? a : -a);
    const Literal lb(rng.coin() ? b : -b);
    return Clause::from_sorted_pair(la, lb);
  }
  std::array<std::int32_t, kMaxClauseWidth> vars{};
  for (std::int32_t i = 0; i < k; ++i) {
    std::int32_t v;
    do {
      v = static_cast<std::int32_t>(rng.below(nn)) + 1;
    } while (std::find(vars.begin(), vars.begin() + i, v) != vars.begin() + i);
    vars[static_cast<std::size_t>(i)] = v;
  }
  std::sort(vars.begin(), vars.begin() + k);
  std::array<Literal, kMaxClauseWidth> lits{};
  for (std::int32_t i = 0; i < k; ++i) {
    const auto v = vars[static_cast<std::size_t>(i)];
    lits[static_cast<std::size_t>(i)] = Literal(rng.coin() ? v : -v);
  }
  return Clause(std::span<const Literal>(lits.data(), static_cast<std::size_t>(k)));
}

inline CnfFormula sample_formula(const SampleSpec& spec, RngStream& rng) {
  spec.validate();
  std::vector<Clause> clauses;
  clauses.reserve(static_cast<std::size_t>(spec.m));
  for (std::int64_t j = 0; j < spec.m; ++j) clauses.push_back(sample_clause(spec.n, spec.k, rng));
  return CnfFormula(spec.n, std::move(clauses));
}

// f distinct variables uniformly without replacement, each with an
// independent fair sign.
inline FixedSet sample_fixed_set(std::int32_t n, std::int32_t f, RngStream& rng) {
  if (f < 0 || f > n) throw Error(ErrorKind::InvalidSpec, "sample_fixed_set needs 0 <= f <= n");
  std::vector<Literal> lits;
  lits.reserve(static_cast<std::size_t>(f));
  if (static_cast<std::int64_t>(f) * 4 < n) {
    // Floyd's algorithm: uniform f-subset in O(f) draws.
    std::unordered_set<std::int32_t> chosen;
    for (std::int32_t j = n - f + 1; j <= n; ++j) {
      auto t = static_cast<std::int32_t>(rng.below(static_cast<std::uint64_t>(j))) + 1;
      if (!chosen.insert(t).second) {
        chosen.insert(j);
        t = j;
      }
      lits.emplace_back(rng.coin() ? t : -t);
    }
  } else {
    std::vector<std::int32_t> pool(static_cast<std::size_t>(n));
    std::iota(pool.begin(), pool.end(), 1);
    for (std::int32_t i = 0; i < f; ++i) {
      auto j = i + static_cast<std::int32_t>(rng.below(static_cast<std::uint64_t>(n - i)));
      std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
      const auto v = pool[static_cast<std::size_t>(i)];
      lits.emplace_back(rng.coin() ? v : -v);
    }
  }
  return FixedSet(std::move(lits));
}

}  // namespace critsat
