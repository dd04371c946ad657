#pragma once

// Literals, clauses, CNF formulas, assignments and consistent fixed sets.
//
// Variables are 1-based. A literal is a nonzero signed integer whose sign is
// the polarity and whose magnitude is the variable. A clause keeps its
// literals sorted by strictly increasing variable, which is exactly the
// clause space sampled by the random k-SAT model.

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "critsat/error.hpp"

namespace critsat {

class Literal {
 public:
  constexpr Literal() = default;
  constexpr explicit Literal(std::int32_t value) : value_(value) {}

  constexpr std::int32_t value() const { return value_; }
  constexpr std::int32_t var() const { return value_ < 0 ? -value_ : value_; }
  constexpr bool positive() const { return value_ > 0; }
  constexpr Literal operator-() const { return Literal(-value_); }

  // Value of the literal under a truth value for its variable.
  constexpr bool holds(bool var_value) const { return positive() ? var_value : !var_value; }

  friend constexpr bool operator==(Literal, Literal) = default;
  friend constexpr auto operator<=>(Literal, Literal) = default;

 private:
  std::int32_t value_ = 0;
};

inline constexpr std::size_t kMaxClauseWidth = 4;

namespace detail {

inline void check_nonzero(std::span<const Literal> literals) {
  if (literals.empty()) throw Error(ErrorKind::InvalidSpec, "clause must have at least one literal");
  if (literals.size() > kMaxClauseWidth)
    throw Error(ErrorKind::ClauseWidthError,
                "clause width " + std::to_string(literals.size()) + " exceeds supported maximum " +
                    std::to_string(kMaxClauseWidth));
  for (Literal l : literals)
    if (l.value() == 0) throw Error(ErrorKind::SyntaxError, "literal 0 is not a literal");
}

}  // namespace detail

class Clause {
 public:
  Clause() = default;

  // Validating constructor; see make_clause.
  explicit Clause(std::span<const Literal> literals) {
    detail::check_nonzero(literals);
    for (std::size_t i = 1; i < literals.size(); ++i) {
      if (literals[i].var() == literals[i - 1].var())
        throw Error(ErrorKind::DuplicateVariable,
                    "variable " + std::to_string(literals[i].var()) + " appears twice in a clause");
      if (literals[i].var() < literals[i - 1].var())
        throw Error(ErrorKind::VariableOrderViolation,
                    "clause variables must be strictly increasing");
    }
    std::copy(literals.begin(), literals.end(), lits_.begin());
    size_ = static_cast<std::uint8_t>(literals.size());
  }

  // Trusted fast path for two literals already known to satisfy |a| < |b|.
  static Clause from_sorted_pair(Literal a, Literal b) {
    Clause c;
    c.lits_[0] = a;
    c.lits_[1] = b;
    c.size_ = 2;
    return c;
  }

  std::size_t width() const { return size_; }
  Literal operator[](std::size_t i) const { return lits_[i]; }
  std::span<const Literal> literals() const { return {lits_.data(), size_}; }
  auto begin() const { return lits_.begin(); }
  auto end() const { return lits_.begin() + size_; }
  std::int32_t max_var() const { return size_ == 0 ? 0 : lits_[size_ - 1].var(); }

  friend bool operator==(const Clause& a, const Clause& b) {
    return a.size_ == b.size_ && std::equal(a.begin(), a.end(), b.begin());
  }

 private:
  std::array<Literal, kMaxClauseWidth> lits_{};
  std::uint8_t size_ = 0;
};

inline Clause make_clause(std::span<const Literal> literals) { return Clause(literals); }

inline Clause make_clause(std::initializer_list<std::int32_t> values) {
  std::vector<Literal> lits;
  for (auto v : values) lits.emplace_back(v);
  return Clause(lits);
}

// Sorts by variable; a repeated variable (duplicate or complementary) is
// rejected rather than repaired.
inline Clause canonicalize_clause(std::span<const Literal> literals) {
  detail::check_nonzero(literals);
  std::array<Literal, kMaxClauseWidth> sorted{};
  std::copy(literals.begin(), literals.end(), sorted.begin());
  std::sort(sorted.begin(), sorted.begin() + literals.size(),
            [](Literal a, Literal b) { return a.var() < b.var(); });
  return Clause(std::span<const Literal>(sorted.data(), literals.size()));
}

inline Clause canonicalize_clause(std::initializer_list<std::int32_t> values) {
  std::vector<Literal> lits;
  for (auto v : values) lits.emplace_back(v);
  return canonicalize_clause(lits);
}

class CnfFormula {
 public:
  CnfFormula() = default;

  CnfFormula(std::int32_t n_vars, std::vector<Clause> clauses)
      : n_vars_(n_vars), clauses_(std::move(clauses)) {
    if (n_vars_ < 0) throw Error(ErrorKind::InvalidSpec, "variable count must be nonnegative");
    for (const Clause& c : clauses_) {
      if (c.width() == 0) throw Error(ErrorKind::InvalidSpec, "empty clause");
      if (c.max_var() > n_vars_)
        throw Error(ErrorKind::VariableOutOfRange,
                    "variable " + std::to_string(c.max_var()) + " exceeds n=" + std::to_string(n_vars_));
    }
  }

  std::int32_t n_vars() const { return n_vars_; }
  std::size_t size() const { return clauses_.size(); }
  bool empty() const { return clauses_.empty(); }
  const std::vector<Clause>& clauses() const { return clauses_; }
  const Clause& operator[](std::size_t j) const { return clauses_[j]; }

  std::size_t max_width() const {
    std::size_t w = 0;
    for (const Clause& c : clauses_) w = std::max(w, c.width());
    return w;
  }

  // Ordered equality: clause order is part of a formula's identity.
  friend bool operator==(const CnfFormula&, const CnfFormula&) = default;

 private:
  std::int32_t n_vars_ = 0;
  std::vector<Clause> clauses_;
};

// A point of B^n, indexed by 1-based variable.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::size_t n_vars, bool value = false) : values_(n_vars, value ? 1 : 0) {}
  Assignment(std::initializer_list<bool> values) {
    for (bool b : values) values_.push_back(b ? 1 : 0);
  }

  std::size_t size() const { return values_.size(); }
  bool operator[](std::int32_t var) const { return values_[static_cast<std::size_t>(var - 1)] != 0; }
  void set(std::int32_t var, bool value) { values_[static_cast<std::size_t>(var - 1)] = value ? 1 : 0; }
  void flip(std::int32_t var) { set(var, !(*this)[var]); }

  bool satisfies(Literal l) const { return l.holds((*this)[l.var()]); }

  friend bool operator==(const Assignment&, const Assignment&) = default;

 private:
  std::vector<std::uint8_t> values_;
};

// A consistent set of literals: never contains both l and -l.
// Stored sorted by variable, so each variable appears at most once.
class FixedSet {
 public:
  FixedSet() = default;

  explicit FixedSet(std::vector<Literal> literals) : lits_(std::move(literals)) {
    std::sort(lits_.begin(), lits_.end(), [](Literal a, Literal b) {
      return a.var() != b.var() ? a.var() < b.var() : a.value() < b.value();
    });
    lits_.erase(std::unique(lits_.begin(), lits_.end()), lits_.end());
    for (std::size_t i = 0; i < lits_.size(); ++i) {
      if (lits_[i].value() == 0) throw Error(ErrorKind::SyntaxError, "literal 0 in fixed set");
      if (i > 0 && lits_[i].var() == lits_[i - 1].var())
        throw Error(ErrorKind::InconsistentFixedSet,
                    "variable " + std::to_string(lits_[i].var()) + " fixed in both polarities");
    }
  }

  FixedSet(std::initializer_list<std::int32_t> values)
      : FixedSet([&] {
          std::vector<Literal> l;
          for (auto v : values) l.emplace_back(v);
          return l;
        }()) {}

  std::size_t size() const { return lits_.size(); }
  bool empty() const { return lits_.empty(); }
  const std::vector<Literal>& literals() const { return lits_; }
  auto begin() const { return lits_.begin(); }
  auto end() const { return lits_.end(); }
  std::int32_t max_var() const { return lits_.empty() ? 0 : lits_.back().var(); }

  bool contains(Literal l) const {
    auto it = std::lower_bound(lits_.begin(), lits_.end(), l, [](Literal a, Literal b) {
      return a.var() != b.var() ? a.var() < b.var() : a.value() < b.value();
    });
    return it != lits_.end() && *it == l;
  }
  bool covers(std::int32_t var) const { return contains(Literal(var)) || contains(Literal(-var)); }

  void check_range(std::int32_t n_vars) const {
    if (max_var() > n_vars)
      throw Error(ErrorKind::VariableOutOfRange,
                  "fixed variable " + std::to_string(max_var()) + " exceeds n=" + std::to_string(n_vars));
  }

  friend bool operator==(const FixedSet&, const FixedSet&) = default;

 private:
  std::vector<Literal> lits_;
};

// The canonical fixed set [n] \ [n-f]: the last f variables, all positive.
inline FixedSet canonical_fixed_set(std::int32_t n, std::int32_t f) {
  if (f < 0 || f > n) throw Error(ErrorKind::InvalidSpec, "need 0 <= f <= n");
  std::vector<Literal> lits;
  lits.reserve(static_cast<std::size_t>(f));
  for (std::int32_t v = n - f + 1; v <= n; ++v) lits.emplace_back(v);
  return FixedSet(std::move(lits));
}

inline bool evaluate(const Clause& clause, const Assignment& x) {
  for (Literal l : clause)
    if (x.satisfies(l)) return true;
  return false;
}

inline bool evaluate(const CnfFormula& formula, const Assignment& x) {
  if (x.size() != static_cast<std::size_t>(formula.n_vars()))
    throw Error(ErrorKind::LengthMismatch, "assignment length " + std::to_string(x.size()) +
                                               " != n=" + std::to_string(formula.n_vars()));
  for (const Clause& c : formula.clauses())
    if (!evaluate(c, x)) return false;
  return true;
}

// x_L: covered entries are overwritten by the fixed polarity.
inline Assignment apply_fixed(Assignment x, const FixedSet& fixed) {
  fixed.check_range(static_cast<std::int32_t>(x.size()));
  for (Literal l : fixed) x.set(l.var(), l.positive());
  return x;
}

// Appends each fixed literal as a unit clause. Satisfiability of the result
// equals satisfiability of the formula restricted by the fixed set.
inline CnfFormula with_units(const CnfFormula& formula, const FixedSet& fixed) {
  fixed.check_range(formula.n_vars());
  std::vector<Clause> clauses = formula.clauses();
  for (Literal l : fixed) clauses.push_back(Clause(std::span<const Literal>(&l, 1)));
  return CnfFormula(formula.n_vars(), std::move(clauses));
}

}  // namespace critsat
