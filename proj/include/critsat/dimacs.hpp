#pragma once

// DIMACS CNF reading and writing. Clauses are canonicalized on input;
// clauses that repeat a variable are rejected.

#include <charconv>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "critsat/formula.hpp"

namespace critsat {

namespace detail {

inline std::int64_t parse_int(std::string_view tok, std::size_t line_no) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw Error(ErrorKind::SyntaxError,
                "line " + std::to_string(line_no) + ": bad integer '" + std::string(tok) + "'");
  return v;
}

}  // namespace detail

inline CnfFormula parse_dimacs(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::int64_t n = 0, m = 0;
  std::vector<Clause> clauses;
  std::vector<Literal> pending;

  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tokens(line);
    std::string tok;
    if (!(tokens >> tok)) continue;
    if (tok[0] == 'c') continue;
    if (tok == "%") break;  // SATLIB end marker
    if (tok == "p") {
      if (have_header) throw Error(ErrorKind::SyntaxError, "duplicate problem line");
      std::string fmt, ns, ms, extra;
      if (!(tokens >> fmt >> ns >> ms) || fmt != "cnf" || (tokens >> extra))
        throw Error(ErrorKind::SyntaxError, "line " + std::to_string(line_no) + ": expected 'p cnf <n> <m>'");
      n = detail::parse_int(ns, line_no);
      m = detail::parse_int(ms, line_no);
      if (n < 0 || m < 0 || n > INT32_MAX)
        throw Error(ErrorKind::SyntaxError, "negative or oversized header values");
      have_header = true;
      continue;
    }
    if (!have_header) throw Error(ErrorKind::SyntaxError, "clause data before 'p cnf' header");
    do {
      std::int64_t v = detail::parse_int(tok, line_no);
      if (v == 0) {
        if (pending.empty()) throw Error(ErrorKind::SyntaxError, "empty clause");
        clauses.push_back(canonicalize_clause(pending));
        pending.clear();
        continue;
      }
      if (v > n || -v > n)
        throw Error(ErrorKind::VariableOutOfRange,
                    "literal " + std::to_string(v) + " exceeds n=" + std::to_string(n));
      if (pending.size() == kMaxClauseWidth)
        throw Error(ErrorKind::ClauseWidthError, "clause wider than " + std::to_string(kMaxClauseWidth));
      pending.emplace_back(static_cast<std::int32_t>(v));
    } while (tokens >> tok);
  }
  if (!have_header) throw Error(ErrorKind::SyntaxError, "missing 'p cnf' header");
  if (!pending.empty()) throw Error(ErrorKind::SyntaxError, "last clause is not 0-terminated");
  if (static_cast<std::int64_t>(clauses.size()) != m)
    throw Error(ErrorKind::SyntaxError, "header declares " + std::to_string(m) + " clauses, found " +
                                            std::to_string(clauses.size()));
  return CnfFormula(static_cast<std::int32_t>(n), std::move(clauses));
}

inline std::string write_dimacs(const CnfFormula& formula) {
  std::string out = "p cnf " + std::to_string(formula.n_vars()) + " " + std::to_string(formula.size()) + "\n";
  for (const Clause& c : formula.clauses()) {
    for (Literal l : c) {
      out += std::to_string(l.value());
      out += ' ';
    }
    out += "0\n";
  }
  return out;
}

}  // namespace critsat
