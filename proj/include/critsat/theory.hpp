#pragma once

// Closed-form quantities for random 2-SAT under fixing, and the critical
// Galton-Watson process with Poisson(1) offspring.

#include <array>
#include <cmath>
#include <cstdint>
#include <string_view>

#include <boost/rational.hpp>

#include "critsat/error.hpp"
#include "critsat/rng.hpp"

namespace critsat {

using Rational = boost::rational<std::int64_t>;

// Law of the category of one uniform 2-clause when L = [n] \ [n-f].
struct CategoryProbs {
  Rational p0, p1, p2, pstar;

  std::array<Rational, 4> as_array() const { return {p0, p1, p2, pstar}; }
  std::array<double, 4> as_double() const {
    auto d = [](Rational r) { return boost::rational_cast<double>(r); };
    return {d(p0), d(p1), d(p2), d(pstar)};
  }
  friend bool operator==(const CategoryProbs&, const CategoryProbs&) = default;
};

//   p0 = f(f-1) / (4n(n-1))          p1 = (n-f)f / (n(n-1))
//   p2 = (n-f)(n-f-1) / (n(n-1))     p* = (n - f/4 - 3/4)f / (n(n-1))
inline CategoryProbs clause_category_probs(std::int64_t n, std::int64_t f) {
  if (n < 2 || f < 0 || f > n) throw Error(ErrorKind::InvalidSpec, "need n >= 2 and 0 <= f <= n");
  const std::int64_t denom = 4 * n * (n - 1);
  return {Rational(f * (f - 1), denom), Rational(4 * (n - f) * f, denom),
          Rational(4 * (n - f) * (n - f - 1), denom), Rational((4 * n - f - 3) * f, denom)};
}

inline constexpr std::int64_t kEnumerationMaxVars = 200;

// Counts (|A_0 ∩ D|, |A_1 ∩ D|, |A_2 ∩ D|, |A_* ∩ D|) by walking every
// 2-clause of D with L = [n] \ [n-f]. Independent of the propagation code.
inline std::array<std::int64_t, 4> enumerate_category_counts(std::int64_t n, std::int64_t f) {
  if (n > kEnumerationMaxVars) throw Error(ErrorKind::TooLarge, "enumeration limited to n <= 200");
  if (n < 2 || f < 0 || f > n) throw Error(ErrorKind::InvalidSpec, "need n >= 2 and 0 <= f <= n");
  auto in_l = [&](std::int64_t lit) { return lit > n - f; };        // positive fixed literal
  auto in_neg_l = [&](std::int64_t lit) { return -lit > n - f; };   // negation of a fixed literal
  std::array<std::int64_t, 4> counts{};
  for (std::int64_t a = 1; a <= n; ++a) {
    for (std::int64_t b = a + 1; b <= n; ++b) {
      for (std::int64_t sa : {1, -1}) {
        for (std::int64_t sb : {1, -1}) {
          const std::int64_t la = sa * a, lb = sb * b;
          const bool covered_a = in_l(la) || in_neg_l(la);
          const bool covered_b = in_l(lb) || in_neg_l(lb);
          if (in_l(la) || in_l(lb))
            ++counts[3];
          else if (in_neg_l(la) && in_neg_l(lb))
            ++counts[0];
          else if (covered_a != covered_b)
            ++counts[1];
          else
            ++counts[2];
        }
      }
    }
  }
  return counts;
}

// Lower bound (1 - m/n)^m on P(F_1(n, m) is satisfiable).
inline double one_sat_bound(std::int64_t n, std::int64_t m) {
  if (m < 0 || n < m) throw Error(ErrorKind::InvalidSpec, "need n >= m >= 0");
  if (m == 0) return 1.0;
  return std::pow(1.0 - static_cast<double>(m) / static_cast<double>(n), static_cast<double>(m));
}

// Poisson(mean) by sequential inversion below mean 10 and by the PTRS
// transformed-rejection method (Hormann 1993) above. Both consume the stream
// deterministically.
inline std::int64_t sample_poisson(double mean, RngStream& rng) {
  if (mean <= 0.0) return 0;
  if (mean < 10.0) {
    const double u = rng.uniform01();
    double p = std::exp(-mean);
    double cdf = p;
    std::int64_t k = 0;
    while (u >= cdf) {
      ++k;
      p *= mean / static_cast<double>(k);
      const double next = cdf + p;
      if (next == cdf) break;  // tail underflow
      cdf = next;
    }
    return k;
  }
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = rng.uniform01() - 0.5;
    const double v = rng.uniform01();
    const double us = 0.5 - std::fabs(u);
    const auto k = static_cast<std::int64_t>(std::floor((2.0 * a / us + b) * u + mean + 0.43));
    if (us >= 0.07 && v <= vr) return k;
    if (k < 0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
        -mean + static_cast<double>(k) * loglam - std::lgamma(static_cast<double>(k) + 1.0))
      return k;
  }
}

// One generation of the critical process: X' | X = x ~ Poisson(x).
inline std::int64_t gw_generation(std::int64_t x, RngStream& rng) {
  if (x < 0) throw Error(ErrorKind::InvalidSpec, "population must be nonnegative");
  return sample_poisson(static_cast<double>(x), rng);
}

struct GwConfig {
  std::int64_t x0 = 1;
  std::int64_t max_gen = 100;

  void validate() const {
    if (x0 < 0 || max_gen < 0) throw Error(ErrorKind::InvalidSpec, "x0 and max_gen must be nonnegative");
  }
};

// Population after max_gen generations; stops early at extinction.
inline std::int64_t gw_run(const GwConfig& cfg, RngStream& rng) {
  std::int64_t x = cfg.x0;
  for (std::int64_t g = 0; g < cfg.max_gen && x > 0; ++g) x = gw_generation(x, rng);
  return x;
}

enum class BudgetRegime { Over, Under };

inline std::string_view to_string(BudgetRegime r) { return r == BudgetRegime::Over ? "OVER" : "UNDER"; }

struct RoundBudget {
  BudgetRegime regime = BudgetRegime::Over;
  std::int64_t n = 0;
  double q = 0;
  std::int64_t rounds = 0;
};

// OVER:  R = floor(n^(1-2q) ln n)
// UNDER: R = floor(n^(1-2q) / (ln n)^3)
inline RoundBudget rounds_budget(std::int64_t n, double q, BudgetRegime regime) {
  if (n < 3 || !(q > 0.0) || q > 0.5)
    throw Error(ErrorKind::InvalidSpec, "rounds_budget needs n >= 3 and 0 < q <= 1/2");
  const double nd = static_cast<double>(n);
  const double base = std::pow(nd, 1.0 - 2.0 * q);
  const double ln = std::log(nd);
  const double value = regime == BudgetRegime::Over ? base * ln : base / (ln * ln * ln);
  return {regime, n, q, static_cast<std::int64_t>(std::floor(value))};
}

}  // namespace critsat
