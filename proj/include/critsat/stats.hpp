#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>

#include <boost/math/distributions/chi_squared.hpp>

#include "critsat/error.hpp"

namespace critsat {

inline double binomial_stderr(double p_hat, std::int64_t trials) {
  if (trials <= 0) return 0.0;
  return std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(trials));
}

inline double pooled_sigma(double se_a, double se_b) { return std::sqrt(se_a * se_a + se_b * se_b); }

struct ChiSquareResult {
  double statistic = 0.0;
  std::int64_t df = 0;
  double p_value = 1.0;

  bool passes(double significance) const { return p_value >= significance; }
};

// Pearson goodness of fit of observed counts against category
// probabilities. Zero-probability categories are dropped from the degrees of
// freedom; any count observed in one makes the fit fail outright.
inline ChiSquareResult chi_square_gof(std::span<const std::int64_t> observed, std::span<const double> probs) {
  if (observed.size() != probs.size()) throw Error(ErrorKind::LengthMismatch, "observed/probability size mismatch");
  std::int64_t total = 0;
  for (auto o : observed) total += o;
  ChiSquareResult r;
  std::int64_t used = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double expected = probs[i] * static_cast<double>(total);
    if (probs[i] <= 0.0) {
      if (observed[i] > 0) {
        r.statistic = std::numeric_limits<double>::infinity();
        r.p_value = 0.0;
        return r;
      }
      continue;
    }
    const double d = static_cast<double>(observed[i]) - expected;
    r.statistic += d * d / expected;
    ++used;
  }
  r.df = used - 1;
  if (r.df <= 0) {
    r.p_value = 1.0;
    return r;
  }
  boost::math::chi_squared dist(static_cast<double>(r.df));
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

}  // namespace critsat
