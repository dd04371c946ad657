#include <gtest/gtest.h>

#include <chrono>

#include "critsat/sampling.hpp"
#include "critsat/solve.hpp"

using namespace critsat;

namespace {

CnfFormula intro_formula() {
  return CnfFormula(4, {make_clause({1, 2}), make_clause({-2, 3}), make_clause({-3, 4}), make_clause({-1, -4}),
                        make_clause({2, 4})});
}

CnfFormula all_four_patterns() {
  return CnfFormula(2, {make_clause({1, 2}), make_clause({1, -2}), make_clause({-1, 2}), make_clause({-1, -2})});
}

}  // namespace

TEST(Solve2Sat, IntroFormulaWitnessIsTheUniqueModel) {
  const Verdict v = solve_2sat(intro_formula());
  ASSERT_TRUE(v.sat());
  ASSERT_TRUE(v.witness);
  EXPECT_EQ(*v.witness, (Assignment{false, true, true, true}));
}

TEST(Solve2Sat, SmallCases) {
  EXPECT_FALSE(solve_2sat(all_four_patterns()).sat());
  EXPECT_TRUE(solve_2sat(CnfFormula(3, {})).sat());
  EXPECT_TRUE(solve_2sat(CnfFormula(0, {})).sat());
  // unit clauses mixed in
  EXPECT_FALSE(solve_2sat(CnfFormula(2, {make_clause({1}), make_clause({-1, 2}), make_clause({-2})})).sat());
  const Verdict v = solve_2sat(CnfFormula(2, {make_clause({-1}), make_clause({1, 2})}));
  ASSERT_TRUE(v.sat());
  EXPECT_EQ(*v.witness, (Assignment{false, true}));
}

TEST(Solve2Sat, RejectsWideClauses) {
  EXPECT_THROW(solve_2sat(CnfFormula(3, {make_clause({1, 2, 3})})), Error);
}

TEST(Solve1Sat, Cases) {
  const std::vector<Literal> conflict{Literal(1), Literal(-1)};
  const std::vector<Literal> repeat{Literal(1), Literal(2), Literal(2)};
  EXPECT_FALSE(solve_1sat(conflict).sat());
  EXPECT_TRUE(solve_1sat(repeat).sat());
  EXPECT_TRUE(solve_1sat({}).sat());
}

TEST(BruteForce, ModelCounts) {
  const auto intro = brute_force_sat(intro_formula());
  EXPECT_TRUE(intro.sat);
  EXPECT_EQ(intro.model_count, 1);
  const auto unsat = brute_force_sat(all_four_patterns());
  EXPECT_FALSE(unsat.sat);
  EXPECT_EQ(unsat.model_count, 0);
  EXPECT_EQ(brute_force_sat(CnfFormula(3, {})).model_count, 8);
  EXPECT_THROW(brute_force_sat(CnfFormula(kBruteForceMaxVars + 1, {})), Error);
}

TEST(Solve2Sat, AgreesWithBruteForceOnRandomInstances) {
  int sat = 0;
  for (std::uint64_t t = 0; t < 10000; ++t) {
    RngStream r = derive_stream(31337, t);
    const auto m = static_cast<std::int64_t>(1 + r.below(20));
    const CnfFormula phi = sample_formula({10, m, 2}, r);
    const Verdict v = solve_2sat(phi);
    const BruteForceResult bf = brute_force_sat(phi);
    ASSERT_EQ(v.sat(), bf.sat) << "trial " << t;
    if (v.sat()) {
      ++sat;
      ASSERT_TRUE(evaluate(phi, *v.witness)) << "trial " << t;
    }
  }
  EXPECT_GT(sat, 1000);
  EXPECT_LT(sat, 10000);
}

TEST(Solve2Sat, LinearTimeEnvelope) {
  auto time_at = [](std::int32_t n) {
    RngStream r(5, static_cast<std::uint64_t>(n));
    const CnfFormula phi = sample_formula({n, n, 2}, r);
    double best = 1e9;
    for (int rep = 0; rep < 3; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      (void)solve_2sat(phi);
      best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
  };
  const double small = time_at(100000);
  const double large = time_at(1000000);
  // 10x the input should cost about 10x; allow cache effects but not n log n blowups
  EXPECT_LT(large / small, 15.0) << small << " s vs " << large << " s";
}
