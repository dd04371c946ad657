#include <gtest/gtest.h>

#include "critsat/formula.hpp"

using namespace critsat;

namespace {

CnfFormula intro_formula() {
  return CnfFormula(4, {make_clause({1, 2}), make_clause({-2, 3}), make_clause({-3, 4}), make_clause({-1, -4}),
                        make_clause({2, 4})});
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorKind::IoError;
}

}  // namespace

TEST(MakeClause, AcceptsIncreasingVariables) {
  const Clause c = make_clause({1, 2});
  EXPECT_EQ(c.width(), 2u);
  EXPECT_EQ(c[0].value(), 1);
  EXPECT_EQ(c[1].value(), 2);
}

TEST(MakeClause, RejectsOrderAndDuplicates) {
  EXPECT_EQ(kind_of([] { make_clause({2, -1}); }), ErrorKind::VariableOrderViolation);
  EXPECT_EQ(kind_of([] { make_clause({1, -1}); }), ErrorKind::DuplicateVariable);
  EXPECT_EQ(kind_of([] { make_clause({1, 2, 3, 4, 5}); }), ErrorKind::ClauseWidthError);
  EXPECT_EQ(kind_of([] { make_clause({}); }), ErrorKind::InvalidSpec);
}

TEST(CanonicalizeClause, SortsByVariable) {
  EXPECT_EQ(canonicalize_clause({-4, -3}), make_clause({-3, -4}));
  EXPECT_EQ(canonicalize_clause({3, -1}), make_clause({-1, 3}));
  EXPECT_EQ(kind_of([] { canonicalize_clause({2, -2}); }), ErrorKind::DuplicateVariable);
}

TEST(Evaluate, IntroFormulaHasItsKnownModel) {
  const CnfFormula phi = intro_formula();
  EXPECT_TRUE(evaluate(phi, Assignment{false, true, true, true}));
  EXPECT_FALSE(evaluate(phi, Assignment{true, true, true, true}));
}

TEST(Evaluate, EmptyFormulaIsTrue) {
  const CnfFormula empty(3, {});
  EXPECT_TRUE(evaluate(empty, Assignment{false, false, false}));
  EXPECT_TRUE(evaluate(empty, Assignment{true, false, true}));
}

TEST(Evaluate, LengthMismatch) {
  EXPECT_EQ(kind_of([] { (void)evaluate(intro_formula(), Assignment{true, true}); }), ErrorKind::LengthMismatch);
}

TEST(Formula, RejectsOutOfRangeVariables) {
  EXPECT_EQ(kind_of([] { CnfFormula(2, {make_clause({1, 3})}); }), ErrorKind::VariableOutOfRange);
}

TEST(ApplyFixed, OverridesCoveredVariables) {
  EXPECT_EQ(apply_fixed(Assignment{false, false}, FixedSet{1}), (Assignment{true, false}));
  EXPECT_EQ(apply_fixed(Assignment{true, true}, FixedSet{-2}), (Assignment{true, false}));
  EXPECT_EQ(apply_fixed(Assignment{true, false}, FixedSet{}), (Assignment{true, false}));
}

TEST(FixedSet, ConsistencyAndLookup) {
  EXPECT_EQ(kind_of([] { FixedSet{3, -3}; }), ErrorKind::InconsistentFixedSet);
  const FixedSet l{4, -2, 4};
  EXPECT_EQ(l.size(), 2u);
  EXPECT_TRUE(l.contains(Literal(-2)));
  EXPECT_FALSE(l.contains(Literal(2)));
  EXPECT_TRUE(l.covers(4));
  EXPECT_FALSE(l.covers(1));
  EXPECT_EQ(kind_of([&] { l.check_range(3); }), ErrorKind::VariableOutOfRange);
}

TEST(FixedSet, CanonicalSuffix) {
  const FixedSet l = canonical_fixed_set(5, 2);
  EXPECT_EQ(l, (FixedSet{4, 5}));
  EXPECT_TRUE(canonical_fixed_set(5, 0).empty());
}

TEST(WithUnits, AppendsUnitClauses) {
  const CnfFormula phi = with_units(intro_formula(), FixedSet{-3});
  ASSERT_EQ(phi.size(), 6u);
  EXPECT_EQ(phi[5].width(), 1u);
  EXPECT_EQ(phi[5][0].value(), -3);
}
