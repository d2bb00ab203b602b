#include <gtest/gtest.h>


#include "oracle.hpp"
#include "vflow/condition.hpp"

using namespace vflow;

TEST(Condition, AtomRoundTripsThroughText) {
  for (const char* text : {"x > 0", "a != b", "a + b <= -3", "p == 0", "x1 >= -64"}) {
    Atom a = parse_atom(text);
    EXPECT_EQ(a.to_string(), text);
    EXPECT_EQ(parse_atom(a.to_string()), a);
  }
}

TEST(Condition, AtomListSplitsOnSemicolons) {
  Condition c = parse_atom_list("x > 0; y == 1");
  ASSERT_TRUE(c.is_atom_conjunction());
  ASSERT_EQ(c.atoms().size(), 2u);
  EXPECT_EQ(c.to_atom_list(), "x > 0; y == 1");
  EXPECT_TRUE(parse_atom_list("true").is_true());
}

TEST(Condition, SyntaxErrorsCarryColumns) {
  try {
    parse_atom("x >> 3", 10);
    FAIL() << "expected a syntax error";
  } catch (const AtomSyntaxError& e) {
    EXPECT_GE(e.column(), 10u);
  }
  EXPECT_THROW(parse_atom("x > "), AtomSyntaxError);
  EXPECT_THROW(parse_atom("3 > x"), AtomSyntaxError);
}

TEST(Condition, ConstantsFoldAndFlatten) {
  Condition x = Condition::of(Atom::var_const("x", CmpOp::gt, 0));
  Condition y = Condition::of(Atom::var_const("y", CmpOp::lt, 2));
  EXPECT_TRUE((x && Condition::bottom()).is_false());
  EXPECT_EQ(x && Condition::top(), x);
  EXPECT_TRUE((x || Condition::top()).is_true());
  EXPECT_EQ(((x && y) && x).children().size(), 3u);
}

TEST(Condition, SubstituteRenamesEveryOccurrence) {
  Condition c = parse_atom_list("v != 0; v + w > 1");
  Condition s = c.substitute("v", "p");
  EXPECT_EQ(s.to_atom_list(), "p != 0; p + w > 1");
  EXPECT_EQ(s.variables(), (std::set<std::string>{"p", "w"}));
}

TEST(Condition, NegationEvaluatesAsComplement) {
  Condition c = parse_atom_list("x > 1; x + y < 2") || parse_atom_list("y == x");
  Condition n = !c;
  for (const auto& env : oracle::assignments({"x", "y"}, -3, 3)) {
    auto look = [&](const std::string& k) { return env.at(k); };
    EXPECT_NE(c.evaluate(look), n.evaluate(look));
  }
}
