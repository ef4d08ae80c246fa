#include <gtest/gtest.h>

#include "lasp/parser.hpp"
#include "lasp/render.hpp"

using namespace lasp;

namespace {

const char* kTinyDomain = R"((define (domain tiny)
  (:requirements :typing :negative-preconditions :numeric-fluents)
  (:types receptacle - object robot)
  (:predicates (is-empty-handed ?r - robot) (in ?obj - object ?rec - receptacle))
  (:functions (temperature ?obj - object))
  (:action open
    :parameters (?r - robot)
    :precondition (and (is-empty-handed ?r))
    :effect (and (not (is-empty-handed ?r))))
))";

TEST(ParseDomain, SingleActionWithOneLiteralPrecondition) {
  Domain d = parse_domain(kTinyDomain);
  ASSERT_EQ(d.actions.size(), 1u);
  const ActionSchema& open = d.actions[0];
  EXPECT_EQ(open.name, "open");
  ASSERT_EQ(open.precondition.conjuncts.size(), 1u);
  const auto& lit = std::get<Literal>(open.precondition.conjuncts[0]);
  EXPECT_TRUE(lit.positive);
  EXPECT_EQ(lit.atom.predicate, "is-empty-handed");
}

TEST(ParseDomain, FunctionDeclaration) {
  Domain d = parse_domain(kTinyDomain);
  ASSERT_EQ(d.functions.size(), 1u);
  EXPECT_EQ(d.functions[0].name, "temperature");
  ASSERT_EQ(d.functions[0].params.size(), 1u);
  EXPECT_EQ(d.functions[0].params[0].name, "?obj");
  EXPECT_EQ(d.functions[0].params[0].type, "object");
}

TEST(ParseDomain, UndeclaredParameterTypeIsAnError) {
  const char* text = R"((define (domain bad)
    (:predicates (p ?x - gizmo))
  ))";
  try {
    parse_domain(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("gizmo"), std::string::npos);
    EXPECT_GT(e.line(), 0);
  }
}

TEST(ParseDomain, UnknownRequirementFlag) {
  EXPECT_THROW(parse_domain("(define (domain x) (:requirements :durative-actions))"), ParseError);
}

TEST(ParseDomain, DuplicateSignature) {
  EXPECT_THROW(parse_domain("(define (domain x) (:predicates (p) (p)))"), ParseError);
  EXPECT_THROW(
      parse_domain("(define (domain x) (:predicates (p)) (:functions (p)))"),
      ParseError);
}

TEST(ParseDomain, UnbalancedParentheses) {
  EXPECT_THROW(parse_domain("(define (domain x)"), ParseError);
}

TEST(ParseDomain, CaseIsNormalizedToLower) {
  Domain d = parse_domain("(define (Domain Mixed) (:predicates (HoldIng ?R - Object)))");
  EXPECT_EQ(d.name, "mixed");
  EXPECT_EQ(d.predicates[0].name, "holding");
  EXPECT_EQ(d.predicates[0].params[0].name, "?r");
}

TEST(ParseDomain, CommentsRunToEndOfLine) {
  Domain d = parse_domain("; header\n(define (domain c) ; trailing\n (:predicates (p)))");
  EXPECT_EQ(d.name, "c");
}

TEST(ParseDomain, AddDeleteOverlapRejected) {
  const char* text = R"((define (domain x)
    (:predicates (p ?a - object))
    (:action a :parameters (?a - object) :precondition (and) :effect (and (p ?a) (not (p ?a))))
  ))";
  EXPECT_THROW(parse_domain(text), ParseError);
}

const char* kProblemDomain = R"((define (domain kitchen)
  (:requirements :typing :numeric-fluents)
  (:types receptacle location - object)
  (:predicates (in ?obj - object ?rec - receptacle) (on ?obj - object ?loc - location))
  (:functions (temperature ?obj - object))
))";

TEST(ParseProblem, InitAtomAndFluent) {
  Domain d = parse_domain(kProblemDomain);
  Problem p = parse_problem(R"((define (problem x) (:domain kitchen)
    (:objects apple sandwich - object fridge - receptacle)
    (:init (in apple fridge) (= (temperature sandwich) 5))
    (:goal (in apple fridge))))",
                            d);
  EXPECT_EQ(p.init_atoms.count(Atom{"in", {"apple", "fridge"}}), 1u);
  auto it = p.init_fluents.find(GroundFunction{"temperature", {"sandwich"}});
  ASSERT_NE(it, p.init_fluents.end());
  EXPECT_EQ(it->second, Rational(5));
}

TEST(ParseProblem, UndeclaredObjectInGoal) {
  Domain d = parse_domain(kProblemDomain);
  EXPECT_THROW(parse_problem(R"((define (problem x) (:domain kitchen)
    (:objects sandwich - object)
    (:init)
    (:goal (on sandwich plate))))",
                             d),
               ParseError);
}

TEST(ParseProblem, UnknownPredicate) {
  Domain d = parse_domain(kProblemDomain);
  EXPECT_THROW(parse_problem(R"((define (problem x) (:domain kitchen)
    (:objects a - object)
    (:init (held a))
    (:goal (and))))",
                             d),
               ParseError);
}

TEST(ParseProblem, WrongDomainName) {
  Domain d = parse_domain(kProblemDomain);
  EXPECT_THROW(parse_problem("(define (problem x) (:domain other) (:goal (and)))", d), ParseError);
}

TEST(ReplyExpression, PositiveLiteral) {
  Condition c = parse_reply_expression("(is-open ?rec)");
  ASSERT_EQ(c.conjuncts.size(), 1u);
  const auto& lit = std::get<Literal>(c.conjuncts[0]);
  EXPECT_TRUE(lit.positive);
  EXPECT_EQ(lit.atom.predicate, "is-open");
}

TEST(ReplyExpression, Comparison) {
  Condition c = parse_reply_expression("(<= (weight ?obj) (lift-capacity ?r))");
  const auto& cmp = std::get<Comparison>(c.conjuncts[0]);
  EXPECT_EQ(cmp.op, CompareOp::LessEq);
  EXPECT_EQ(std::get<FunctionApp>(cmp.lhs).function, "weight");
}

TEST(ReplyExpression, ConjunctionIsAGrammarViolation) {
  EXPECT_THROW(parse_reply_expression("(and (a) (b))"), ConditionGrammarError);
}

TEST(ReplyExpression, ComparisonWithConstantRejected) {
  // the translator grammar demands two function applications
  EXPECT_THROW(parse_reply_expression("(<= (weight ?obj) 5)"), ConditionGrammarError);
}

TEST(ConditionSexpr, TypecheckedAgainstDomainAndParams) {
  Domain d = parse_domain(R"((define (domain k)
    (:requirements :typing :numeric-fluents)
    (:types receptacle - object robot)
    (:predicates (is-open ?rec - receptacle))
    (:functions (temperature ?obj - object) (tolerance-temperature ?r - robot))
  ))");
  std::vector<TypedVar> params = {{"?r", "robot"}, {"?obj", "object"}, {"?rec", "receptacle"}};
  Condition ok = parse_condition_sexpr("(<= (temperature ?obj) (tolerance-temperature ?r))", d, params);
  EXPECT_EQ(ok.conjuncts.size(), 1u);
  EXPECT_THROW(parse_condition_sexpr("(is-open ?obj)", d, params), ConditionTypeError);
}

}  // namespace
