#include <gtest/gtest.h>

#include "lasp/oracle.hpp"
#include "lasp/scenario.hpp"
#include "lasp/search.hpp"
#include "support/paths.hpp"
#include "support/random_model.hpp"

using namespace lasp;

namespace {

Plan plan_of(const OracleWorld& world, std::initializer_list<std::pair<const char*, std::vector<std::string>>> steps) {
  Plan plan;
  for (const auto& [name, binding] : steps) {
    const ActionSchema* schema = world.truth_domain.find_action(name);
    EXPECT_NE(schema, nullptr) << name;
    plan.steps.push_back(instantiate(*schema, binding));
  }
  return plan;
}

TEST(Execute, StoreFruitWithoutOpeningFailsAtThePlacement) {
  auto bundle = load_bundle(testutil::scenario_dir("case2"));
  Plan plan = plan_of(bundle.world, {{"pick_from_location", {"agent", "apple", "table"}},
                                     {"place_in_receptacle", {"agent", "apple", "fridge"}}});
  auto outcome = execute(bundle.world, plan);
  ASSERT_EQ(outcome.kind, ExecutionOutcome::Kind::Failed);
  EXPECT_EQ(outcome.error->step, 1u);
  EXPECT_EQ(outcome.error->error_class, (ErrorClass{"place_in_receptacle", "is-open"}));
  EXPECT_EQ(outcome.error->observation,
            "The fridge door was closed; the apple bumped against it and could not be put inside.");
}

TEST(Execute, PouringMilkOntoTheSandwichSpills) {
  auto bundle = load_bundle(testutil::scenario_dir("case5"));
  // stage: open fridge, take the bottle, move the sandwich onto the table first
  Plan plan = plan_of(bundle.world, {{"open_receptacle", {"agent", "fridge"}},
                                     {"pick_from_receptacle", {"agent", "sandwich", "fridge"}},
                                     {"place_on_location", {"agent", "sandwich", "table"}},
                                     {"pick_from_receptacle", {"agent", "bottle", "fridge"}},
                                     {"pour_liquid", {"agent", "milk", "bottle", "sandwich", "table"}}});
  auto outcome = execute(bundle.world, plan);
  ASSERT_EQ(outcome.kind, ExecutionOutcome::Kind::Failed);
  EXPECT_EQ(outcome.error->step, 4u);
  EXPECT_EQ(outcome.error->error_class, (ErrorClass{"pour_liquid", "can-contain-liquid"}));
  EXPECT_EQ(outcome.error->observation,
            "The milk soaked the sandwich and overflowed onto the table, causing a mess.");
}

// Completeness soundness: a plan found on the truth model executes to
// goal_reached on every shipped fixture, with no execution error.
TEST(Execute, TruthModelPlansReachTheGoalOnEveryFixture) {
  for (const char* id : {"case1", "case2", "case3", "case4", "case5", "case6", "case7", "case8",
                         "case9", "complete_serve_fruit", "complete_store_fruit",
                         "complete_heat_sandwich", "complete_heat_milk"}) {
    auto bundle = load_bundle(testutil::scenario_dir(id));
    auto result = find_plan(bundle.world.truth_domain, bundle.world.truth_problem);
    ASSERT_TRUE(result.found()) << id;
    auto outcome = execute(bundle.world, result.plan);
    EXPECT_EQ(outcome.kind, ExecutionOutcome::Kind::GoalReached) << id;
  }
}

TEST(Execute, FirstFailureMatchesValidatePlanUnderTheTruthModel) {
  auto bundle = load_bundle(testutil::scenario_dir("case2"));
  Plan plan = plan_of(bundle.world, {{"pick_from_location", {"agent", "apple", "table"}},
                                     {"place_in_receptacle", {"agent", "apple", "fridge"}}});
  auto outcome = execute(bundle.world, plan);
  auto validation = validate_plan(bundle.world.truth_domain, bundle.world.truth_problem, plan);
  ASSERT_EQ(outcome.kind, ExecutionOutcome::Kind::Failed);
  ASSERT_EQ(validation.status, ValidationResult::Status::StepFailed);
  EXPECT_EQ(outcome.error->step, validation.step);
}

TEST(Observe, HotPickTemplateMatchesTheRecordedText) {
  auto bundle = load_bundle(testutil::scenario_dir("case3"));
  const ActionSchema* pick = bundle.world.truth_domain.find_action("pick_from_receptacle");
  GroundAction action = instantiate(*pick, {"agent", "sandwich", "microwave"});
  ErrorClass cls{"pick_from_receptacle", "temperature-le-tolerance-temperature"};
  std::string text = observe(bundle.world, cls, action);
  EXPECT_EQ(text, "The agent's sensors detected excessive heat and immediately released the sandwich.");
  EXPECT_EQ(text, observe(bundle.world, cls, action));  // deterministic
}

TEST(Execute, PureFunctionOfWorldAndPlan) {
  auto bundle = load_bundle(testutil::scenario_dir("case2"));
  Plan plan = plan_of(bundle.world, {{"pick_from_location", {"agent", "apple", "table"}},
                                     {"place_in_receptacle", {"agent", "apple", "fridge"}}});
  auto a = execute(bundle.world, plan);
  auto b = execute(bundle.world, plan);
  ASSERT_EQ(a.kind, b.kind);
  EXPECT_EQ(a.error->observation, b.error->observation);
  EXPECT_EQ(a.final_state, b.final_state);
  EXPECT_EQ(a.steps_executed, b.steps_executed);
}

TEST(Observe, MissingTemplateIsAFixtureError) {
  auto bundle = load_bundle(testutil::scenario_dir("case3"));
  const ActionSchema* pick = bundle.world.truth_domain.find_action("pick_from_receptacle");
  GroundAction action = instantiate(*pick, {"agent", "sandwich", "microwave"});
  EXPECT_THROW(observe(bundle.world, ErrorClass{"pick_from_receptacle", "no-such"}, action),
               std::runtime_error);
}

TEST(DescribeAction, UsesTheScenarioSentences) {
  auto bundle = load_bundle(testutil::scenario_dir("case3"));
  const ActionSchema* pick = bundle.world.truth_domain.find_action("pick_from_receptacle");
  EXPECT_EQ(describe_action(bundle.world, instantiate(*pick, {"agent", "sandwich", "microwave"})),
            "Pick up the sandwich from the microwave.");
  const ActionSchema* pour = bundle.world.truth_domain.find_action("pour_liquid");
  EXPECT_EQ(describe_action(bundle.world,
                            instantiate(*pour, {"agent", "milk", "bottle", "sandwich", "table"})),
            "Pour the milk from the bottle into the sandwich which is on the table.");
}

TEST(QueryPropertyValue, CatalogueAnswers) {
  auto bundle = load_bundle(testutil::scenario_dir("case3"));
  auto glove = query_property_value(bundle.world, "glove", "is-heat-insulation");
  ASSERT_TRUE(glove.has_value());
  EXPECT_TRUE(std::get<bool>(*glove));

  auto sandwich = query_property_value(bundle.world, "sandwich", "can-contain-liquid");
  ASSERT_TRUE(sandwich.has_value());
  EXPECT_FALSE(std::get<bool>(*sandwich));

  auto bottle = query_property_value(bundle.world, "bottle", "temperature");
  ASSERT_TRUE(bottle.has_value());
  EXPECT_EQ(std::get<Rational>(*bottle), Rational(5));
}

TEST(QueryPropertyValue, UnknownPropertyIsAbsentAndUnknownObjectThrows) {
  auto bundle = load_bundle(testutil::scenario_dir("case3"));
  EXPECT_FALSE(query_property_value(bundle.world, "sandwich", "no-such-property").has_value());
  EXPECT_THROW(query_property_value(bundle.world, "spoon", "temperature"), std::runtime_error);
}

TEST(CandidateObjects, SubtractsTheAgentObjectsInCatalogueOrder) {
  auto case3 = load_bundle(testutil::scenario_dir("case3"));
  auto candidates = candidate_objects(case3.world, case3.agent_problem);
  ASSERT_EQ(candidates.size(), 3u);
  EXPECT_EQ(candidates[0].name, "cup");
  EXPECT_EQ(candidates[1].name, "glove");
  EXPECT_EQ(candidates[2].name, "knife");

  auto complete = load_bundle(testutil::scenario_dir("complete_heat_milk"));
  EXPECT_TRUE(candidate_objects(complete.world, complete.agent_problem).empty());

  auto case5 = load_bundle(testutil::scenario_dir("case5"));
  auto cup_only = candidate_objects(case5.world, case5.agent_problem);
  ASSERT_EQ(cup_only.size(), 1u);
  EXPECT_EQ(cup_only[0].name, "cup");
}

TEST(ConjunctSlug, StableTokens) {
  EXPECT_EQ(conjunct_slug(Literal{Atom{"is-open", {"?rec"}}, true}), "is-open");
  EXPECT_EQ(conjunct_slug(Literal{Atom{"is-open", {"?rec"}}, false}), "not-is-open");
  Comparison cmp;
  cmp.op = CompareOp::LessEq;
  cmp.lhs = FunctionApp{"temperature", {"?obj"}};
  cmp.rhs = FunctionApp{"tolerance-temperature", {"?r"}};
  EXPECT_EQ(conjunct_slug(cmp), "temperature-le-tolerance-temperature");
}

// Monotone repair target: growing the agent's preconditions toward the
// truth model's never turns a truth-executable plan into a failing one.
TEST(Execute, TruthExecutionIsIndependentOfAgentBeliefs) {
  auto bundle = load_bundle(testutil::scenario_dir("complete_store_fruit"));
  auto truth_plan = find_plan(bundle.world.truth_domain, bundle.world.truth_problem);
  ASSERT_TRUE(truth_plan.found());
  // strip agent-side preconditions: execution outcome must not change,
  // because the oracle re-instantiates steps against the truth schemas
  Plan stripped = truth_plan.plan;
  for (auto& step : stripped.steps) step.precondition.conjuncts.clear();
  EXPECT_EQ(execute(bundle.world, stripped).kind, ExecutionOutcome::Kind::GoalReached);
}

}  // namespace
