#include <gtest/gtest.h>

#include "lasp/scenario.hpp"
#include "lasp/search.hpp"
#include "support/paths.hpp"
#include "support/random_model.hpp"

using namespace lasp;

namespace {

TEST(FindPlan, StoreFruitCompleteModelNeedsThreeSteps) {
  auto bundle = load_bundle(testutil::scenario_dir("complete_store_fruit"));
  auto result = find_plan(bundle.world.truth_domain, bundle.world.truth_problem);
  ASSERT_TRUE(result.found());
  EXPECT_EQ(result.plan.steps.size(), 3u);
  EXPECT_TRUE(validate_plan(bundle.world.truth_domain, bundle.world.truth_problem, result.plan).ok());
}

TEST(FindPlan, HeatTasksMatchReportedOptima) {
  auto sandwich = load_bundle(testutil::scenario_dir("complete_heat_sandwich"));
  auto r1 = find_plan(sandwich.world.truth_domain, sandwich.world.truth_problem);
  ASSERT_TRUE(r1.found());
  EXPECT_EQ(r1.plan.steps.size(), 10u);

  auto milk = load_bundle(testutil::scenario_dir("complete_heat_milk"));
  auto r2 = find_plan(milk.world.truth_domain, milk.world.truth_problem);
  ASSERT_TRUE(r2.found());
  EXPECT_EQ(r2.plan.steps.size(), 13u);
}

TEST(FindPlan, UnreachableGoalIsProvenNoPlan) {
  Domain d = parse_domain(R"((define (domain u)
    (:predicates (p ?x - object) (q ?x - object))
    (:action flip :parameters (?x - object) :precondition (and (p ?x)) :effect (and (not (p ?x)))))
  )");
  Problem p = parse_problem(R"((define (problem u) (:domain u)
    (:objects a - object) (:init (p a)) (:goal (q a))))",
                            d);
  auto result = find_plan(d, p);
  EXPECT_EQ(result.status, SearchResult::Status::NoPlan);
}

TEST(FindPlan, BudgetExhaustionIsDistinctFromNoPlan) {
  auto bundle = load_bundle(testutil::scenario_dir("complete_heat_milk"));
  SearchBudget tiny;
  tiny.max_expansions = 5;
  auto result = find_plan(bundle.world.truth_domain, bundle.world.truth_problem, tiny);
  EXPECT_EQ(result.status, SearchResult::Status::BudgetExhausted);
}

TEST(FindPlan, DeterministicAcrossRuns) {
  auto bundle = load_bundle(testutil::scenario_dir("complete_heat_milk"));
  auto a = find_plan(bundle.world.truth_domain, bundle.world.truth_problem);
  auto b = find_plan(bundle.world.truth_domain, bundle.world.truth_problem);
  ASSERT_TRUE(a.found());
  ASSERT_TRUE(b.found());
  ASSERT_EQ(a.plan.steps.size(), b.plan.steps.size());
  for (std::size_t i = 0; i < a.plan.steps.size(); ++i)
    EXPECT_EQ(a.plan.steps[i].str(), b.plan.steps[i].str());
}

TEST(FindPlan, AdditiveHeuristicAgreesOnFixtureLengths) {
  for (const char* id : {"complete_serve_fruit", "complete_store_fruit"}) {
    auto bundle = load_bundle(testutil::scenario_dir(id));
    auto blind = find_plan(bundle.world.truth_domain, bundle.world.truth_problem);
    auto guided = find_plan(bundle.world.truth_domain, bundle.world.truth_problem, {},
                            Heuristic::Additive);
    ASSERT_TRUE(blind.found());
    ASSERT_TRUE(guided.found());
    EXPECT_TRUE(
        validate_plan(bundle.world.truth_domain, bundle.world.truth_problem, guided.plan).ok());
  }
}

TEST(ValidatePlan, StoreFruitPlanValidatesAndSwapBreaksIt) {
  auto bundle = load_bundle(testutil::scenario_dir("complete_store_fruit"));
  auto result = find_plan(bundle.world.truth_domain, bundle.world.truth_problem);
  ASSERT_TRUE(result.found());
  ASSERT_EQ(result.plan.steps.size(), 3u);
  EXPECT_TRUE(validate_plan(bundle.world.truth_domain, bundle.world.truth_problem, result.plan).ok());

  Plan swapped = result.plan;
  std::swap(swapped.steps[0], swapped.steps[1]);
  auto v = validate_plan(bundle.world.truth_domain, bundle.world.truth_problem, swapped);
  EXPECT_EQ(v.status, ValidationResult::Status::StepFailed);
  // (pick apple) now comes first and succeeds; the swapped-in (open fridge)
  // fails at index 1 because the gripper is full
  EXPECT_EQ(v.step, 1u);
  EXPECT_EQ(v.unmet, "(is-empty-handed agent)");
}

TEST(ValidatePlan, EmptyPlanIsFineWhenGoalAlreadyHolds) {
  Domain d = parse_domain(R"((define (domain e) (:predicates (p ?x - object))))");
  Problem p = parse_problem(R"((define (problem e) (:domain e)
    (:objects a - object) (:init (p a)) (:goal (p a))))",
                            d);
  EXPECT_TRUE(validate_plan(d, p, Plan{}).ok());
}

TEST(ValidatePlan, ReportsGoalUnreached) {
  Domain d = parse_domain(R"((define (domain e) (:predicates (p ?x - object))))");
  Problem p = parse_problem(R"((define (problem e) (:domain e)
    (:objects a - object) (:init) (:goal (p a))))",
                            d);
  auto v = validate_plan(d, p, Plan{});
  EXPECT_EQ(v.status, ValidationResult::Status::GoalUnreached);
  EXPECT_EQ(v.unmet, "(p a)");
}

// Small-scale version of the search-vs-brute-force equivalence; the
// acceptance suite runs the full 200-model sweep.
TEST(FindPlan, AgreesWithBruteForceOracleOnRandomModels) {
  testutil::ModelGenerator gen(1337);
  int decided = 0;
  for (int i = 0; i < 80 && decided < 40; ++i) {
    testutil::RandomModel m = gen.next();
    testutil::BruteForceResult oracle = testutil::brute_force_search(m.domain, m.problem, 50000);
    if (!oracle.exhausted) continue;
    ++decided;
    auto result = find_plan(m.domain, m.problem);
    if (oracle.plan_length) {
      ASSERT_TRUE(result.found()) << render(m.domain) << render(m.problem);
      EXPECT_EQ(result.plan.steps.size(), *oracle.plan_length);
      EXPECT_TRUE(validate_plan(m.domain, m.problem, result.plan).ok());
    } else {
      EXPECT_EQ(result.status, SearchResult::Status::NoPlan)
          << render(m.domain) << render(m.problem);
    }
  }
  EXPECT_GE(decided, 20);
}

}  // namespace
