#include <gtest/gtest.h>

#include "lasp/engine.hpp"
#include "lasp/scenario.hpp"
#include "support/paths.hpp"

using namespace lasp;

namespace {

ScriptedBackend script_for(const std::string& id) {
  return ScriptedBackend::from_file(testutil::scenario_dir(id) + "/script.json");
}

std::vector<RefinementEvent::Kind> kinds(const EpisodeResult& r) {
  std::vector<RefinementEvent::Kind> out;
  for (const auto& e : r.events) out.push_back(e.kind);
  return out;
}

using K = RefinementEvent::Kind;

TEST(Episode, Case2AddsExactlyTheDoorPrecondition) {
  auto bundle = load_bundle(testutil::scenario_dir("case2"));
  auto backend = script_for("case2");
  LaspEngine engine(bundle, backend);
  auto result = engine.run_episode();
  EXPECT_EQ(result.outcome, EpisodeResult::Outcome::Success);
  ASSERT_EQ(result.events.size(), 1u);
  EXPECT_EQ(result.events[0].kind, K::PreconditionAdded);
  EXPECT_EQ(result.events[0].schema, "place_in_receptacle");
  EXPECT_EQ(result.events[0].conjunct, "(is-open ?rec)");
  EXPECT_EQ(result.events[0].error_class, "place_in_receptacle/is-open");
  EXPECT_EQ(backend.remaining(), 0u);
  // the repaired model carries the conjunct
  const ActionSchema* place = engine.knowledge().domain.find_action("place_in_receptacle");
  EXPECT_EQ(place->precondition.conjuncts.size(), 2u);
}

TEST(Episode, Case1RepairsWeightThenExpandsWithTheApple) {
  auto bundle = load_bundle(testutil::scenario_dir("case1"));
  auto backend = script_for("case1");
  LaspEngine engine(bundle, backend);
  auto result = engine.run_episode();
  EXPECT_EQ(result.outcome, EpisodeResult::Outcome::Success);
  EXPECT_EQ(kinds(result), (std::vector<K>{K::PreconditionAdded, K::PropertyAdded,
                                           K::PropertyAdded, K::ObjectAdded}));
  EXPECT_EQ(result.events[0].conjunct, "(<= (weight ?obj) (lift-capacity ?r))");
  EXPECT_EQ(result.events[1].property, "weight");
  EXPECT_TRUE(result.events[1].declared_new);
  EXPECT_EQ(result.events[1].env_property, "weight");  // exact-name tier, no LLM call
  EXPECT_EQ(result.events[2].property, "lift-capacity");
  EXPECT_EQ(result.events[3].object, "apple");
  // the injected apple carried its weight and its place on the table
  EXPECT_EQ(engine.knowledge().problem.init_fluents.at(GroundFunction{"weight", {"apple"}}),
            Rational(1));
  bool saw_location = false;
  for (const auto& item : result.events[3].acquired)
    if (item == "(on apple table)") saw_location = true;
  EXPECT_TRUE(saw_location);
  // and ended up served: the belief tracks the executed plan
  EXPECT_EQ(engine.knowledge().problem.init_atoms.count(Atom{"on", {"apple", "plate"}}), 1u);
}

TEST(Episode, Case4RepairsTheHeatDoorPrecondition) {
  auto bundle = load_bundle(testutil::scenario_dir("case4"));
  auto backend = script_for("case4");
  LaspEngine engine(bundle, backend);
  auto result = engine.run_episode();
  EXPECT_EQ(result.outcome, EpisodeResult::Outcome::Success);
  ASSERT_EQ(result.events.size(), 1u);
  EXPECT_EQ(result.events[0].schema, "heat_object");
  EXPECT_EQ(result.events[0].conjunct, "(not (is-open ?rec))");
}

TEST(Episode, Case5InventsAPropertyMatchesItAndAddsTheCup) {
  auto bundle = load_bundle(testutil::scenario_dir("case5"));
  auto backend = script_for("case5");
  LaspEngine engine(bundle, backend);
  auto result = engine.run_episode();
  EXPECT_EQ(result.outcome, EpisodeResult::Outcome::Success);
  EXPECT_EQ(kinds(result), (std::vector<K>{K::PreconditionAdded, K::PropertyAdded, K::ObjectAdded}));
  EXPECT_EQ(result.events[0].schema, "pour_liquid");
  EXPECT_EQ(result.events[0].conjunct, "(is-container ?obj2)");
  EXPECT_EQ(result.events[1].property, "is-container");
  EXPECT_EQ(result.events[1].env_property, "can-contain-liquid");  // via the LLM fallback tier
  EXPECT_TRUE(result.events[1].declared_new);
  EXPECT_EQ(result.events[2].object, "cup");
  // the cup's values came through the alias
  EXPECT_EQ(engine.knowledge().problem.init_atoms.count(Atom{"is-container", {"cup"}}), 1u);
  EXPECT_EQ(engine.knowledge().problem.init_atoms.count(Atom{"is-microwave-safe", {"cup"}}), 1u);
}

TEST(Episode, Case6AddsTheEmptyHandPrecondition) {
  auto bundle = load_bundle(testutil::scenario_dir("case6"));
  auto backend = script_for("case6");
  LaspEngine engine(bundle, backend);
  auto result = engine.run_episode();
  EXPECT_EQ(result.outcome, EpisodeResult::Outcome::Success);
  ASSERT_EQ(result.events.size(), 1u);
  EXPECT_EQ(result.events[0].schema, "don_insulator");
  EXPECT_EQ(result.events[0].conjunct, "(is-empty-handed ?r)");
  EXPECT_EQ(result.events[0].error_class, "don_insulator/is-empty-handed");
}

TEST(Episode, Case7AcquiresTemperaturesAndTheGlove) {
  auto bundle = load_bundle(testutil::scenario_dir("case7"));
  auto backend = script_for("case7");
  LaspEngine engine(bundle, backend);
  auto result = engine.run_episode();
  EXPECT_EQ(result.outcome, EpisodeResult::Outcome::Success);
  EXPECT_EQ(kinds(result), (std::vector<K>{K::PreconditionAdded, K::PropertyAdded,
                                           K::PropertyAdded, K::ObjectAdded}));
  EXPECT_EQ(result.events[3].object, "glove");
  // the agent heated the cup itself, so acquisition must not clobber the
  // tracked 90 with the catalogue's cold value
  EXPECT_EQ(engine.knowledge().problem.init_fluents.at(GroundFunction{"temperature", {"cup"}}),
            Rational(90));
  EXPECT_EQ(engine.knowledge().problem.init_fluents.at(GroundFunction{"temperature", {"knife"}}),
            Rational(20));
}

TEST(Episode, Case8StacksTwoRepairsAtDepthTwo) {
  auto bundle = load_bundle(testutil::scenario_dir("case8"));
  auto backend = script_for("case8");
  LaspEngine engine(bundle, backend);
  auto result = engine.run_episode();
  EXPECT_EQ(result.outcome, EpisodeResult::Outcome::Success);
  EXPECT_EQ(result.max_depth_reached, 2);
  EXPECT_EQ(kinds(result), (std::vector<K>{K::PreconditionAdded, K::PreconditionAdded,
                                           K::PropertyAdded, K::PropertyAdded, K::ObjectAdded}));
  EXPECT_EQ(result.events[0].schema, "heat_object");
  EXPECT_EQ(result.events[1].schema, "pick_from_receptacle");
}

TEST(Episode, Case9StacksPropertyInventionAndTemperatureRepair) {
  auto bundle = load_bundle(testutil::scenario_dir("case9"));
  auto backend = script_for("case9");
  LaspEngine engine(bundle, backend);
  auto result = engine.run_episode();
  EXPECT_EQ(result.outcome, EpisodeResult::Outcome::Success);
  EXPECT_EQ(result.max_depth_reached, 2);
  EXPECT_EQ(kinds(result),
            (std::vector<K>{K::PreconditionAdded, K::PropertyAdded, K::ObjectAdded,
                            K::PreconditionAdded, K::PropertyAdded, K::PropertyAdded,
                            K::ObjectAdded}));
  EXPECT_EQ(result.events[2].object, "cup");
  EXPECT_EQ(result.events[6].object, "glove");
}

TEST(Episode, GoldenTranscriptReplayOfCase3IsExactAndReproducible) {
  auto bundle = load_bundle(testutil::scenario_dir("case3"));
  std::string first_log;
  for (int run = 0; run < 2; ++run) {
    ReplayBackend backend = ReplayBackend::from_file(testutil::golden_path("case3_success.jsonl"));
    LaspEngine engine(bundle, backend);
    auto result = engine.run_episode();
    EXPECT_EQ(result.outcome, EpisodeResult::Outcome::Success);
    ASSERT_EQ(result.events.size(), 4u);
    EXPECT_EQ(result.events[0].kind, K::PreconditionAdded);
    EXPECT_EQ(result.events[0].conjunct, "(<= (temperature ?obj) (tolerance-temperature ?r))");
    EXPECT_EQ(result.events[0].schema, "pick_from_receptacle");
    EXPECT_EQ(result.events[1].kind, K::PropertyAdded);
    EXPECT_EQ(result.events[1].property, "temperature");
    EXPECT_FALSE(result.events[1].declared_new);  // declared in the domain, values were missing
    EXPECT_EQ(result.events[2].kind, K::PropertyAdded);
    EXPECT_EQ(result.events[2].property, "tolerance-temperature");
    EXPECT_EQ(result.events[3].kind, K::ObjectAdded);
    EXPECT_EQ(result.events[3].object, "glove");
    std::string log = event_log_jsonl("case3", result);
    if (run == 0) first_log = log;
    else EXPECT_EQ(log, first_log);
  }
}

TEST(Episode, ReplayingTheWrongTranscriptIsAMismatch) {
  auto bundle = load_bundle(testutil::scenario_dir("case3"));
  ReplayBackend backend =
      ReplayBackend::from_file(testutil::golden_path("failed_record_segment.jsonl"));
  LaspEngine engine(bundle, backend);
  EXPECT_THROW(engine.run_episode(), BackendError);
}

TEST(Episode, FailedRecordReasonSegmentSkipsOnTypecheck) {
  auto bundle = load_bundle(testutil::scenario_dir("case5"));
  ReplayBackend backend =
      ReplayBackend::from_file(testutil::golden_path("failed_record_segment.jsonl"));
  LaspEngine engine(bundle, backend);
  ExecutionError error;
  error.step = 4;
  const ActionSchema* pour = bundle.world.truth_domain.find_action("pour_liquid");
  error.action = instantiate(*pour, {"agent", "milk", "bottle", "sandwich", "table"});
  error.error_class = ErrorClass{"pour_liquid", "can-contain-liquid"};
  error.observation =
      "The milk permeated the sandwich, soaking it, and some overflowed onto the table.";
  auto injected =
      engine.refine_prec_and_prop_set("Programming error in the sequence of actions.", error);
  EXPECT_FALSE(injected.has_value());
  ASSERT_EQ(engine.events().size(), 1u);
  EXPECT_EQ(engine.events()[0].kind, K::ReasonSkipped);
  EXPECT_NE(engine.events()[0].reason.find("typecheck"), std::string::npos);
  EXPECT_NE(engine.events()[0].reason.find("is-open"), std::string::npos);
  // nothing was injected into the model
  EXPECT_EQ(engine.knowledge().domain, bundle.agent_domain);
  EXPECT_EQ(backend.position(), 3u);
}

TEST(Episode, DuplicateRefinementIsSkipped) {
  auto bundle = load_bundle(testutil::scenario_dir("case2"));
  ScriptedBackend backend;
  for (int i = 0; i < 2; ++i) {
    backend.enqueue("precondition_generator",
                    "Precondition: The fridge must be open before placing an object inside.");
    backend.enqueue("property_evaluator", "Yes\nSuitable predicate: (is-open ?rec - receptacle)");
    backend.enqueue("nl_to_pddl_translator", "PDDL expression: (is-open ?rec)");
  }
  LaspEngine engine(bundle, backend);
  ExecutionError error;
  const ActionSchema* place = bundle.world.truth_domain.find_action("place_in_receptacle");
  error.action = instantiate(*place, {"agent", "apple", "fridge"});
  error.error_class = ErrorClass{"place_in_receptacle", "is-open"};
  error.observation = "The fridge door was closed.";
  EXPECT_TRUE(engine.refine_prec_and_prop_set("The door was closed.", error).has_value());
  EXPECT_FALSE(engine.refine_prec_and_prop_set("The door was closed.", error).has_value());
  ASSERT_EQ(engine.events().size(), 2u);
  EXPECT_EQ(engine.events()[0].kind, K::PreconditionAdded);
  EXPECT_EQ(engine.events()[1].kind, K::ReasonSkipped);
  EXPECT_NE(engine.events()[1].reason.find("duplicate"), std::string::npos);
}

TEST(Episode, PropertyWithNoEnvironmentRelativeIsSkipped) {
  // a coined property nothing in the environment resembles: deterministic
  // tiers miss and the matcher declines, so the reason is skipped whole
  auto bundle = load_bundle(testutil::scenario_dir("case5"));
  ScriptedBackend backend;
  backend.enqueue("precondition_generator",
                  "Precondition: The target must be blessed by the chef.");
  backend.enqueue("property_evaluator", "No");
  backend.enqueue("nl_to_pddl_translator", "PDDL expression: (is-blessed ?obj2)");
  backend.enqueue("property_matcher", "Matching property: none");
  LaspEngine engine(bundle, backend);
  ExecutionError error;
  error.action = instantiate(*bundle.world.truth_domain.find_action("pour_liquid"),
                             {"agent", "milk", "bottle", "plate", "table"});
  error.error_class = ErrorClass{"pour_liquid", "can-contain-liquid"};
  error.observation = "The milk ran off the plate.";
  auto injected = engine.refine_prec_and_prop_set("Superstition.", error);
  EXPECT_FALSE(injected.has_value());
  ASSERT_EQ(engine.events().size(), 1u);
  EXPECT_EQ(engine.events()[0].kind, K::ReasonSkipped);
  EXPECT_NE(engine.events()[0].reason.find("no environment property"), std::string::npos);
  // nothing committed: neither the predicate nor the conjunct
  EXPECT_EQ(engine.knowledge().domain.find_predicate("is-blessed"), nullptr);
  EXPECT_EQ(engine.knowledge().domain, bundle.agent_domain);
}

TEST(Episode, CompleteScenariosAreFixedPoints) {
  for (const char* id : {"complete_serve_fruit", "complete_store_fruit",
                         "complete_heat_sandwich", "complete_heat_milk"}) {
    auto bundle = load_bundle(testutil::scenario_dir(id));
    ScriptedBackend backend;  // must never be consulted
    LaspEngine engine(bundle, backend);
    auto result = engine.run_episode();
    EXPECT_EQ(result.outcome, EpisodeResult::Outcome::Success) << id;
    EXPECT_TRUE(result.events.empty()) << id;
    EXPECT_EQ(engine.knowledge().domain, bundle.agent_domain) << id;
    EXPECT_EQ(engine.knowledge().problem.objects, bundle.agent_problem.objects) << id;
  }
}

TEST(Episode, ModelGrowthIsMonotoneAcrossAllCases) {
  for (int c = 1; c <= 9; ++c) {
    std::string id = "case" + std::to_string(c);
    auto bundle = load_bundle(testutil::scenario_dir(id));
    auto backend = script_for(id);
    LaspEngine engine(bundle, backend);
    auto result = engine.run_episode();
    EXPECT_EQ(result.outcome, EpisodeResult::Outcome::Success) << id;
    const AgentKnowledge& after = engine.knowledge();
    EXPECT_GE(after.problem.objects.size(), bundle.agent_problem.objects.size()) << id;
    EXPECT_GE(after.domain.predicates.size(), bundle.agent_domain.predicates.size()) << id;
    EXPECT_GE(after.domain.functions.size(), bundle.agent_domain.functions.size()) << id;
    for (const auto& before_schema : bundle.agent_domain.actions) {
      const ActionSchema* after_schema = after.domain.find_action(before_schema.name);
      ASSERT_NE(after_schema, nullptr) << id;
      EXPECT_GE(after_schema->precondition.conjuncts.size(),
                before_schema.precondition.conjuncts.size())
          << id << " " << before_schema.name;
      // every original conjunct survived (no rollbacks)
      for (const auto& conjunct : before_schema.precondition.conjuncts) {
        bool present = false;
        for (const auto& now : after_schema->precondition.conjuncts)
          if (now == conjunct) present = true;
        EXPECT_TRUE(present) << id << " " << before_schema.name;
      }
    }
    // version counter moved once per mutation event
    std::size_t mutations = 0;
    for (const auto& e : result.events)
      if (e.kind != K::ReasonSkipped) ++mutations;
    EXPECT_EQ(after.version, static_cast<int>(mutations)) << id;
  }
}

TEST(Episode, SameErrorComparesClassesNotObservations) {
  ExecutionError a;
  a.error_class = ErrorClass{"pick_from_receptacle", "temperature-le-tolerance-temperature"};
  a.observation = "text one";
  ExecutionError b = a;
  b.observation = "totally different words";
  b.action.binding = {"agent", "cup", "microwave"};  // different objects, same class
  EXPECT_TRUE(same_error(a, b));
  ExecutionError c;
  c.error_class = ErrorClass{"heat_object", "not-is-open"};
  EXPECT_FALSE(same_error(a, c));
  EXPECT_TRUE(same_error(a, a));
}

TEST(Episode, RecursionDepthBudgetYieldsBudgetOutcome) {
  // case 8 needs depth 2; a depth budget of 1 must stop it with a
  // budget outcome and a partial event log
  auto bundle = load_bundle(testutil::scenario_dir("case8"));
  auto backend = script_for("case8");
  Budgets budgets;
  budgets.max_recursion_depth = 1;
  LaspEngine engine(bundle, backend, budgets);
  auto result = engine.run_episode();
  EXPECT_EQ(result.outcome, EpisodeResult::Outcome::Budget);
  EXPECT_FALSE(result.events.empty());
  EXPECT_EQ(result.events[0].kind, RefinementEvent::Kind::PreconditionAdded);
}

TEST(Episode, PlannerBudgetYieldsBudgetOutcome) {
  auto bundle = load_bundle(testutil::scenario_dir("case2"));
  auto backend = script_for("case2");
  Budgets budgets;
  budgets.planner.max_expansions = 1;
  LaspEngine engine(bundle, backend, budgets);
  auto result = engine.run_episode();
  EXPECT_EQ(result.outcome, EpisodeResult::Outcome::Budget);
}

TEST(Episode, AllReasonsSkippedMeansExhausted) {
  auto bundle = load_bundle(testutil::scenario_dir("case2"));
  ScriptedBackend backend;
  backend.enqueue("cause_analyzer", "Possible reasons:\n1. Door closed.\n2. Shelf full.");
  for (int i = 0; i < 2; ++i) {
    backend.enqueue("precondition_generator", "Precondition: The fridge must be open.");
    backend.enqueue("property_evaluator", "Yes\nSuitable predicate: (is-open ?rec - receptacle)");
    // ill-typed: ?obj is not a receptacle, so the candidate is skipped
    backend.enqueue("nl_to_pddl_translator", "PDDL expression: (is-open ?obj)");
  }
  LaspEngine engine(bundle, backend);
  auto result = engine.run_episode();
  EXPECT_EQ(result.outcome, EpisodeResult::Outcome::Exhausted);
  ASSERT_EQ(result.events.size(), 2u);
  EXPECT_EQ(result.events[0].kind, K::ReasonSkipped);
  EXPECT_EQ(result.events[1].kind, K::ReasonSkipped);
}

TEST(Episode, InitialNoPlanTriggersObjectExpansionBeforeAnyError) {
  // A serve-fruit agent that knows no fruit at all cannot plan; the object
  // expander must run with the task text before any execution error.
  auto bundle = load_bundle(testutil::scenario_dir("case1"));
  std::erase_if(bundle.agent_problem.objects,
                [](const TypedObject& o) { return o.name == "watermelon"; });
  bundle.agent_problem.init_atoms.erase(Atom{"on", {"watermelon", "table"}});
  ScriptedBackend backend;
  backend.enqueue("object_expander", "Suitable object: apple.");
  LaspEngine engine(bundle, backend);
  auto result = engine.run_episode();
  EXPECT_EQ(result.outcome, EpisodeResult::Outcome::Success);
  ASSERT_EQ(result.events.size(), 1u);
  EXPECT_EQ(result.events[0].kind, K::ObjectAdded);
  EXPECT_EQ(result.events[0].object, "apple");
  EXPECT_EQ(backend.remaining(), 0u);
}

TEST(Episode, ParaphraseModeRewordsTheObservation) {
  auto bundle = load_bundle(testutil::scenario_dir("case2"));
  ScriptedBackend backend;
  backend.enqueue("observation_paraphraser",
                  "The apple thudded against the shut fridge door and stayed outside.");
  backend.enqueue("cause_analyzer", "Possible reasons:\n1. The fridge door was closed.");
  backend.enqueue("precondition_generator",
                  "Precondition: The fridge must be open before placing an object inside.");
  backend.enqueue("property_evaluator", "Yes\nSuitable predicate: (is-open ?rec - receptacle)");
  backend.enqueue("nl_to_pddl_translator", "PDDL expression: (is-open ?rec)");
  auto recorder = RecordingBackend(std::make_unique<ScriptedBackend>(std::move(backend)), "p");
  LaspEngine engine(bundle, recorder, Budgets{}, ChatParams{}, ObservationMode::Paraphrase);
  auto result = engine.run_episode();
  EXPECT_EQ(result.outcome, EpisodeResult::Outcome::Success);
  bool analyzer_saw_paraphrase = false;
  for (const auto& e : recorder.transcript().exchanges)
    if (e.request.role_tag == "cause_analyzer" &&
        e.request.messages[0].content.find("thudded against the shut fridge door") !=
            std::string::npos)
      analyzer_saw_paraphrase = true;
  EXPECT_TRUE(analyzer_saw_paraphrase);
}

// The agent reasons from observations alone: prompts never leak error
// classes, truth-only preconditions, or catalogue values.
TEST(Episode, PromptsRespectTheInformationRegime) {
  auto bundle = load_bundle(testutil::scenario_dir("case5"));
  auto recorder = RecordingBackend(
      std::make_unique<ScriptedBackend>(script_for("case5")), "case5");
  LaspEngine engine(bundle, recorder);
  auto result = engine.run_episode();
  EXPECT_EQ(result.outcome, EpisodeResult::Outcome::Success);
  for (const auto& e : recorder.transcript().exchanges) {
    const std::string& prompt = e.request.messages[0].content;
    EXPECT_EQ(prompt.find("pour_liquid/"), std::string::npos);  // error-class token
    EXPECT_EQ(prompt.find("(can-contain-liquid ?obj2)"), std::string::npos);  // truth conjunct
    if (e.request.role_tag != "property_matcher") {
      // the missing property's name only ever appears in the matcher query
      EXPECT_EQ(prompt.find("can-contain-liquid"), std::string::npos) << e.request.role_tag;
    }
    EXPECT_EQ(prompt.find("\"properties\""), std::string::npos);  // raw catalogue internals
  }
}

TEST(EventLog, SerializesVersionedJsonLines) {
  auto bundle = load_bundle(testutil::scenario_dir("case2"));
  auto backend = script_for("case2");
  LaspEngine engine(bundle, backend);
  auto result = engine.run_episode();
  std::string log = event_log_jsonl("case2", result);
  std::istringstream lines(log);
  std::string line;
  ASSERT_TRUE(std::getline(lines, line));
  auto header = nlohmann::json::parse(line);
  EXPECT_EQ(header.at("lasp_events_version"), 1);
  EXPECT_EQ(header.at("scenario"), "case2");
  ASSERT_TRUE(std::getline(lines, line));
  auto event = nlohmann::json::parse(line);
  EXPECT_EQ(event.at("kind"), "precondition_added");
  EXPECT_EQ(event.at("conjunct"), "(is-open ?rec)");
  ASSERT_TRUE(std::getline(lines, line));
  auto summary = nlohmann::json::parse(line);
  EXPECT_EQ(summary.at("outcome"), "success");
}

}  // namespace
