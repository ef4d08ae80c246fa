#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lasp/oracle.hpp"
#include "lasp/parser.hpp"
#include "lasp/render.hpp"
#include "lasp/search.hpp"

namespace lasp {

/// One test case on disk: the agent's (possibly incomplete) model, the
/// oracle's complete model, and the environment spec.
struct ScenarioBundle {
  std::string id;
  std::filesystem::path path;
  Domain agent_domain;
  Problem agent_problem;
  OracleWorld world;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline ScenarioBundle load_bundle(const std::filesystem::path& dir) {
  ScenarioBundle bundle;
  bundle.path = dir;
  bundle.id = dir.filename().string();
  bundle.agent_domain = parse_domain(read_file(dir / "agent_domain.pddl"));
  bundle.agent_problem = parse_problem(read_file(dir / "agent_problem.pddl"), bundle.agent_domain);
  bundle.world.truth_domain = parse_domain(read_file(dir / "oracle_domain.pddl"));
  bundle.world.truth_problem =
      parse_problem(read_file(dir / "oracle_problem.pddl"), bundle.world.truth_domain);
  bundle.world.truth_state = initial_state(bundle.world.truth_problem);
  nlohmann::json env = nlohmann::json::parse(read_file(dir / "env.json"));
  load_env_spec(env, bundle.world);
  return bundle;
}

namespace detail {

inline bool contains_conjunct(const Condition& cond, const Conjunct& needle) {
  for (const auto& c : cond.conjuncts)
    if (c == needle) return true;
  return false;
}

inline bool symbol_known(const Domain& domain, const Atom& atom) {
  return domain.find_predicate(atom.predicate) != nullptr;
}

}  // namespace detail

/// Structural checks on a loaded bundle: the agent model must be a
/// restriction of the truth model, observation templates must cover every
/// truth precondition conjunct, the catalogue must agree with the truth
/// init, and the truth model itself must admit a plan.
inline std::vector<std::string> validate_bundle(const ScenarioBundle& bundle,
                                                const SearchBudget& budget = {}) {
  std::vector<std::string> errors;
  const Domain& agent = bundle.agent_domain;
  const Domain& truth = bundle.world.truth_domain;
  const Problem& agent_problem = bundle.agent_problem;
  const Problem& truth_problem = bundle.world.truth_problem;

  for (const auto& sig : agent.predicates) {
    const PredicateSignature* t = truth.find_predicate(sig.name);
    if (t == nullptr) errors.push_back("agent predicate '" + sig.name + "' unknown to the oracle");
    else if (t->params != sig.params)
      errors.push_back("agent predicate '" + sig.name + "' differs from the oracle signature");
  }
  for (const auto& sig : agent.functions) {
    const FunctionSignature* t = truth.find_function(sig.name);
    if (t == nullptr) errors.push_back("agent function '" + sig.name + "' unknown to the oracle");
    else if (t->params != sig.params)
      errors.push_back("agent function '" + sig.name + "' differs from the oracle signature");
  }

  for (const auto& schema : agent.actions) {
    const ActionSchema* t = truth.find_action(schema.name);
    if (t == nullptr) {
      errors.push_back("agent action '" + schema.name + "' unknown to the oracle");
      continue;
    }
    if (t->params != schema.params) {
      errors.push_back("agent action '" + schema.name + "' parameter list differs from oracle");
      continue;
    }
    for (const auto& conjunct : schema.precondition.conjuncts)
      if (!detail::contains_conjunct(t->precondition, conjunct))
        errors.push_back("agent precondition " + render(conjunct) + " of '" + schema.name +
                         "' is not part of the oracle precondition");
    // Effects are complete by assumption: the agent's effects must equal
    // the truth effects restricted to symbols the agent declares.
    auto agent_knows_fn = [&agent](const std::string& name) {
      return agent.find_function(name) != nullptr;
    };
    std::vector<Atom> expected_add;
    for (const auto& a : t->add)
      if (detail::symbol_known(agent, a)) expected_add.push_back(a);
    std::vector<Atom> expected_del;
    for (const auto& d : t->del)
      if (detail::symbol_known(agent, d)) expected_del.push_back(d);
    std::vector<NumericEffect> expected_numeric;
    for (const auto& ne : t->numeric_effects)
      if (agent_knows_fn(ne.target.function)) expected_numeric.push_back(ne);
    if (expected_add != schema.add || expected_del != schema.del ||
        !(expected_numeric == schema.numeric_effects))
      errors.push_back("agent effects of '" + schema.name +
                       "' are not the oracle effects restricted to the agent vocabulary");
  }
  for (const auto& t : truth.actions)
    if (agent.find_action(t.name) == nullptr)
      errors.push_back("oracle action '" + t.name + "' missing from the agent model");

  for (const auto& obj : agent_problem.objects) {
    const TypedObject* t = truth_problem.find_object(obj.name);
    if (t == nullptr) errors.push_back("agent object '" + obj.name + "' unknown to the oracle");
    else if (t->type != obj.type)
      errors.push_back("agent object '" + obj.name + "' typed '" + obj.type + "' but oracle says '" +
                       t->type + "'");
  }
  for (const auto& atom : agent_problem.init_atoms)
    if (!truth_problem.init_atoms.count(atom))
      errors.push_back("agent init atom " + render(atom) + " is not true in the oracle init");
  for (const auto& [fn, value] : agent_problem.init_fluents) {
    auto it = truth_problem.init_fluents.find(fn);
    if (it == truth_problem.init_fluents.end())
      errors.push_back("agent init fluent (" + fn.function + " ...) has no oracle value");
    else if (!(it->second == value))
      errors.push_back("agent init fluent (" + fn.function + " ...) disagrees with the oracle");
  }
  if (!(agent_problem.goal == truth_problem.goal))
    errors.push_back("agent goal differs from the oracle goal");

  for (const auto& schema : truth.actions) {
    if (!bundle.world.action_texts.count(schema.name))
      errors.push_back("no action text template for schema '" + schema.name + "'");
    for (const auto& conjunct : schema.precondition.conjuncts) {
      std::string key = schema.name + "/" + conjunct_slug(conjunct);
      if (!bundle.world.observation_templates.count(key))
        errors.push_back("no observation template for '" + key + "'");
    }
  }

  for (const auto& obj : truth_problem.objects)
    if (bundle.world.find_entry(obj.name) == nullptr)
      errors.push_back("object '" + obj.name + "' missing from the catalogue");
  for (const auto& entry : bundle.world.catalogue) {
    const TypedObject* obj = truth_problem.find_object(entry.name);
    if (obj == nullptr) {
      errors.push_back("catalogue object '" + entry.name + "' unknown to the oracle problem");
      continue;
    }
    if (obj->type != entry.type)
      errors.push_back("catalogue object '" + entry.name + "' typed '" + entry.type +
                       "' but oracle says '" + obj->type + "'");
    for (const auto& atom : entry.atoms)
      if (!truth_problem.init_atoms.count(atom))
        errors.push_back("catalogue atom " + render(atom) + " is not true in the oracle init");
    for (const auto& [pname, pvalue] : entry.properties) {
      if (std::holds_alternative<bool>(pvalue)) {
        bool listed = std::get<bool>(pvalue);
        bool in_init = truth_problem.init_atoms.count(Atom{pname, {entry.name}}) > 0;
        if (listed != in_init)
          errors.push_back("catalogue property " + pname + "(" + entry.name +
                           ") disagrees with the oracle init");
      } else {
        auto it = truth_problem.init_fluents.find(GroundFunction{pname, {entry.name}});
        if (it == truth_problem.init_fluents.end())
          errors.push_back("catalogue value " + pname + "(" + entry.name +
                           ") has no oracle init fluent");
        else if (!(it->second == std::get<Rational>(pvalue)))
          errors.push_back("catalogue value " + pname + "(" + entry.name +
                           ") disagrees with the oracle init");
      }
    }
  }

  // The oracle state must be fluent-total: every type-consistent
  // instantiation of every truth function needs an init value, or
  // comparisons and acquisition queries would have nothing to read.
  for (const auto& fn : truth.functions) {
    std::vector<std::vector<std::string>> args = {{}};
    for (const auto& param : fn.params) {
      std::vector<std::vector<std::string>> next;
      for (const auto& partial : args)
        for (const auto& obj : truth_problem.objects)
          if (truth.types.is_subtype(obj.type, param.type)) {
            auto copy = partial;
            copy.push_back(obj.name);
            next.push_back(std::move(copy));
          }
      args = std::move(next);
    }
    for (const auto& binding : args)
      if (!truth_problem.init_fluents.count(GroundFunction{fn.name, binding})) {
        std::string rendered = fn.name;
        for (const auto& b : binding) rendered += " " + b;
        errors.push_back("oracle init has no value for (" + rendered + ")");
      }
  }

  // Standing assumption: the complete model solves the task.
  if (errors.empty()) {
    try {
      SearchResult truth_plan = find_plan(truth, truth_problem, budget);
      if (truth_plan.status == SearchResult::Status::NoPlan)
        errors.push_back("no complete-knowledge solution: the oracle model cannot reach the goal");
      else if (truth_plan.status == SearchResult::Status::BudgetExhausted)
        errors.push_back("oracle model solvability check exhausted its search budget");
    } catch (const MissingFluentError& e) {
      errors.push_back(std::string("oracle model is not plannable: ") + e.what());
    }
  }
  return errors;
}

}  // namespace lasp
