#pragma once

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "lasp/ast.hpp"
#include "lasp/ground.hpp"
#include "lasp/state.hpp"

namespace lasp {

/// Stable identity of a truth-precondition conjunct, used for observation
/// template keys and same-error detection. Never shown to the LLM.
inline std::string conjunct_slug(const Conjunct& conjunct) {
  if (std::holds_alternative<Literal>(conjunct)) {
    const auto& lit = std::get<Literal>(conjunct);
    return lit.positive ? lit.atom.predicate : "not-" + lit.atom.predicate;
  }
  const auto& cmp = std::get<Comparison>(conjunct);
  auto side = [](const NumericTerm& t) -> std::string {
    if (std::holds_alternative<Rational>(t)) return std::get<Rational>(t).str();
    return std::get<FunctionApp>(t).function;
  };
  const char* op = "eq";
  switch (cmp.op) {
    case CompareOp::Less: op = "lt"; break;
    case CompareOp::Greater: op = "gt"; break;
    case CompareOp::LessEq: op = "le"; break;
    case CompareOp::GreaterEq: op = "ge"; break;
    case CompareOp::Equal: op = "eq"; break;
  }
  return side(cmp.lhs) + "-" + op + "-" + side(cmp.rhs);
}

struct ErrorClass {
  std::string schema;
  std::string conjunct;

  [[nodiscard]] std::string str() const { return schema + "/" + conjunct; }

  friend bool operator==(const ErrorClass&, const ErrorClass&) = default;
};

struct ExecutionError {
  std::size_t step = 0;  // 0-based index into the executed plan
  GroundAction action;   // truth-instantiated failing action
  ErrorClass error_class;
  std::string observation;
};

using PropertyValue = std::variant<bool, Rational>;

struct CatalogueEntry {
  std::string name;
  std::string type;
  std::map<std::string, PropertyValue> properties;
  std::vector<Atom> atoms;  // ground facts involving this object (locations etc.)
};

/// The complete-knowledge environment: truth model, evolving truth state,
/// object catalogue, and the per-violation observation templates.
struct OracleWorld {
  Domain truth_domain;
  Problem truth_problem;
  State truth_state;
  std::vector<CatalogueEntry> catalogue;
  std::map<std::string, std::string> observation_templates;  // "schema/slug" -> text
  std::map<std::string, std::string> action_texts;           // schema -> NL template
  std::string task_text;

  [[nodiscard]] const CatalogueEntry* find_entry(const std::string& name) const {
    for (const auto& e : catalogue)
      if (e.name == name) return &e;
    return nullptr;
  }
};

namespace detail {

inline std::string fill_template(const std::string& text, const ActionSchema& schema,
                                 const std::vector<std::string>& binding) {
  std::string out = text;
  for (std::size_t i = 0; i < schema.params.size() && i < binding.size(); ++i) {
    const std::string placeholder = "{" + schema.params[i].name + "}";
    std::size_t pos = 0;
    while ((pos = out.find(placeholder, pos)) != std::string::npos) {
      out.replace(pos, placeholder.size(), binding[i]);
      pos += binding[i].size();
    }
  }
  return out;
}

}  // namespace detail

/// Natural-language description of a ground action ("Pick up the sandwich
/// from the microwave."), from the scenario's per-schema templates.
inline std::string describe_action(const OracleWorld& world, const GroundAction& action) {
  auto it = world.action_texts.find(action.schema);
  if (it == world.action_texts.end())
    throw std::runtime_error("no action text template for schema '" + action.schema + "'");
  const ActionSchema* schema = world.truth_domain.find_action(action.schema);
  if (schema == nullptr)
    throw std::runtime_error("schema '" + action.schema + "' unknown to the oracle");
  return detail::fill_template(it->second, *schema, action.binding);
}

/// Deterministic observation text for a violated truth conjunct. Callers
/// wanting paraphrased observations rewrite the returned text through the
/// LLM backend; the template itself is the stable source.
inline std::string observe(const OracleWorld& world, const ErrorClass& error_class,
                           const GroundAction& action) {
  auto it = world.observation_templates.find(error_class.str());
  if (it == world.observation_templates.end())
    throw std::runtime_error("no observation template for '" + error_class.str() + "'");
  const ActionSchema* schema = world.truth_domain.find_action(error_class.schema);
  if (schema == nullptr)
    throw std::runtime_error("schema '" + error_class.schema + "' unknown to the oracle");
  return detail::fill_template(it->second, *schema, action.binding);
}

/// Ground-truth value of a property for a catalogue object. Unknown
/// property names yield an empty optional; static predicates simply not
/// listed for an object read as false.
inline std::optional<PropertyValue> query_property_value(const OracleWorld& world,
                                                         const std::string& object,
                                                         const std::string& property) {
  const CatalogueEntry* entry = world.find_entry(object);
  if (entry == nullptr) throw std::runtime_error("unknown object '" + object + "'");
  auto it = entry->properties.find(property);
  if (it != entry->properties.end()) return it->second;
  // A declared truth predicate that applies to this object's type but has
  // no listing is false; anything else is genuinely unknown.
  if (const PredicateSignature* sig = world.truth_domain.find_predicate(property)) {
    if (sig->params.size() == 1 &&
        world.truth_domain.types.is_subtype(entry->type, sig->params.front().type))
      return PropertyValue{false};
  }
  return std::nullopt;
}

/// All property names the environment can report values for.
inline std::vector<std::string> environment_property_names(const OracleWorld& world) {
  std::vector<std::string> out;
  for (const auto& entry : world.catalogue)
    for (const auto& [name, value] : entry.properties)
      if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
  return out;
}

/// Catalogue objects the agent does not know yet, in catalogue order.
inline std::vector<TypedObject> candidate_objects(const OracleWorld& world,
                                                  const Problem& agent_problem) {
  std::vector<TypedObject> out;
  for (const auto& entry : world.catalogue)
    if (agent_problem.find_object(entry.name) == nullptr) out.push_back({entry.name, entry.type});
  return out;
}

struct ExecutionOutcome {
  enum class Kind { GoalReached, Failed, RanOut };
  Kind kind = Kind::RanOut;
  std::optional<ExecutionError> error;
  State final_state;          // truth state after the executed prefix
  std::size_t steps_executed = 0;
};

/// Runs the plan under truth semantics. Steps are re-instantiated against
/// the truth domain, so the oracle checks complete preconditions no matter
/// what the agent believed. Stops at the first violated truth conjunct and
/// reports it as data; the goal is judged against the final truth state.
inline ExecutionOutcome execute(const OracleWorld& world, const Plan& plan) {
  ExecutionOutcome outcome;
  State state = world.truth_state;
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const GroundAction& agent_action = plan.steps[i];
    const ActionSchema* schema = world.truth_domain.find_action(agent_action.schema);
    if (schema == nullptr)
      throw std::runtime_error("plan step uses schema '" + agent_action.schema +
                               "' unknown to the oracle");
    if (schema->params.size() != agent_action.binding.size())
      throw std::runtime_error("plan step arity mismatch for '" + agent_action.schema + "'");
    GroundAction truth_action = instantiate(*schema, agent_action.binding);
    if (const Conjunct* unmet = first_unmet(state, truth_action.precondition)) {
      ExecutionError error;
      error.step = i;
      error.action = truth_action;
      error.error_class = ErrorClass{schema->name, conjunct_slug(*unmet)};
      error.observation = observe(world, error.error_class, truth_action);
      outcome.kind = ExecutionOutcome::Kind::Failed;
      outcome.error = std::move(error);
      outcome.final_state = std::move(state);
      outcome.steps_executed = i;
      return outcome;
    }
    state = apply(state, truth_action);
    ++outcome.steps_executed;
  }
  outcome.kind = satisfied(state, world.truth_problem.goal) ? ExecutionOutcome::Kind::GoalReached
                                                            : ExecutionOutcome::Kind::RanOut;
  outcome.final_state = std::move(state);
  return outcome;
}

/// env.json, version 1: the catalogue, observation templates, action text
/// templates, and the task description.
inline void load_env_spec(const nlohmann::json& doc, OracleWorld& world) {
  if (!doc.contains("version") || doc["version"].get<int>() != 1)
    throw std::runtime_error("env.json: unsupported or missing version (expected 1)");
  world.task_text = doc.at("task").get<std::string>();
  for (const auto& [key, value] : doc.at("observation_templates").items())
    world.observation_templates[key] = value.get<std::string>();
  for (const auto& [key, value] : doc.at("action_texts").items())
    world.action_texts[key] = value.get<std::string>();
  for (const auto& entry : doc.at("catalogue")) {
    CatalogueEntry e;
    e.name = entry.at("name").get<std::string>();
    e.type = entry.at("type").get<std::string>();
    if (entry.contains("properties")) {
      for (const auto& [pname, pvalue] : entry.at("properties").items()) {
        if (pvalue.is_boolean()) {
          e.properties[pname] = pvalue.get<bool>();
        } else if (pvalue.is_string()) {
          e.properties[pname] = Rational::parse(pvalue.get<std::string>());
        } else {
          throw std::runtime_error("env.json: property '" + pname +
                                   "' of '" + e.name + "' must be a bool or numeric string");
        }
      }
    }
    if (entry.contains("atoms")) {
      for (const auto& atom : entry.at("atoms")) {
        Atom a;
        a.predicate = atom.at(0).get<std::string>();
        for (std::size_t i = 1; i < atom.size(); ++i) a.args.push_back(atom.at(i).get<std::string>());
        e.atoms.push_back(std::move(a));
      }
    }
    world.catalogue.push_back(std::move(e));
  }
}

}  // namespace lasp
