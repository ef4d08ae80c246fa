#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "lasp/ast.hpp"
#include "lasp/render.hpp"

namespace lasp {

/// Raised when a ground comparison reads a fluent the state has no value
/// for. The engine keeps agent problems value-total before planning, so
/// hitting this signals a broken fixture rather than a planner failure.
class MissingFluentError : public std::runtime_error {
public:
  explicit MissingFluentError(const GroundFunction& fn)
      : std::runtime_error("no value for fluent (" + fn.function + join(fn.args) + ")") {}

private:
  static std::string join(const std::vector<std::string>& args) {
    std::string out;
    for (const auto& a : args) out += " " + a;
    return out;
  }
};

struct State {
  std::set<Atom> atoms;
  std::map<GroundFunction, Rational> fluents;

  friend bool operator==(const State&, const State&) = default;
};

inline State initial_state(const Problem& problem) {
  return State{problem.init_atoms, problem.init_fluents};
}

/// A fully instantiated action: schema name, binding, and ground
/// precondition/effects.
struct GroundAction {
  std::string schema;
  std::vector<std::string> binding;  // objects in parameter order
  Condition precondition;
  std::vector<Atom> add;
  std::vector<Atom> del;
  std::vector<NumericEffect> numeric_effects;

  /// Plan-dump form: "(schema obj1 obj2 ...)".
  [[nodiscard]] std::string str() const {
    std::string out = "(" + schema;
    for (const auto& b : binding) out += " " + b;
    out += ")";
    return out;
  }

  friend bool operator==(const GroundAction&, const GroundAction&) = default;
};

struct Plan {
  std::vector<GroundAction> steps;
  std::string provenance;  // which model version produced it
};

inline Rational eval_numeric(const State& state, const NumericTerm& term) {
  if (std::holds_alternative<Rational>(term)) return std::get<Rational>(term);
  const auto& app = std::get<FunctionApp>(term);
  GroundFunction key{app.function, app.args};
  auto it = state.fluents.find(key);
  if (it == state.fluents.end()) throw MissingFluentError(key);
  return it->second;
}

inline bool holds(const State& state, const Comparison& cmp) {
  Rational lhs = eval_numeric(state, cmp.lhs);
  Rational rhs = eval_numeric(state, cmp.rhs);
  switch (cmp.op) {
    case CompareOp::Less: return lhs < rhs;
    case CompareOp::Greater: return lhs > rhs;
    case CompareOp::LessEq: return lhs <= rhs;
    case CompareOp::GreaterEq: return lhs >= rhs;
    case CompareOp::Equal: return lhs == rhs;
  }
  return false;
}

inline bool holds(const State& state, const Conjunct& conjunct) {
  if (std::holds_alternative<Literal>(conjunct)) {
    const auto& lit = std::get<Literal>(conjunct);
    bool present = state.atoms.count(lit.atom) > 0;
    return lit.positive ? present : !present;
  }
  return holds(state, std::get<Comparison>(conjunct));
}

/// True iff every positive literal is in the state, every negative literal
/// is absent, and every comparison holds under the fluent valuation.
inline bool satisfied(const State& state, const Condition& cond) {
  for (const auto& c : cond.conjuncts)
    if (!holds(state, c)) return false;
  return true;
}

/// First conjunct of `cond` that fails in `state`, or nullptr when all hold.
inline const Conjunct* first_unmet(const State& state, const Condition& cond) {
  for (const auto& c : cond.conjuncts)
    if (!holds(state, c)) return &c;
  return nullptr;
}

/// Classical transition: atoms' = (atoms \ del) ∪ add, fluents overridden
/// by the numeric effects. The input state is untouched. Callers must have
/// checked the precondition; applying an inapplicable action is a contract
/// violation.
inline State apply(const State& state, const GroundAction& action) {
  if (!satisfied(state, action.precondition))
    throw std::logic_error("apply(): precondition of " + action.str() + " is not satisfied");
  State next = state;
  for (const auto& d : action.del) next.atoms.erase(d);
  for (const auto& a : action.add) next.atoms.insert(a);
  for (const auto& ne : action.numeric_effects) {
    GroundFunction key{ne.target.function, ne.target.args};
    Rational value = eval_numeric(state, ne.value);
    if (ne.kind == NumericEffect::Kind::Assign) {
      next.fluents[key] = value;
    } else {
      auto it = state.fluents.find(key);
      if (it == state.fluents.end()) throw MissingFluentError(key);
      next.fluents[key] = it->second + value;
    }
  }
  return next;
}

}  // namespace lasp
