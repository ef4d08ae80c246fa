#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lasp/rational.hpp"

namespace lasp {

/// Single-parent type forest. "object" is always a root; additional roots
/// (robot, liquid, ...) are whatever the domain declares without a parent.
class TypeTree {
public:
  TypeTree() { add_root("object"); }

  void add_root(const std::string& name) {
    if (parent_.count(name)) return;
    parent_[name] = "";
  }

  /// Declares `name` under `parent`; the parent is auto-created as a root
  /// when unseen (PDDL allows forward use in :types).
  void add(const std::string& name, const std::string& parent) {
    if (!parent_.count(parent)) add_root(parent);
    auto it = parent_.find(name);
    if (it != parent_.end() && !it->second.empty() && it->second != parent)
      throw std::invalid_argument("type '" + name + "' declared with two parents");
    parent_[name] = parent;
  }

  [[nodiscard]] bool contains(const std::string& name) const { return parent_.count(name) > 0; }

  /// Reflexive-transitive membership: is `sub` the same as or a descendant
  /// of `super`?
  [[nodiscard]] bool is_subtype(const std::string& sub, const std::string& super) const {
    std::string cur = sub;
    while (!cur.empty()) {
      if (cur == super) return true;
      auto it = parent_.find(cur);
      if (it == parent_.end()) return false;
      cur = it->second;
    }
    return false;
  }

  [[nodiscard]] const std::map<std::string, std::string>& parents() const { return parent_; }

private:
  std::map<std::string, std::string> parent_;
};

struct TypedVar {
  std::string name;  // includes the leading '?'
  std::string type;

  friend bool operator==(const TypedVar&, const TypedVar&) = default;
};

struct PredicateSignature {
  std::string name;
  std::vector<TypedVar> params;

  friend bool operator==(const PredicateSignature&, const PredicateSignature&) = default;
};

struct FunctionSignature {
  std::string name;
  std::vector<TypedVar> params;

  friend bool operator==(const FunctionSignature&, const FunctionSignature&) = default;
};

/// A term is either a constant (object name) or a variable (?x).
using Term = std::string;

inline bool is_variable(const Term& t) { return !t.empty() && t.front() == '?'; }

struct Atom {
  std::string predicate;
  std::vector<Term> args;

  friend bool operator==(const Atom&, const Atom&) = default;
  friend auto operator<=>(const Atom&, const Atom&) = default;
};

struct Literal {
  Atom atom;
  bool positive = true;

  friend bool operator==(const Literal&, const Literal&) = default;
};

struct FunctionApp {
  std::string function;
  std::vector<Term> args;

  friend bool operator==(const FunctionApp&, const FunctionApp&) = default;
  friend auto operator<=>(const FunctionApp&, const FunctionApp&) = default;
};

/// One side of a comparison: a function application or a literal constant.
using NumericTerm = std::variant<FunctionApp, Rational>;

inline bool operator==(const NumericTerm& a, const NumericTerm& b) {
  if (a.index() != b.index()) return false;
  if (a.index() == 0) return std::get<0>(a) == std::get<0>(b);
  return std::get<1>(a) == std::get<1>(b);
}

enum class CompareOp { Less, Greater, LessEq, GreaterEq, Equal };

inline const char* compare_op_text(CompareOp op) {
  switch (op) {
    case CompareOp::Less: return "<";
    case CompareOp::Greater: return ">";
    case CompareOp::LessEq: return "<=";
    case CompareOp::GreaterEq: return ">=";
    case CompareOp::Equal: return "=";
  }
  return "?";
}

struct Comparison {
  CompareOp op = CompareOp::LessEq;
  NumericTerm lhs;
  NumericTerm rhs;

  friend bool operator==(const Comparison&, const Comparison&) = default;
};

using Conjunct = std::variant<Literal, Comparison>;

inline bool operator==(const Conjunct& a, const Conjunct& b) {
  if (a.index() != b.index()) return false;
  if (a.index() == 0) return std::get<0>(a) == std::get<0>(b);
  return std::get<1>(a) == std::get<1>(b);
}

/// Flat conjunction of literals and comparisons; the only condition shape
/// this dialect supports.
struct Condition {
  std::vector<Conjunct> conjuncts;

  friend bool operator==(const Condition&, const Condition&) = default;
};

/// Numeric effect: (assign f v) or (increase f v) where v is a constant or
/// another function application.
struct NumericEffect {
  enum class Kind { Assign, Increase };
  Kind kind = Kind::Assign;
  FunctionApp target;
  NumericTerm value;

  friend bool operator==(const NumericEffect& a, const NumericEffect& b) {
    return a.kind == b.kind && a.target == b.target && a.value == b.value;
  }
};

struct ActionSchema {
  std::string name;
  std::vector<TypedVar> params;
  Condition precondition;
  std::vector<Atom> add;
  std::vector<Atom> del;
  std::vector<NumericEffect> numeric_effects;

  friend bool operator==(const ActionSchema&, const ActionSchema&) = default;
};

struct Domain {
  std::string name;
  std::vector<std::string> requirements;
  TypeTree types;
  std::vector<PredicateSignature> predicates;
  std::vector<FunctionSignature> functions;
  std::vector<ActionSchema> actions;

  [[nodiscard]] const PredicateSignature* find_predicate(const std::string& n) const {
    for (const auto& p : predicates)
      if (p.name == n) return &p;
    return nullptr;
  }
  [[nodiscard]] const FunctionSignature* find_function(const std::string& n) const {
    for (const auto& f : functions)
      if (f.name == n) return &f;
    return nullptr;
  }
  [[nodiscard]] const ActionSchema* find_action(const std::string& n) const {
    for (const auto& a : actions)
      if (a.name == n) return &a;
    return nullptr;
  }
  [[nodiscard]] ActionSchema* find_action(const std::string& n) {
    for (auto& a : actions)
      if (a.name == n) return &a;
    return nullptr;
  }

  friend bool operator==(const Domain& a, const Domain& b) {
    return a.name == b.name && a.requirements == b.requirements &&
           a.types.parents() == b.types.parents() && a.predicates == b.predicates &&
           a.functions == b.functions && a.actions == b.actions;
  }
};

struct TypedObject {
  std::string name;
  std::string type;

  friend bool operator==(const TypedObject&, const TypedObject&) = default;
};

struct GroundFunction {
  std::string function;
  std::vector<std::string> args;

  friend bool operator==(const GroundFunction&, const GroundFunction&) = default;
  friend auto operator<=>(const GroundFunction&, const GroundFunction&) = default;
};

struct Problem {
  std::string name;
  std::string domain_name;
  std::vector<TypedObject> objects;
  std::set<Atom> init_atoms;
  std::map<GroundFunction, Rational> init_fluents;
  Condition goal;

  [[nodiscard]] const TypedObject* find_object(const std::string& n) const {
    for (const auto& o : objects)
      if (o.name == n) return &o;
    return nullptr;
  }

  friend bool operator==(const Problem&, const Problem&) = default;
};

}  // namespace lasp
