#pragma once

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "lasp/ast.hpp"

namespace lasp {

namespace detail {

inline void render_typed_vars(std::ostream& os, const std::vector<TypedVar>& params) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i > 0) os << ' ';
    os << params[i].name << " - " << params[i].type;
  }
}

inline void render_atom(std::ostream& os, const Atom& atom) {
  os << '(' << atom.predicate;
  for (const auto& arg : atom.args) os << ' ' << arg;
  os << ')';
}

inline void render_numeric_term(std::ostream& os, const NumericTerm& term) {
  if (std::holds_alternative<Rational>(term)) {
    os << std::get<Rational>(term).str();
    return;
  }
  const auto& app = std::get<FunctionApp>(term);
  os << '(' << app.function;
  for (const auto& arg : app.args) os << ' ' << arg;
  os << ')';
}

inline void render_conjunct(std::ostream& os, const Conjunct& conjunct) {
  if (std::holds_alternative<Literal>(conjunct)) {
    const auto& lit = std::get<Literal>(conjunct);
    if (!lit.positive) os << "(not ";
    render_atom(os, lit.atom);
    if (!lit.positive) os << ')';
    return;
  }
  const auto& cmp = std::get<Comparison>(conjunct);
  os << '(' << compare_op_text(cmp.op) << ' ';
  render_numeric_term(os, cmp.lhs);
  os << ' ';
  render_numeric_term(os, cmp.rhs);
  os << ')';
}

}  // namespace detail

/// One conjunct as text, e.g. "(is-open ?rec)" or
/// "(<= (temperature ?obj) (tolerance-temperature ?r))".
inline std::string render(const Conjunct& conjunct) {
  std::ostringstream os;
  detail::render_conjunct(os, conjunct);
  return os.str();
}

inline std::string render(const Atom& atom) {
  std::ostringstream os;
  detail::render_atom(os, atom);
  return os.str();
}

inline std::string render(const Condition& cond) {
  if (cond.conjuncts.empty()) return "(and)";
  if (cond.conjuncts.size() == 1) return render(cond.conjuncts.front());
  std::ostringstream os;
  os << "(and";
  for (const auto& c : cond.conjuncts) {
    os << ' ';
    detail::render_conjunct(os, c);
  }
  os << ')';
  return os.str();
}

inline std::string render_signature(const PredicateSignature& sig) {
  std::ostringstream os;
  os << '(' << sig.name;
  if (!sig.params.empty()) {
    os << ' ';
    detail::render_typed_vars(os, sig.params);
  }
  os << ')';
  return os.str();
}

inline std::string render_signature(const FunctionSignature& sig) {
  std::ostringstream os;
  os << '(' << sig.name;
  if (!sig.params.empty()) {
    os << ' ';
    detail::render_typed_vars(os, sig.params);
  }
  os << ')';
  return os.str();
}

/// Domain back to PDDL text. Declarations keep their stored order, so the
/// output is a pure function of the value: equal domains give byte-equal
/// text and parse(render(d)) == d.
inline std::string render(const Domain& domain) {
  std::ostringstream os;
  os << "(define (domain " << domain.name << ")\n";
  if (!domain.requirements.empty()) {
    os << "  (:requirements";
    for (const auto& r : domain.requirements) os << ' ' << r;
    os << ")\n";
  }
  // Parented entries come first, one "name - parent" pair each; bare roots
  // trail so they cannot be absorbed into a following "- parent" group.
  std::vector<std::string> parented;
  std::vector<std::string> roots;
  for (const auto& [t, parent] : domain.types.parents()) {
    if (t == "object") continue;
    (parent.empty() ? roots : parented).push_back(t);
  }
  if (!parented.empty() || !roots.empty()) {
    os << "  (:types";
    for (const auto& t : parented) os << ' ' << t << " - " << domain.types.parents().at(t);
    for (const auto& t : roots) os << ' ' << t;
    os << ")\n";
  }
  if (!domain.predicates.empty()) {
    os << "  (:predicates\n";
    for (const auto& p : domain.predicates) os << "    " << render_signature(p) << "\n";
    os << "  )\n";
  }
  if (!domain.functions.empty()) {
    os << "  (:functions\n";
    for (const auto& f : domain.functions) os << "    " << render_signature(f) << "\n";
    os << "  )\n";
  }
  for (const auto& action : domain.actions) {
    os << "  (:action " << action.name << "\n";
    os << "    :parameters (";
    detail::render_typed_vars(os, action.params);
    os << ")\n";
    os << "    :precondition " << render(action.precondition) << "\n";
    os << "    :effect (and";
    for (const auto& a : action.add) {
      os << ' ';
      detail::render_atom(os, a);
    }
    for (const auto& d : action.del) {
      os << " (not ";
      detail::render_atom(os, d);
      os << ')';
    }
    for (const auto& ne : action.numeric_effects) {
      os << (ne.kind == NumericEffect::Kind::Assign ? " (assign " : " (increase ");
      detail::render_numeric_term(os, ne.target);
      os << ' ';
      detail::render_numeric_term(os, ne.value);
      os << ')';
    }
    os << ")\n";
    os << "  )\n";
  }
  os << ")\n";
  return os.str();
}

inline std::string render(const Problem& problem) {
  std::ostringstream os;
  os << "(define (problem " << problem.name << ")\n";
  os << "  (:domain " << problem.domain_name << ")\n";
  if (!problem.objects.empty()) {
    os << "  (:objects\n";
    for (const auto& o : problem.objects) os << "    " << o.name << " - " << o.type << "\n";
    os << "  )\n";
  }
  os << "  (:init\n";
  for (const auto& atom : problem.init_atoms) os << "    " << render(atom) << "\n";
  for (const auto& [fn, value] : problem.init_fluents) {
    os << "    (= (" << fn.function;
    for (const auto& arg : fn.args) os << ' ' << arg;
    os << ") " << value.str() << ")\n";
  }
  os << "  )\n";
  os << "  (:goal " << render(problem.goal) << ")\n";
  os << ")\n";
  return os.str();
}

}  // namespace lasp
