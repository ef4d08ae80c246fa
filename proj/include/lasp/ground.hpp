#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "lasp/ast.hpp"
#include "lasp/state.hpp"

namespace lasp {

namespace detail {

using Binding = std::map<std::string, std::string>;

inline std::vector<Term> substitute(const std::vector<Term>& terms, const Binding& binding) {
  std::vector<Term> out;
  out.reserve(terms.size());
  for (const auto& t : terms) {
    auto it = binding.find(t);
    out.push_back(it == binding.end() ? t : it->second);
  }
  return out;
}

inline NumericTerm substitute(const NumericTerm& term, const Binding& binding) {
  if (std::holds_alternative<Rational>(term)) return term;
  const auto& app = std::get<FunctionApp>(term);
  return FunctionApp{app.function, substitute(app.args, binding)};
}

inline Condition substitute(const Condition& cond, const Binding& binding) {
  Condition out;
  for (const auto& conjunct : cond.conjuncts) {
    if (std::holds_alternative<Literal>(conjunct)) {
      const auto& lit = std::get<Literal>(conjunct);
      out.conjuncts.push_back(
          Literal{Atom{lit.atom.predicate, substitute(lit.atom.args, binding)}, lit.positive});
    } else {
      const auto& cmp = std::get<Comparison>(conjunct);
      out.conjuncts.push_back(Comparison{cmp.op, substitute(cmp.lhs, binding),
                                         substitute(cmp.rhs, binding)});
    }
  }
  return out;
}

}  // namespace detail

/// Instantiates one schema under an explicit binding (parameter order).
inline GroundAction instantiate(const ActionSchema& schema,
                                const std::vector<std::string>& objects) {
  detail::Binding binding;
  for (std::size_t i = 0; i < schema.params.size(); ++i)
    binding[schema.params[i].name] = objects[i];
  GroundAction ga;
  ga.schema = schema.name;
  ga.binding = objects;
  ga.precondition = detail::substitute(schema.precondition, binding);
  for (const auto& a : schema.add)
    ga.add.push_back(Atom{a.predicate, detail::substitute(a.args, binding)});
  for (const auto& d : schema.del)
    ga.del.push_back(Atom{d.predicate, detail::substitute(d.args, binding)});
  for (const auto& ne : schema.numeric_effects) {
    NumericEffect g;
    g.kind = ne.kind;
    g.target = FunctionApp{ne.target.function, detail::substitute(ne.target.args, binding)};
    g.value = detail::substitute(ne.value, binding);
    ga.numeric_effects.push_back(g);
  }
  return ga;
}

/// All type-consistent instantiations of every schema, sorted by
/// (schema name, bound objects). The sorted order is the planner's
/// tie-break, so grounding order is part of the deterministic contract.
inline std::vector<GroundAction> ground(const Domain& domain, const Problem& problem) {
  std::vector<GroundAction> out;
  for (const auto& schema : domain.actions) {
    std::vector<std::vector<std::string>> candidates(schema.params.size());
    for (std::size_t i = 0; i < schema.params.size(); ++i)
      for (const auto& obj : problem.objects)
        if (domain.types.is_subtype(obj.type, schema.params[i].type))
          candidates[i].push_back(obj.name);
    bool empty_slot = false;
    for (const auto& c : candidates)
      if (c.empty()) { empty_slot = true; break; }
    if (empty_slot && !schema.params.empty()) continue;

    std::vector<std::size_t> index(schema.params.size(), 0);
    while (true) {
      std::vector<std::string> chosen;
      chosen.reserve(schema.params.size());
      for (std::size_t i = 0; i < schema.params.size(); ++i) chosen.push_back(candidates[i][index[i]]);
      out.push_back(instantiate(schema, chosen));
      if (schema.params.empty()) break;
      std::size_t slot = schema.params.size();
      while (slot > 0) {
        --slot;
        if (++index[slot] < candidates[slot].size()) break;
        index[slot] = 0;
        if (slot == 0) { slot = schema.params.size() + 1; break; }
      }
      if (slot == schema.params.size() + 1) break;
    }
  }
  std::sort(out.begin(), out.end(), [](const GroundAction& a, const GroundAction& b) {
    if (a.schema != b.schema) return a.schema < b.schema;
    return a.binding < b.binding;
  });
  return out;
}

}  // namespace lasp
