#pragma once

#include <string>
#include <vector>

#include "lasp/ast.hpp"

namespace lasp {

struct TypeIssue {
  enum class Kind { UnknownSymbol, ArityMismatch, TypeMismatch, NotAFunction, NotAPredicate, UnboundVariable };
  Kind kind;
  std::string message;
};

/// Resolution scope for condition checking: bound parameters plus, for
/// ground conditions, the problem's object list.
struct Scope {
  std::vector<TypedVar> params;
  const std::vector<TypedObject>* objects = nullptr;

  /// Type of a term, or empty when the term cannot be resolved.
  [[nodiscard]] std::string type_of(const Term& t) const {
    if (is_variable(t)) {
      for (const auto& p : params)
        if (p.name == t) return p.type;
      return "";
    }
    if (objects != nullptr) {
      for (const auto& o : *objects)
        if (o.name == t) return o.type;
    }
    return "";
  }
};

namespace detail {

inline void check_terms(const Domain& domain, const Scope& scope, const std::string& context,
                        const std::vector<TypedVar>& sig_params, const std::vector<Term>& args,
                        std::vector<TypeIssue>& out) {
  if (sig_params.size() != args.size()) {
    out.push_back({TypeIssue::Kind::ArityMismatch,
                   context + ": expected " + std::to_string(sig_params.size()) + " arguments, got " +
                       std::to_string(args.size())});
    return;
  }
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string actual = scope.type_of(args[i]);
    if (actual.empty()) {
      out.push_back({is_variable(args[i]) ? TypeIssue::Kind::UnboundVariable
                                          : TypeIssue::Kind::UnknownSymbol,
                     context + ": unknown " + (is_variable(args[i]) ? "variable '" : "object '") +
                         args[i] + "'"});
      continue;
    }
    if (!domain.types.is_subtype(actual, sig_params[i].type)) {
      out.push_back({TypeIssue::Kind::TypeMismatch,
                     context + ": argument " + args[i] + " has type " + actual + " where " +
                         sig_params[i].type + " is required"});
    }
  }
}

inline void check_function_app(const Domain& domain, const Scope& scope, const FunctionApp& app,
                               std::vector<TypeIssue>& out) {
  const FunctionSignature* sig = domain.find_function(app.function);
  if (sig == nullptr) {
    if (domain.find_predicate(app.function) != nullptr) {
      out.push_back({TypeIssue::Kind::NotAFunction,
                     "'" + app.function + "' is a predicate, not a numeric function"});
    } else {
      out.push_back({TypeIssue::Kind::UnknownSymbol, "unknown function '" + app.function + "'"});
    }
    return;
  }
  check_terms(domain, scope, "(" + app.function + " ...)", sig->params, app.args, out);
}

}  // namespace detail

/// Checks every literal and comparison of `cond` against the domain's
/// signatures under `scope`. Issues come back as data; an empty result
/// means the condition is well-typed.
inline std::vector<TypeIssue> typecheck_condition(const Domain& domain, const Scope& scope,
                                                  const Condition& cond) {
  std::vector<TypeIssue> out;
  for (const auto& conjunct : cond.conjuncts) {
    if (std::holds_alternative<Literal>(conjunct)) {
      const auto& lit = std::get<Literal>(conjunct);
      const PredicateSignature* sig = domain.find_predicate(lit.atom.predicate);
      if (sig == nullptr) {
        if (domain.find_function(lit.atom.predicate) != nullptr) {
          out.push_back({TypeIssue::Kind::NotAPredicate,
                         "'" + lit.atom.predicate + "' is a numeric function, not a predicate"});
        } else {
          out.push_back({TypeIssue::Kind::UnknownSymbol,
                         "the predicate '" + lit.atom.predicate + "' is not declared"});
        }
        continue;
      }
      detail::check_terms(domain, scope, "(" + lit.atom.predicate + " ...)", sig->params,
                          lit.atom.args, out);
    } else {
      const auto& cmp = std::get<Comparison>(conjunct);
      for (const NumericTerm* side : {&cmp.lhs, &cmp.rhs}) {
        if (std::holds_alternative<FunctionApp>(*side))
          detail::check_function_app(domain, scope, std::get<FunctionApp>(*side), out);
      }
    }
  }
  return out;
}

inline std::vector<TypeIssue> typecheck_condition(const Domain& domain,
                                                  const std::vector<TypedVar>& params,
                                                  const Condition& cond) {
  Scope scope{params, nullptr};
  return typecheck_condition(domain, scope, cond);
}

}  // namespace lasp
