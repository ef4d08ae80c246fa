#pragma once

#include <set>
#include <string>
#include <vector>

#include "lasp/ast.hpp"
#include "lasp/sexpr.hpp"
#include "lasp/typecheck.hpp"

namespace lasp {

/// A reply expression that does not fit the declared reply grammar.
class ConditionGrammarError : public std::runtime_error {
public:
  explicit ConditionGrammarError(const std::string& message) : std::runtime_error(message) {}
};

/// A reply expression that parsed but failed signature/type resolution.
class ConditionTypeError : public std::runtime_error {
public:
  ConditionTypeError(const std::string& message, std::vector<TypeIssue> issues)
      : std::runtime_error(message), issues_(std::move(issues)) {}

  [[nodiscard]] const std::vector<TypeIssue>& issues() const { return issues_; }

private:
  std::vector<TypeIssue> issues_;
};

namespace detail {

inline const std::set<std::string> kKnownRequirements = {
    ":strips", ":typing", ":negative-preconditions", ":numeric-fluents", ":fluents"};

[[noreturn]] inline void fail(const SExpr& at, const std::string& message) {
  throw ParseError(message, at.line, at.column);
}

inline void expect_list(const SExpr& e, const std::string& what) {
  if (e.is_atom) fail(e, "expected " + what + ", found atom '" + e.token + "'");
}

inline void expect_atom(const SExpr& e, const std::string& what) {
  if (!e.is_atom) fail(e, "expected " + what + ", found a list");
}

/// Parses a PDDL typed list "a b - t c - u d" from children[from..).
/// Untyped trailing names get `default_type`; an empty default means the
/// names become type-forest roots (used by :types).
inline std::vector<std::pair<std::string, std::string>> parse_typed_list(
    const SExpr& list, std::size_t from, const std::string& default_type) {
  std::vector<std::pair<std::string, std::string>> out;
  std::vector<std::string> pending;
  for (std::size_t i = from; i < list.children.size(); ++i) {
    const SExpr& item = list.children[i];
    expect_atom(item, "name in typed list");
    if (item.token == "-") {
      if (pending.empty()) fail(item, "dangling '-' in typed list");
      if (i + 1 >= list.children.size()) fail(item, "missing type after '-'");
      const SExpr& type_tok = list.children[++i];
      expect_atom(type_tok, "type name");
      for (const auto& name : pending) out.emplace_back(name, type_tok.token);
      pending.clear();
    } else {
      pending.push_back(item.token);
    }
  }
  for (const auto& name : pending) out.emplace_back(name, default_type);
  return out;
}

inline std::vector<TypedVar> parse_parameter_list(const SExpr& list, std::size_t from,
                                                  const Domain& domain) {
  std::vector<TypedVar> params;
  for (const auto& [name, type] : parse_typed_list(list, from, "object")) {
    if (name.empty() || name.front() != '?')
      fail(list, "parameter '" + name + "' must start with '?'");
    if (!domain.types.contains(type))
      fail(list, "undeclared type '" + type + "' in parameter list");
    params.push_back({name, type});
  }
  return params;
}

inline NumericTerm parse_numeric_term(const SExpr& e) {
  if (e.is_atom) {
    try {
      return Rational::parse(e.token);
    } catch (const std::invalid_argument&) {
      fail(e, "expected number or function application, found '" + e.token + "'");
    }
  }
  if (e.children.empty() || !e.children.front().is_atom)
    fail(e, "malformed function application");
  FunctionApp app;
  app.function = e.children.front().token;
  for (std::size_t i = 1; i < e.children.size(); ++i) {
    expect_atom(e.children[i], "function argument");
    app.args.push_back(e.children[i].token);
  }
  return app;
}

inline bool parse_compare_op(const std::string& tok, CompareOp& op) {
  if (tok == "<") op = CompareOp::Less;
  else if (tok == ">") op = CompareOp::Greater;
  else if (tok == "<=") op = CompareOp::LessEq;
  else if (tok == ">=") op = CompareOp::GreaterEq;
  else if (tok == "=") op = CompareOp::Equal;
  else return false;
  return true;
}

inline Atom parse_atom_expr(const SExpr& e) {
  expect_list(e, "atom");
  if (e.children.empty() || !e.children.front().is_atom) fail(e, "malformed atom");
  Atom atom;
  atom.predicate = e.children.front().token;
  for (std::size_t i = 1; i < e.children.size(); ++i) {
    expect_atom(e.children[i], "atom argument");
    atom.args.push_back(e.children[i].token);
  }
  return atom;
}

inline Conjunct parse_conjunct(const SExpr& e) {
  expect_list(e, "condition");
  const std::string& head = e.head();
  if (head.empty()) fail(e, "malformed condition");
  CompareOp op;
  if (parse_compare_op(head, op)) {
    if (e.children.size() != 3) fail(e, "comparison takes exactly two operands");
    Comparison cmp;
    cmp.op = op;
    cmp.lhs = parse_numeric_term(e.children[1]);
    cmp.rhs = parse_numeric_term(e.children[2]);
    return cmp;
  }
  if (head == "not") {
    if (e.children.size() != 2) fail(e, "(not ...) takes exactly one atom");
    Literal lit;
    lit.atom = parse_atom_expr(e.children[1]);
    lit.positive = false;
    return lit;
  }
  if (head == "and" || head == "or" || head == "forall" || head == "exists" || head == "imply" ||
      head == "when")
    fail(e, "'" + head + "' is not supported in this dialect");
  Literal lit;
  lit.atom = parse_atom_expr(e);
  return lit;
}

inline Condition parse_condition_expr(const SExpr& e) {
  Condition cond;
  expect_list(e, "condition");
  if (e.children.empty()) return cond;  // () = empty conjunction
  if (e.head() == "and") {
    for (std::size_t i = 1; i < e.children.size(); ++i)
      cond.conjuncts.push_back(parse_conjunct(e.children[i]));
  } else {
    cond.conjuncts.push_back(parse_conjunct(e));
  }
  return cond;
}

inline void parse_effect_item(const SExpr& e, ActionSchema& action) {
  expect_list(e, "effect");
  const std::string& head = e.head();
  if (head == "assign" || head == "increase") {
    if (e.children.size() != 3) fail(e, "(" + head + " ...) takes a function and a value");
    NumericEffect eff;
    eff.kind = head == "assign" ? NumericEffect::Kind::Assign : NumericEffect::Kind::Increase;
    NumericTerm target = parse_numeric_term(e.children[1]);
    if (!std::holds_alternative<FunctionApp>(target))
      fail(e, "(" + head + " ...) target must be a function application");
    eff.target = std::get<FunctionApp>(target);
    eff.value = parse_numeric_term(e.children[2]);
    action.numeric_effects.push_back(eff);
    return;
  }
  if (head == "not") {
    if (e.children.size() != 2) fail(e, "(not ...) takes exactly one atom");
    action.del.push_back(parse_atom_expr(e.children[1]));
    return;
  }
  if (head == "when" || head == "forall") fail(e, "conditional effects are not supported");
  action.add.push_back(parse_atom_expr(e));
}

inline void typecheck_or_fail(const Domain& domain, const Scope& scope, const Condition& cond,
                              const SExpr& at, const std::string& context) {
  std::vector<TypeIssue> issues = typecheck_condition(domain, scope, cond);
  if (!issues.empty()) fail(at, context + ": " + issues.front().message);
}

inline void check_atom_against_signature(const Domain& domain, const Scope& scope,
                                         const Atom& atom, const SExpr& at,
                                         const std::string& context) {
  Condition wrapper;
  wrapper.conjuncts.push_back(Literal{atom, true});
  typecheck_or_fail(domain, scope, wrapper, at, context);
}

}  // namespace detail

/// Parses a PDDL domain file (typing, negative preconditions, numeric
/// fluents). Signatures and action bodies are fully resolved and
/// type-checked; any failure throws ParseError with a source position.
inline Domain parse_domain(const std::string& text) {
  SExprReader reader(text);
  SExpr top = reader.read();
  if (!reader.at_end()) throw ParseError("trailing content after domain definition", 0, 0);
  detail::expect_list(top, "(define ...)");
  if (top.head() != "define") detail::fail(top, "expected (define (domain ...))");

  Domain domain;
  bool named = false;
  for (std::size_t i = 1; i < top.children.size(); ++i) {
    const SExpr& section = top.children[i];
    detail::expect_list(section, "domain section");
    const std::string& head = section.head();
    if (head == "domain") {
      if (section.children.size() != 2) detail::fail(section, "(domain NAME) expected");
      domain.name = section.children[1].token;
      named = true;
    } else if (head == ":requirements") {
      for (std::size_t j = 1; j < section.children.size(); ++j) {
        detail::expect_atom(section.children[j], "requirement flag");
        const std::string& req = section.children[j].token;
        if (!detail::kKnownRequirements.count(req))
          detail::fail(section.children[j], "unknown requirement flag '" + req + "'");
        domain.requirements.push_back(req);
      }
    } else if (head == ":types") {
      for (const auto& [name, parent] : detail::parse_typed_list(section, 1, "")) {
        if (parent.empty()) domain.types.add_root(name);
        else domain.types.add(name, parent);
      }
    } else if (head == ":predicates") {
      for (std::size_t j = 1; j < section.children.size(); ++j) {
        const SExpr& decl = section.children[j];
        detail::expect_list(decl, "predicate declaration");
        if (decl.children.empty() || !decl.children.front().is_atom)
          detail::fail(decl, "malformed predicate declaration");
        PredicateSignature sig;
        sig.name = decl.children.front().token;
        sig.params = detail::parse_parameter_list(decl, 1, domain);
        if (domain.find_predicate(sig.name) != nullptr || domain.find_function(sig.name) != nullptr)
          detail::fail(decl, "duplicate signature '" + sig.name + "'");
        domain.predicates.push_back(std::move(sig));
      }
    } else if (head == ":functions") {
      for (std::size_t j = 1; j < section.children.size(); ++j) {
        const SExpr& decl = section.children[j];
        detail::expect_list(decl, "function declaration");
        if (decl.children.empty() || !decl.children.front().is_atom)
          detail::fail(decl, "malformed function declaration");
        FunctionSignature sig;
        sig.name = decl.children.front().token;
        sig.params = detail::parse_parameter_list(decl, 1, domain);
        if (domain.find_predicate(sig.name) != nullptr || domain.find_function(sig.name) != nullptr)
          detail::fail(decl, "duplicate signature '" + sig.name + "'");
        domain.functions.push_back(std::move(sig));
      }
    } else if (head == ":action") {
      if (section.children.size() < 2 || !section.children[1].is_atom)
        detail::fail(section, "missing action name");
      ActionSchema action;
      action.name = section.children[1].token;
      if (domain.find_action(action.name) != nullptr)
        detail::fail(section, "duplicate action '" + action.name + "'");
      const SExpr* precondition_expr = nullptr;
      const SExpr* effect_expr = nullptr;
      for (std::size_t j = 2; j + 1 < section.children.size(); j += 2) {
        const SExpr& key = section.children[j];
        detail::expect_atom(key, "action keyword");
        const SExpr& value = section.children[j + 1];
        if (key.token == ":parameters") {
          detail::expect_list(value, "parameter list");
          action.params = detail::parse_parameter_list(value, 0, domain);
        } else if (key.token == ":precondition") {
          precondition_expr = &value;
        } else if (key.token == ":effect") {
          effect_expr = &value;
        } else {
          detail::fail(key, "unknown action keyword '" + key.token + "'");
        }
      }
      if (precondition_expr != nullptr)
        action.precondition = detail::parse_condition_expr(*precondition_expr);
      if (effect_expr != nullptr) {
        detail::expect_list(*effect_expr, "effect");
        if (effect_expr->head() == "and") {
          for (std::size_t j = 1; j < effect_expr->children.size(); ++j)
            detail::parse_effect_item(effect_expr->children[j], action);
        } else if (!effect_expr->children.empty()) {
          detail::parse_effect_item(*effect_expr, action);
        }
      }
      Scope scope{action.params, nullptr};
      detail::typecheck_or_fail(domain, scope, action.precondition, section,
                                "precondition of '" + action.name + "'");
      Condition effect_atoms;
      for (const auto& a : action.add) effect_atoms.conjuncts.push_back(Literal{a, true});
      for (const auto& d : action.del) effect_atoms.conjuncts.push_back(Literal{d, true});
      for (const auto& ne : action.numeric_effects) {
        Comparison probe;
        probe.lhs = ne.target;
        probe.rhs = ne.value;
        effect_atoms.conjuncts.push_back(probe);
      }
      detail::typecheck_or_fail(domain, scope, effect_atoms, section,
                                "effect of '" + action.name + "'");
      for (const auto& a : action.add)
        for (const auto& d : action.del)
          if (a == d)
            detail::fail(section, "action '" + action.name + "' both adds and deletes (" +
                                      a.predicate + " ...)");
      domain.actions.push_back(std::move(action));
    } else {
      detail::fail(section, "unknown domain section '" + head + "'");
    }
  }
  if (!named) detail::fail(top, "domain has no (domain NAME) section");
  return domain;
}

/// Parses a problem file against an already-parsed domain; init and goal
/// are type-checked against the domain's signatures.
inline Problem parse_problem(const std::string& text, const Domain& domain) {
  SExprReader reader(text);
  SExpr top = reader.read();
  if (!reader.at_end()) throw ParseError("trailing content after problem definition", 0, 0);
  detail::expect_list(top, "(define ...)");
  if (top.head() != "define") detail::fail(top, "expected (define (problem ...))");

  Problem problem;
  for (std::size_t i = 1; i < top.children.size(); ++i) {
    const SExpr& section = top.children[i];
    detail::expect_list(section, "problem section");
    const std::string& head = section.head();
    if (head == "problem") {
      if (section.children.size() != 2) detail::fail(section, "(problem NAME) expected");
      problem.name = section.children[1].token;
    } else if (head == ":domain") {
      if (section.children.size() != 2) detail::fail(section, "(:domain NAME) expected");
      problem.domain_name = section.children[1].token;
      if (problem.domain_name != domain.name)
        detail::fail(section, "problem references domain '" + problem.domain_name +
                                  "' but '" + domain.name + "' was supplied");
    } else if (head == ":objects") {
      for (const auto& [name, type] : detail::parse_typed_list(section, 1, "object")) {
        if (!domain.types.contains(type))
          detail::fail(section, "object '" + name + "' has undeclared type '" + type + "'");
        if (problem.find_object(name) != nullptr)
          detail::fail(section, "duplicate object '" + name + "'");
        problem.objects.push_back({name, type});
      }
    } else if (head == ":init") {
      Scope scope{{}, &problem.objects};
      for (std::size_t j = 1; j < section.children.size(); ++j) {
        const SExpr& item = section.children[j];
        detail::expect_list(item, "init entry");
        if (item.head() == "=") {
          if (item.children.size() != 3) detail::fail(item, "(= (fn ...) value) expected");
          NumericTerm target = detail::parse_numeric_term(item.children[1]);
          NumericTerm value = detail::parse_numeric_term(item.children[2]);
          if (!std::holds_alternative<FunctionApp>(target))
            detail::fail(item, "fluent init target must be a function application");
          if (!std::holds_alternative<Rational>(value))
            detail::fail(item, "fluent init value must be a number");
          const auto& app = std::get<FunctionApp>(target);
          Condition probe;
          Comparison cmp;
          cmp.lhs = app;
          cmp.rhs = Rational(0);
          probe.conjuncts.push_back(cmp);
          detail::typecheck_or_fail(domain, scope, probe, item, "init");
          GroundFunction gf{app.function, app.args};
          if (problem.init_fluents.count(gf))
            detail::fail(item, "duplicate fluent init for (" + app.function + " ...)");
          problem.init_fluents[gf] = std::get<Rational>(value);
        } else {
          Atom atom = detail::parse_atom_expr(item);
          detail::check_atom_against_signature(domain, scope, atom, item, "init");
          problem.init_atoms.insert(atom);
        }
      }
    } else if (head == ":goal") {
      if (section.children.size() != 2) detail::fail(section, "(:goal CONDITION) expected");
      problem.goal = detail::parse_condition_expr(section.children[1]);
      Scope scope{{}, &problem.objects};
      detail::typecheck_or_fail(domain, scope, problem.goal, section.children[1], "goal");
    } else {
      detail::fail(section, "unknown problem section '" + head + "'");
    }
  }
  return problem;
}

/// Parses the expression portion of a translator reply. Only the reply
/// grammars are admitted: a positive literal, a negated literal, or a
/// comparison of two function applications. Anything else (conjunctions
/// included) is a grammar violation.
inline Condition parse_reply_expression(const std::string& text) {
  SExprReader reader(text);
  SExpr e;
  try {
    e = reader.read();
  } catch (const ParseError& err) {
    throw ConditionGrammarError(std::string("unreadable PDDL expression: ") + err.what());
  }
  if (!reader.at_end()) throw ConditionGrammarError("trailing content after PDDL expression");
  if (e.is_atom) throw ConditionGrammarError("expected a parenthesized PDDL expression");
  const std::string& head = e.head();
  if (head == "and" || head == "or")
    throw ConditionGrammarError("'" + head + "' is not in the reply grammar");
  Conjunct conjunct;
  try {
    conjunct = detail::parse_conjunct(e);
  } catch (const ParseError& err) {
    throw ConditionGrammarError(err.what());
  }
  if (std::holds_alternative<Comparison>(conjunct)) {
    const auto& cmp = std::get<Comparison>(conjunct);
    if (!std::holds_alternative<FunctionApp>(cmp.lhs) ||
        !std::holds_alternative<FunctionApp>(cmp.rhs))
      throw ConditionGrammarError("comparison operands must both be function applications");
    if (cmp.op == CompareOp::Equal)
      throw ConditionGrammarError("'=' is not an admitted comparison operator");
  }
  Condition cond;
  cond.conjuncts.push_back(conjunct);
  return cond;
}

/// parse_reply_expression + typecheck against `domain` under `params`.
/// Grammar violations raise ConditionGrammarError; resolution/type
/// failures raise ConditionTypeError. Both signal "skip this refinement
/// candidate" to the caller.
inline Condition parse_condition_sexpr(const std::string& text, const Domain& domain,
                                       const std::vector<TypedVar>& params) {
  Condition cond = parse_reply_expression(text);
  std::vector<TypeIssue> issues = typecheck_condition(domain, params, cond);
  if (!issues.empty()) {
    std::string message = issues.front().message;
    for (std::size_t i = 1; i < issues.size(); ++i) message += "; " + issues[i].message;
    throw ConditionTypeError(message, std::move(issues));
  }
  return cond;
}

}  // namespace lasp
