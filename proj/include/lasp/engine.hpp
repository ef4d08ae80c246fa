#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lasp/oracle.hpp"
#include "lasp/roles.hpp"
#include "lasp/scenario.hpp"
#include "lasp/search.hpp"

namespace lasp {

struct Budgets {
  int max_recursion_depth = 3;
  int max_reasons_per_error = 7;
  int max_replans_per_reason = 2;
  SearchBudget planner;
  Heuristic heuristic = Heuristic::Blind;
};

/// The agent's evolving model. Preconditions, properties, and objects only
/// ever grow; the problem's init doubles as the current believed state.
struct AgentKnowledge {
  Domain domain;
  Problem problem;
  std::vector<std::string> history;  // executed action sentences
  int version = 0;
  std::map<std::string, std::string> property_alias;  // agent property -> env property
};

struct RefinementEvent {
  enum class Kind { PreconditionAdded, PropertyAdded, ObjectAdded, ReasonSkipped };
  Kind kind = Kind::ReasonSkipped;
  std::string schema;
  std::string conjunct;      // rendered, for PreconditionAdded
  std::string property;      // agent-side name, for PropertyAdded
  std::string env_property;  // matched environment name
  bool declared_new = false;
  std::string object;  // for ObjectAdded
  std::vector<std::string> acquired;  // "temperature(cup)=20"-style entries
  std::string error_class;
  std::string reason;  // triggering reason, or the skip cause
  int version = 0;

  [[nodiscard]] const char* kind_name() const {
    switch (kind) {
      case Kind::PreconditionAdded: return "precondition_added";
      case Kind::PropertyAdded: return "property_added";
      case Kind::ObjectAdded: return "object_added";
      case Kind::ReasonSkipped: return "reason_skipped";
    }
    return "?";
  }
};

struct EpisodeResult {
  enum class Outcome { Success, Exhausted, Budget };
  Outcome outcome = Outcome::Exhausted;
  Plan final_plan;  // plan whose execution reached the goal
  std::vector<RefinementEvent> events;
  int max_depth_reached = 0;
  std::size_t oracle_steps = 0;
  std::size_t replans = 0;
  std::string note;

  [[nodiscard]] const char* outcome_name() const {
    switch (outcome) {
      case Outcome::Success: return "success";
      case Outcome::Exhausted: return "exhausted";
      case Outcome::Budget: return "budget";
    }
    return "?";
  }
};

enum class ObservationMode { Template, Paraphrase };

inline bool same_error(const ExecutionError& a, const ExecutionError& b) {
  return a.error_class == b.error_class;
}

namespace detail {

inline std::string normalize_property_name(const std::string& name) {
  std::string out;
  for (char c : name) {
    if (c == '-' || c == '_') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

inline std::vector<std::string> property_tokens(const std::string& name) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char c : name) {
    if (c == '-' || c == '_') {
      if (!cur.empty()) tokens.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  if (!cur.empty()) tokens.push_back(cur);
  return tokens;
}

inline double token_jaccard(const std::string& a, const std::string& b) {
  std::vector<std::string> ta = property_tokens(a);
  std::vector<std::string> tb = property_tokens(b);
  std::set<std::string> sa(ta.begin(), ta.end());
  std::set<std::string> sb(tb.begin(), tb.end());
  if (sa.empty() || sb.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& t : sa)
    if (sb.count(t)) ++inter;
  std::size_t uni = sa.size() + sb.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace detail

/// Runs LASP episodes over a scenario bundle: plan, execute against the
/// oracle, and on error recursively diagnose, refine, and replan until
/// success, exhaustion of reasons, or budget.
class LaspEngine {
public:
  LaspEngine(const ScenarioBundle& bundle, ChatBackend& backend, Budgets budgets = {},
             ChatParams chat = {}, ObservationMode observation_mode = ObservationMode::Template)
      : bundle_(bundle),
        backend_(backend),
        budgets_(budgets),
        chat_(chat),
        observation_mode_(observation_mode) {
    reset();
  }

  EpisodeResult run_episode() {
    reset();

    SearchResult search = plan();
    if (search.status == SearchResult::Status::BudgetExhausted) return budget_out("initial search");
    if (search.status == SearchResult::Status::NoPlan) {
      // Incomplete-O start: the planner found nothing before any error, so
      // try the object expander with the task text standing in for an NL
      // precondition.
      ExpansionContext ctx;
      ctx.erroneous_action = "None. The planner could not find a plan with the known objects.";
      ctx.nl_precondition = "The objects available to the robot must suffice to " +
                            bundle_.world.task_text + ".";
      for (int attempt = 0; attempt < budgets_.max_replans_per_reason &&
                            search.status == SearchResult::Status::NoPlan;
           ++attempt) {
        if (!refine_object_set(ctx, "")) break;
        search = plan();
      }
      if (search.status == SearchResult::Status::BudgetExhausted)
        return budget_out("search after initial object expansion");
      if (search.status == SearchResult::Status::NoPlan) {
        result_.outcome = EpisodeResult::Outcome::Exhausted;
        result_.note = "no plan under the initial model and object expansion did not help";
        return result_;
      }
    }

    Outcome outcome = execute_plan(search.plan);
    if (outcome.kind == Outcome::Kind::Success) return result_;
    if (outcome.kind == Outcome::Kind::Inconsistent) return result_;
    return finish(refine_and_replan(*outcome.error, 1));
  }

  [[nodiscard]] const AgentKnowledge& knowledge() const { return knowledge_; }
  [[nodiscard]] const State& truth_state() const { return truth_state_; }
  [[nodiscard]] const std::vector<RefinementEvent>& events() const { return result_.events; }

  /// One repair attempt for one reason, callable on its own (the recorded
  /// conversations replay individual reason segments this way). Returns
  /// the NL precondition when a conjunct was injected.
  std::optional<std::string> refine_prec_and_prop_set(const std::string& reason,
                                                      const ExecutionError& error) {
    RoleContext ctx = role_context(error);
    return refine_prec_and_prop_set(reason, error, ctx);
  }

private:
  void reset() {
    knowledge_.domain = bundle_.agent_domain;
    knowledge_.problem = bundle_.agent_problem;
    knowledge_.history.clear();
    knowledge_.version = 0;
    knowledge_.property_alias.clear();
    truth_state_ = bundle_.world.truth_state;
    result_ = EpisodeResult{};
  }

  RoleContext role_context(const ExecutionError& error) const {
    RoleContext ctx;
    ctx.task = bundle_.world.task_text;
    ctx.history = knowledge_.history;
    ctx.erroneous_action = describe_action(bundle_.world, error.action);
    ctx.observation = error.observation;
    return ctx;
  }
  struct Outcome {
    enum class Kind { Success, Error, Inconsistent };
    Kind kind = Kind::Success;
    std::optional<ExecutionError> error;
  };

  enum class LoopResult { Success, Exhausted, Budget };

  struct ExpansionContext {
    std::string erroneous_action;
    std::string nl_precondition;
  };

  EpisodeResult finish(LoopResult loop) {
    switch (loop) {
      case LoopResult::Success: result_.outcome = EpisodeResult::Outcome::Success; break;
      case LoopResult::Exhausted: result_.outcome = EpisodeResult::Outcome::Exhausted; break;
      case LoopResult::Budget: result_.outcome = EpisodeResult::Outcome::Budget; break;
    }
    return result_;
  }

  EpisodeResult budget_out(const std::string& what) {
    result_.outcome = EpisodeResult::Outcome::Budget;
    result_.note = "planner budget exhausted during " + what;
    return result_;
  }

  SearchResult plan() {
    ++result_.replans;
    SearchResult result =
        find_plan(knowledge_.domain, knowledge_.problem, budgets_.planner, budgets_.heuristic);
    result.plan.provenance = "model-v" + std::to_string(knowledge_.version);
    return result;
  }

  /// Executes under truth semantics, advances the believed state through
  /// the successful prefix, and appends the prefix to the history.
  Outcome execute_plan(const Plan& plan_to_run) {
    OracleWorld world = bundle_.world;
    world.truth_state = truth_state_;
    ExecutionOutcome exec = execute(world, plan_to_run);
    result_.oracle_steps += exec.steps_executed;
    State belief = initial_state(knowledge_.problem);
    for (std::size_t i = 0; i < exec.steps_executed; ++i) {
      belief = apply(belief, plan_to_run.steps[i]);
      knowledge_.history.push_back(describe_action(bundle_.world, plan_to_run.steps[i]));
    }
    knowledge_.problem.init_atoms = belief.atoms;
    knowledge_.problem.init_fluents = belief.fluents;
    truth_state_ = exec.final_state;

    Outcome outcome;
    switch (exec.kind) {
      case ExecutionOutcome::Kind::GoalReached:
        outcome.kind = Outcome::Kind::Success;
        result_.outcome = EpisodeResult::Outcome::Success;
        result_.final_plan = plan_to_run;
        break;
      case ExecutionOutcome::Kind::RanOut:
        outcome.kind = Outcome::Kind::Inconsistent;
        result_.outcome = EpisodeResult::Outcome::Exhausted;
        result_.note = "plan ran out without reaching the goal; agent belief diverged from truth";
        break;
      case ExecutionOutcome::Kind::Failed:
        outcome.kind = Outcome::Kind::Error;
        outcome.error = exec.error;
        if (observation_mode_ == ObservationMode::Paraphrase)
          outcome.error->observation = paraphrase(outcome.error->observation);
        break;
    }
    return outcome;
  }

  std::string paraphrase(const std::string& observation) {
    ChatRequest req;
    req.role_tag = "observation_paraphraser";
    req.messages.push_back(
        {"user",
         "Reword the following observation of a robot execution error. Keep the meaning, vary "
         "the phrasing, and answer with one or two sentences only.\nObservation: " +
             observation});
    req.model = chat_.model;
    req.temperature = chat_.temperature;
    req.seed = chat_.seed;
    std::string reply = backend_.complete(req);
    std::string trimmed = detail::trim(reply);
    return trimmed.empty() ? observation : trimmed;
  }

  LoopResult refine_and_replan(const ExecutionError& error, int depth) {
    if (depth > budgets_.max_recursion_depth) {
      result_.note = "recursion depth budget exceeded";
      return LoopResult::Budget;
    }
    result_.max_depth_reached = std::max(result_.max_depth_reached, depth);

    RoleContext ctx = role_context(error);
    std::vector<std::string> reasons = analyze_causes(ctx, backend_, chat_);

    int considered = 0;
    for (const std::string& reason : reasons) {
      if (++considered > budgets_.max_reasons_per_error) break;
      std::optional<std::string> nl = refine_prec_and_prop_set(reason, error, ctx);
      if (!nl) continue;  // skipped; event already logged

      SearchResult search{};
      bool expanded_this_reason = false;
      for (int attempt = 0; attempt < budgets_.max_replans_per_reason; ++attempt) {
        search = plan();
        if (search.status != SearchResult::Status::NoPlan) break;
        if (expanded_this_reason) break;
        ExpansionContext expansion{ctx.erroneous_action, *nl};
        expanded_this_reason = refine_object_set(expansion, error.error_class.str());
        if (!expanded_this_reason) break;
      }
      if (search.status == SearchResult::Status::BudgetExhausted) {
        result_.note = "planner budget exhausted while replanning";
        return LoopResult::Budget;
      }
      if (search.status == SearchResult::Status::NoPlan) continue;

      Outcome outcome = execute_plan(search.plan);
      if (outcome.kind == Outcome::Kind::Success) return LoopResult::Success;
      if (outcome.kind == Outcome::Kind::Inconsistent) return LoopResult::Exhausted;
      if (same_error(error, *outcome.error)) continue;  // keep the refinement, try the next reason
      LoopResult nested = refine_and_replan(*outcome.error, depth + 1);
      if (nested != LoopResult::Exhausted) return nested;
    }
    return LoopResult::Exhausted;
  }

  void log_skip(const ExecutionError& error, const std::string& reason, const std::string& cause) {
    RefinementEvent event;
    event.kind = RefinementEvent::Kind::ReasonSkipped;
    event.schema = error.action.schema;
    event.error_class = error.error_class.str();
    event.reason = reason + " [" + cause + "]";
    event.version = knowledge_.version;
    result_.events.push_back(event);
  }

  /// One repair attempt for one reason: NL precondition, expressibility,
  /// translation, typecheck, property-value acquisition, and finally the
  /// conjunct injection. All-or-nothing: a failure at any stage leaves the
  /// model untouched and logs a reason_skipped event. Returns the NL
  /// precondition on success.
  std::optional<std::string> refine_prec_and_prop_set(const std::string& reason,
                                                      const ExecutionError& error,
                                                      const RoleContext& ctx) {
    std::string nl = generate_precondition(ctx.erroneous_action, reason, backend_, chat_);

    std::vector<std::string> cand_preds;
    for (const auto& p : knowledge_.domain.predicates) cand_preds.push_back(render_signature(p));
    std::vector<std::string> cand_fns;
    for (const auto& f : knowledge_.domain.functions) cand_fns.push_back(render_signature(f));
    ExpressibilityVerdict verdict =
        evaluate_expressibility(nl, cand_preds, cand_fns, backend_, chat_);

    ActionSchema* schema = knowledge_.domain.find_action(error.action.schema);
    if (schema == nullptr) {
      log_skip(error, reason, "schema '" + error.action.schema + "' unknown to the agent");
      return std::nullopt;
    }

    TranslationQuery query;
    query.erroneous_action = ctx.erroneous_action;
    query.parameters = prompts::describe_parameters(schema->params);
    query.correspondence = prompts::describe_correspondence(schema->params, error.action.binding);
    query.nl_precondition = nl;
    std::string expression = translate_to_pddl(query, verdict, backend_, chat_);

    Condition cond;
    try {
      cond = parse_reply_expression(expression);
    } catch (const ConditionGrammarError& e) {
      log_skip(error, reason, std::string("reply grammar: ") + e.what());
      return std::nullopt;
    }

    // Stage new property declarations implied by the expression (only
    // possible on the inexpressible path), then typecheck.
    Domain staged_domain = knowledge_.domain;
    struct NewProperty {
      std::string name;
      bool is_function = false;
    };
    std::vector<NewProperty> declared;
    if (!verdict.expressible) {
      auto stage_signature = [&](const std::string& name, const std::vector<Term>& args,
                                 bool is_function) -> bool {
        if (staged_domain.find_predicate(name) != nullptr ||
            staged_domain.find_function(name) != nullptr)
          return true;
        std::vector<TypedVar> params;
        for (const auto& arg : args) {
          const TypedVar* bound = nullptr;
          for (const auto& p : schema->params)
            if (p.name == arg) bound = &p;
          if (bound == nullptr) return false;  // argument is not an action parameter
          params.push_back(*bound);
        }
        if (is_function) staged_domain.functions.push_back({name, params});
        else staged_domain.predicates.push_back({name, params});
        declared.push_back({name, is_function});
        return true;
      };
      bool ok = true;
      for (const auto& conjunct : cond.conjuncts) {
        if (std::holds_alternative<Literal>(conjunct)) {
          const auto& lit = std::get<Literal>(conjunct);
          ok = ok && stage_signature(lit.atom.predicate, lit.atom.args, false);
        } else {
          const auto& cmp = std::get<Comparison>(conjunct);
          for (const NumericTerm* side : {&cmp.lhs, &cmp.rhs}) {
            if (!std::holds_alternative<FunctionApp>(*side)) continue;
            const auto& app = std::get<FunctionApp>(*side);
            ok = ok && stage_signature(app.function, app.args, true);
          }
        }
      }
      if (!ok) {
        log_skip(error, reason, "expression arguments are not parameters of the action");
        return std::nullopt;
      }
    }

    std::vector<TypeIssue> issues = typecheck_condition(staged_domain, schema->params, cond);
    if (!issues.empty()) {
      log_skip(error, reason, "typecheck: " + issues.front().message);
      return std::nullopt;
    }

    const Conjunct& conjunct = cond.conjuncts.front();
    if (detail::contains_conjunct(schema->precondition, conjunct)) {
      log_skip(error, reason, "duplicate precondition " + render(conjunct));
      return std::nullopt;
    }

    // Acquire values for every referenced property the problem lacks.
    struct Acquisition {
      std::string property;
      std::string env_property;
      bool declared_new;
      std::vector<std::pair<Atom, bool>> atoms;
      std::vector<std::pair<GroundFunction, Rational>> fluents;
      std::vector<std::string> log;
    };
    std::vector<Acquisition> acquisitions;
    auto is_newly_declared = [&declared](const std::string& name) {
      for (const auto& d : declared)
        if (d.name == name) return true;
      return false;
    };
    auto process_property = [&](const std::string& name, bool is_function) -> bool {
      const std::vector<TypedVar>* params = nullptr;
      if (is_function) {
        if (const FunctionSignature* sig = staged_domain.find_function(name)) params = &sig->params;
      } else {
        if (const PredicateSignature* sig = staged_domain.find_predicate(name)) params = &sig->params;
      }
      if (params == nullptr || params->size() != 1) return true;  // only unary properties acquirable
      const std::string& param_type = params->front().type;

      std::vector<std::string> holders;
      for (const auto& obj : knowledge_.problem.objects)
        if (knowledge_.domain.types.is_subtype(obj.type, param_type) ||
            staged_domain.types.is_subtype(obj.type, param_type))
          holders.push_back(obj.name);
      std::vector<std::string> missing;
      if (is_function) {
        for (const auto& holder : holders)
          if (!knowledge_.problem.init_fluents.count(GroundFunction{name, {holder}}))
            missing.push_back(holder);
      } else if (is_newly_declared(name)) {
        missing = holders;  // atoms are closed-world; only new predicates need values
      }
      if (missing.empty()) return true;

      std::string env_name = resolve_env_property(name);
      if (env_name.empty()) {
        log_skip(error, reason, "no environment property matches '" + name + "'");
        return false;
      }
      Acquisition acq;
      acq.property = name;
      acq.env_property = env_name;
      acq.declared_new = is_newly_declared(name);
      for (const auto& holder : missing) {
        std::optional<PropertyValue> value =
            query_property_value(bundle_.world, holder, env_name);
        if (!value) {
          if (is_function) {
            log_skip(error, reason,
                     "environment has no value for " + env_name + "(" + holder + ")");
            return false;
          }
          continue;
        }
        if (std::holds_alternative<bool>(*value)) {
          bool truth = std::get<bool>(*value);
          acq.atoms.push_back({Atom{name, {holder}}, truth});
          acq.log.push_back(name + "(" + holder + ")=" + (truth ? "true" : "false"));
        } else {
          const Rational& num = std::get<Rational>(*value);
          acq.fluents.push_back({GroundFunction{name, {holder}}, num});
          acq.log.push_back(name + "(" + holder + ")=" + num.str());
        }
      }
      acquisitions.push_back(std::move(acq));
      return true;
    };

    bool acquired_ok = true;
    for (const auto& c : cond.conjuncts) {
      if (std::holds_alternative<Literal>(c)) {
        acquired_ok = process_property(std::get<Literal>(c).atom.predicate, false);
      } else {
        const auto& cmp = std::get<Comparison>(c);
        for (const NumericTerm* side : {&cmp.lhs, &cmp.rhs}) {
          if (!std::holds_alternative<FunctionApp>(*side)) continue;
          if (!acquired_ok) break;
          acquired_ok = process_property(std::get<FunctionApp>(*side).function, true);
        }
      }
      if (!acquired_ok) return std::nullopt;
    }

    // Commit: precondition conjunct, declarations, acquired values.
    knowledge_.domain = staged_domain;
    schema = knowledge_.domain.find_action(error.action.schema);
    schema->precondition.conjuncts.push_back(conjunct);
    ++knowledge_.version;
    RefinementEvent added;
    added.kind = RefinementEvent::Kind::PreconditionAdded;
    added.schema = schema->name;
    added.conjunct = render(conjunct);
    added.error_class = error.error_class.str();
    added.reason = reason;
    added.version = knowledge_.version;
    result_.events.push_back(added);

    for (const auto& acq : acquisitions) {
      for (const auto& [atom, truth] : acq.atoms)
        if (truth) knowledge_.problem.init_atoms.insert(atom);
      for (const auto& [fn, value] : acq.fluents) knowledge_.problem.init_fluents[fn] = value;
      knowledge_.property_alias[acq.property] = acq.env_property;
      ++knowledge_.version;
      RefinementEvent event;
      event.kind = RefinementEvent::Kind::PropertyAdded;
      event.property = acq.property;
      event.env_property = acq.env_property;
      event.declared_new = acq.declared_new;
      event.acquired = acq.log;
      event.error_class = error.error_class.str();
      event.reason = reason;
      event.version = knowledge_.version;
      result_.events.push_back(event);
    }
    return nl;
  }

  /// Property-name matching, deterministic tiers first: exact match after
  /// normalization, then token-overlap Jaccard at 0.5, then one LLM query.
  /// Returns the environment property name, or empty when nothing matches.
  std::string resolve_env_property(const std::string& agent_name) {
    auto alias = knowledge_.property_alias.find(agent_name);
    if (alias != knowledge_.property_alias.end()) return alias->second;

    std::vector<std::string> env_names = environment_property_names(bundle_.world);
    // Skip environment properties that already feed an agent property.
    std::set<std::string> taken;
    for (const auto& [agent_prop, env_prop] : knowledge_.property_alias) taken.insert(env_prop);
    std::vector<std::string> available;
    for (const auto& name : env_names) {
      if (taken.count(name)) continue;
      bool already_agent = false;
      for (const auto& p : knowledge_.domain.predicates)
        if (p.name == name && p.name != agent_name) already_agent = true;
      for (const auto& f : knowledge_.domain.functions)
        if (f.name == name && f.name != agent_name) already_agent = true;
      if (!already_agent) available.push_back(name);
    }

    std::string normalized = detail::normalize_property_name(agent_name);
    for (const auto& name : available)
      if (detail::normalize_property_name(name) == normalized) return name;

    std::string best;
    double best_score = 0.0;
    for (const auto& name : available) {
      double score = detail::token_jaccard(agent_name, name);
      if (score > best_score) {
        best_score = score;
        best = name;
      }
    }
    if (best_score >= 0.5) return best;

    std::optional<std::string> llm_pick = match_property(agent_name, available, backend_, chat_);
    return llm_pick.value_or("");
  }

  /// Adds one catalogue object chosen by the object expander, together
  /// with its property values over the agent's current vocabulary and its
  /// location facts among known objects.
  bool refine_object_set(const ExpansionContext& ctx, const std::string& error_class) {
    std::vector<TypedObject> candidates = candidate_objects(bundle_.world, knowledge_.problem);
    if (candidates.empty()) return false;
    std::vector<std::string> names;
    for (const auto& c : candidates) names.push_back(c.name);
    std::string chosen = expand_object(bundle_.world.task_text, ctx.erroneous_action,
                                       ctx.nl_precondition, names, backend_, chat_);
    const CatalogueEntry* entry = bundle_.world.find_entry(chosen);
    if (entry == nullptr) return false;

    RefinementEvent event;
    event.kind = RefinementEvent::Kind::ObjectAdded;
    event.object = chosen;
    event.error_class = error_class;
    knowledge_.problem.objects.push_back({entry->name, entry->type});

    auto acquire = [&](const std::string& agent_prop, const std::vector<TypedVar>& params,
                       bool is_function) {
      if (params.size() != 1) return;
      if (!knowledge_.domain.types.is_subtype(entry->type, params.front().type)) return;
      auto alias = knowledge_.property_alias.find(agent_prop);
      std::string env_prop = alias == knowledge_.property_alias.end() ? agent_prop : alias->second;
      std::optional<PropertyValue> value = query_property_value(bundle_.world, chosen, env_prop);
      if (!value) return;
      if (std::holds_alternative<bool>(*value)) {
        if (is_function) return;
        if (std::get<bool>(*value)) {
          knowledge_.problem.init_atoms.insert(Atom{agent_prop, {chosen}});
          event.acquired.push_back(agent_prop + "(" + chosen + ")=true");
        }
      } else if (is_function) {
        knowledge_.problem.init_fluents[GroundFunction{agent_prop, {chosen}}] =
            std::get<Rational>(*value);
        event.acquired.push_back(agent_prop + "(" + chosen + ")=" +
                                 std::get<Rational>(*value).str());
      }
    };
    for (const auto& p : knowledge_.domain.predicates) acquire(p.name, p.params, false);
    for (const auto& f : knowledge_.domain.functions) acquire(f.name, f.params, true);

    // Location facts the agent can see: catalogue atoms whose symbols and
    // participants it knows.
    for (const auto& atom : entry->atoms) {
      if (knowledge_.domain.find_predicate(atom.predicate) == nullptr) continue;
      bool all_known = true;
      for (const auto& arg : atom.args)
        if (knowledge_.problem.find_object(arg) == nullptr) all_known = false;
      if (!all_known) continue;
      knowledge_.problem.init_atoms.insert(atom);
      event.acquired.push_back(render(atom));
    }

    ++knowledge_.version;
    event.version = knowledge_.version;
    result_.events.push_back(event);
    return true;
  }

  const ScenarioBundle& bundle_;
  ChatBackend& backend_;
  Budgets budgets_;
  ChatParams chat_;
  ObservationMode observation_mode_;

  AgentKnowledge knowledge_;
  State truth_state_;
  EpisodeResult result_;
};

/// Versioned JSON-lines event log: one header line, one line per event,
/// one trailing summary line.
inline std::string event_log_jsonl(const std::string& scenario, const EpisodeResult& result) {
  std::string out;
  nlohmann::json header = {{"lasp_events_version", 1}, {"scenario", scenario}};
  out += header.dump() + "\n";
  for (const auto& event : result.events) {
    nlohmann::json doc = {{"kind", event.kind_name()}, {"version", event.version}};
    if (!event.schema.empty()) doc["schema"] = event.schema;
    if (!event.conjunct.empty()) doc["conjunct"] = event.conjunct;
    if (!event.property.empty()) {
      doc["property"] = event.property;
      doc["env_property"] = event.env_property;
      doc["declared_new"] = event.declared_new;
    }
    if (!event.object.empty()) doc["object"] = event.object;
    if (!event.acquired.empty()) doc["acquired"] = event.acquired;
    if (!event.error_class.empty()) doc["error_class"] = event.error_class;
    if (!event.reason.empty()) doc["reason"] = event.reason;
    out += doc.dump() + "\n";
  }
  nlohmann::json summary = {{"outcome", result.outcome_name()},
                            {"events", result.events.size()},
                            {"max_depth", result.max_depth_reached},
                            {"oracle_steps", result.oracle_steps},
                            {"replans", result.replans}};
  if (!result.note.empty()) summary["note"] = result.note;
  out += summary.dump() + "\n";
  return out;
}

}  // namespace lasp
