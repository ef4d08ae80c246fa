#pragma once

#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "lasp/ast.hpp"
#include "lasp/ground.hpp"
#include "lasp/state.hpp"

namespace lasp {

struct SearchBudget {
  std::uint64_t max_expansions = 1'000'000;
  std::optional<std::chrono::milliseconds> time_limit;  // off by default: determinism
};

enum class Heuristic { Blind, Additive };

/// NoPlan means the reachable space was exhausted; BudgetExhausted means
/// the search gave up. The repair loop treats only NoPlan as "expand the
/// object set", so the two must never be conflated.
struct SearchResult {
  enum class Status { Found, NoPlan, BudgetExhausted };
  Status status = Status::NoPlan;
  Plan plan;
  std::uint64_t expansions = 0;

  [[nodiscard]] bool found() const { return status == Status::Found; }
};

struct ValidationResult {
  enum class Status { Ok, StepFailed, GoalUnreached };
  Status status = Status::Ok;
  std::size_t step = 0;  // 0-based index of the failing step
  std::string unmet;     // rendered conjunct that failed
  State final_state;

  [[nodiscard]] bool ok() const { return status == Status::Ok; }
};

/// Simulates the plan stepwise under the given model, reporting the first
/// step whose precondition fails, then checks the goal in the final state.
inline ValidationResult validate_plan(const Domain&, const Problem& problem, const Plan& plan) {
  ValidationResult result;
  State state = initial_state(problem);
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const GroundAction& action = plan.steps[i];
    if (const Conjunct* unmet = first_unmet(state, action.precondition)) {
      result.status = ValidationResult::Status::StepFailed;
      result.step = i;
      result.unmet = render(*unmet);
      result.final_state = state;
      return result;
    }
    state = apply(state, action);
  }
  if (const Conjunct* unmet = first_unmet(state, problem.goal)) {
    result.status = ValidationResult::Status::GoalUnreached;
    result.step = plan.steps.size();
    result.unmet = render(*unmet);
  }
  result.final_state = state;
  return result;
}

namespace detail {

/// Indexed compilation of one planning task. Atoms and fluents that no
/// action can change are resolved against the initial state up front;
/// ground actions with a statically false conjunct are dropped. Search
/// states then carry only the dynamic part.
struct GroundTask {
  struct NumRef {
    bool is_const = false;
    std::uint32_t fluent = 0;  // dynamic fluent index when !is_const
    Rational constant;
  };
  struct Cmp {
    CompareOp op;
    NumRef lhs;
    NumRef rhs;
  };
  struct NumEff {
    NumericEffect::Kind kind;
    std::uint32_t target;
    NumRef value;
  };
  struct Act {
    std::uint32_t source;  // index into `actions`
    std::vector<std::uint32_t> pre_pos;
    std::vector<std::uint32_t> pre_neg;
    std::vector<Cmp> comparisons;
    std::vector<std::uint32_t> add;
    std::vector<std::uint32_t> del;
    std::vector<NumEff> numeric;
  };

  std::vector<GroundAction> actions;  // full, sorted grounding
  std::vector<Act> compiled;          // statically reachable subset
  std::vector<std::uint32_t> goal_pos;
  std::vector<std::uint32_t> goal_neg;
  std::vector<Cmp> goal_cmps;
  bool goal_statically_false = false;

  std::vector<Atom> dynamic_atoms;
  std::vector<GroundFunction> dynamic_fluents;
  std::vector<std::optional<Rational>> init_dynamic_fluents;
  std::vector<std::uint32_t> init_dynamic_atoms;
};

inline std::string atom_key(const Atom& a) {
  std::string key = a.predicate;
  for (const auto& arg : a.args) key += " " + arg;
  return key;
}

inline std::string fluent_key(const GroundFunction& f) {
  std::string key = f.function;
  for (const auto& arg : f.args) key += " " + arg;
  return key;
}

class TaskCompiler {
public:
  TaskCompiler(const Domain& domain, const Problem& problem) : problem_(problem) {
    task_.actions = ground(domain, problem);
    // Atoms/fluents touched by any effect are dynamic; everything else is
    // fixed by the initial state.
    for (const auto& ga : task_.actions) {
      for (const auto& a : ga.add) dynamic_atom_keys_.insert(atom_key(a));
      for (const auto& d : ga.del) dynamic_atom_keys_.insert(atom_key(d));
      for (const auto& ne : ga.numeric_effects)
        dynamic_fluent_keys_.insert(fluent_key(GroundFunction{ne.target.function, ne.target.args}));
    }
    compile_actions();
    compile_goal();
    for (const auto& atom : problem.init_atoms) {
      auto it = atom_ids_.find(atom_key(atom));
      if (it != atom_ids_.end()) task_.init_dynamic_atoms.push_back(it->second);
    }
    task_.init_dynamic_fluents.resize(task_.dynamic_fluents.size());
    for (std::size_t i = 0; i < task_.dynamic_fluents.size(); ++i) {
      auto it = problem.init_fluents.find(task_.dynamic_fluents[i]);
      if (it != problem.init_fluents.end()) task_.init_dynamic_fluents[i] = it->second;
    }
  }

  GroundTask take() { return std::move(task_); }

private:
  enum class StaticTruth { True, False, Dynamic };

  StaticTruth literal_truth(const Atom& atom, bool positive) {
    if (dynamic_atom_keys_.count(atom_key(atom))) return StaticTruth::Dynamic;
    bool present = problem_.init_atoms.count(atom) > 0;
    return present == positive ? StaticTruth::True : StaticTruth::False;
  }

  // Statics with no initial value can never be evaluated, so a comparison
  // over them is unsatisfiable forever.
  StaticTruth comparison_truth(const Comparison& cmp) {
    auto resolve = [&](const NumericTerm& t, Rational& out) -> StaticTruth {
      if (std::holds_alternative<Rational>(t)) {
        out = std::get<Rational>(t);
        return StaticTruth::True;
      }
      const auto& app = std::get<FunctionApp>(t);
      GroundFunction gf{app.function, app.args};
      if (dynamic_fluent_keys_.count(fluent_key(gf))) return StaticTruth::Dynamic;
      auto it = problem_.init_fluents.find(gf);
      if (it == problem_.init_fluents.end()) return StaticTruth::False;
      out = it->second;
      return StaticTruth::True;
    };
    Rational lhs;
    Rational rhs;
    StaticTruth lt = resolve(cmp.lhs, lhs);
    StaticTruth rt = resolve(cmp.rhs, rhs);
    if (lt == StaticTruth::False || rt == StaticTruth::False) return StaticTruth::False;
    if (lt == StaticTruth::Dynamic || rt == StaticTruth::Dynamic) return StaticTruth::Dynamic;
    State probe;  // both sides constant: evaluate now
    Comparison ground_cmp{cmp.op, lhs, rhs};
    return holds(probe, ground_cmp) ? StaticTruth::True : StaticTruth::False;
  }

  std::uint32_t atom_id(const Atom& a) {
    std::string key = atom_key(a);
    auto it = atom_ids_.find(key);
    if (it != atom_ids_.end()) return it->second;
    auto id = static_cast<std::uint32_t>(task_.dynamic_atoms.size());
    atom_ids_.emplace(std::move(key), id);
    task_.dynamic_atoms.push_back(a);
    return id;
  }

  std::uint32_t fluent_id(const GroundFunction& f) {
    std::string key = fluent_key(f);
    auto it = fluent_ids_.find(key);
    if (it != fluent_ids_.end()) return it->second;
    auto id = static_cast<std::uint32_t>(task_.dynamic_fluents.size());
    fluent_ids_.emplace(std::move(key), id);
    task_.dynamic_fluents.push_back(f);
    return id;
  }

  // Returns false when the value is a statically undefined fluent.
  bool compile_num(const NumericTerm& term, GroundTask::NumRef& out) {
    if (std::holds_alternative<Rational>(term)) {
      out.is_const = true;
      out.constant = std::get<Rational>(term);
      return true;
    }
    const auto& app = std::get<FunctionApp>(term);
    GroundFunction gf{app.function, app.args};
    if (dynamic_fluent_keys_.count(fluent_key(gf))) {
      out.is_const = false;
      out.fluent = fluent_id(gf);
      return true;
    }
    auto it = problem_.init_fluents.find(gf);
    if (it == problem_.init_fluents.end()) return false;
    out.is_const = true;
    out.constant = it->second;
    return true;
  }

  void compile_actions() {
    for (std::uint32_t i = 0; i < task_.actions.size(); ++i) {
      const GroundAction& ga = task_.actions[i];
      GroundTask::Act act;
      act.source = i;
      bool dead = false;
      for (const auto& conjunct : ga.precondition.conjuncts) {
        if (std::holds_alternative<Literal>(conjunct)) {
          const auto& lit = std::get<Literal>(conjunct);
          switch (literal_truth(lit.atom, lit.positive)) {
            case StaticTruth::True: break;
            case StaticTruth::False: dead = true; break;
            case StaticTruth::Dynamic:
              (lit.positive ? act.pre_pos : act.pre_neg).push_back(atom_id(lit.atom));
              break;
          }
        } else {
          const auto& cmp = std::get<Comparison>(conjunct);
          switch (comparison_truth(cmp)) {
            case StaticTruth::True: break;
            case StaticTruth::False: dead = true; break;
            case StaticTruth::Dynamic: {
              GroundTask::Cmp compiled;
              compiled.op = cmp.op;
              if (!compile_num(cmp.lhs, compiled.lhs) || !compile_num(cmp.rhs, compiled.rhs)) {
                dead = true;
                break;
              }
              act.comparisons.push_back(compiled);
              break;
            }
          }
        }
        if (dead) break;
      }
      if (dead) continue;
      for (const auto& a : ga.add) act.add.push_back(atom_id(a));
      for (const auto& d : ga.del) act.del.push_back(atom_id(d));
      bool bad_numeric = false;
      for (const auto& ne : ga.numeric_effects) {
        GroundTask::NumEff eff;
        eff.kind = ne.kind;
        eff.target = fluent_id(GroundFunction{ne.target.function, ne.target.args});
        if (!compile_num(ne.value, eff.value)) {
          bad_numeric = true;
          break;
        }
        act.numeric.push_back(eff);
      }
      if (bad_numeric) continue;
      task_.compiled.push_back(std::move(act));
    }
  }

  void compile_goal() {
    for (const auto& conjunct : problem_.goal.conjuncts) {
      if (std::holds_alternative<Literal>(conjunct)) {
        const auto& lit = std::get<Literal>(conjunct);
        switch (literal_truth(lit.atom, lit.positive)) {
          case StaticTruth::True: break;
          case StaticTruth::False: task_.goal_statically_false = true; break;
          case StaticTruth::Dynamic:
            (lit.positive ? task_.goal_pos : task_.goal_neg).push_back(atom_id(lit.atom));
            break;
        }
      } else {
        const auto& cmp = std::get<Comparison>(conjunct);
        switch (comparison_truth(cmp)) {
          case StaticTruth::True: break;
          case StaticTruth::False: task_.goal_statically_false = true; break;
          case StaticTruth::Dynamic: {
            GroundTask::Cmp compiled;
            compiled.op = cmp.op;
            if (!compile_num(cmp.lhs, compiled.lhs) || !compile_num(cmp.rhs, compiled.rhs)) {
              task_.goal_statically_false = true;
              break;
            }
            task_.goal_cmps.push_back(compiled);
            break;
          }
        }
      }
    }
  }

  const Problem& problem_;
  GroundTask task_;
  std::unordered_set<std::string> dynamic_atom_keys_;
  std::unordered_set<std::string> dynamic_fluent_keys_;
  std::unordered_map<std::string, std::uint32_t> atom_ids_;
  std::unordered_map<std::string, std::uint32_t> fluent_ids_;
};

/// Search state: dynamic atoms as a bit vector plus an index into the
/// interned table of dynamic fluent valuations.
struct FastState {
  std::vector<std::uint64_t> bits;
  std::uint32_t fluents = 0;

  friend bool operator==(const FastState&, const FastState&) = default;
};

struct FastStateHash {
  std::size_t operator()(const FastState& s) const noexcept {
    std::size_t h = 1469598103934665603ULL;
    auto mix = [&h](std::size_t v) {
      h ^= v;
      h *= 1099511628211ULL;
    };
    for (auto w : s.bits) mix(static_cast<std::size_t>(w));
    mix(s.fluents);
    return h;
  }
};

using FluentVec = std::vector<std::optional<Rational>>;

struct FluentVecHash {
  std::size_t operator()(const FluentVec& v) const noexcept {
    std::size_t h = 14695981039346656037ULL;
    auto mix = [&h](std::size_t x) {
      h ^= x;
      h *= 1099511628211ULL;
    };
    for (const auto& f : v) {
      if (!f) {
        mix(0x9e3779b9U);
      } else {
        mix(static_cast<std::size_t>(f->num()));
        mix(static_cast<std::size_t>(f->den()));
      }
    }
    return h;
  }
};

class FluentTable {
public:
  std::uint32_t intern(FluentVec v) {
    auto it = ids_.find(v);
    if (it != ids_.end()) return it->second;
    auto id = static_cast<std::uint32_t>(rows_.size());
    rows_.push_back(v);
    ids_.emplace(std::move(v), id);
    return id;
  }
  [[nodiscard]] const FluentVec& row(std::uint32_t id) const { return rows_[id]; }

private:
  std::vector<FluentVec> rows_;
  std::unordered_map<FluentVec, std::uint32_t, FluentVecHash> ids_;
};

inline bool get_bit(const std::vector<std::uint64_t>& bits, std::uint32_t i) {
  return (bits[i >> 6] >> (i & 63U)) & 1U;
}
inline void set_bit(std::vector<std::uint64_t>& bits, std::uint32_t i, bool v) {
  if (v) bits[i >> 6] |= 1ULL << (i & 63U);
  else bits[i >> 6] &= ~(1ULL << (i & 63U));
}

inline Rational resolve(const FluentVec& fluents, const GroundTask::NumRef& ref,
                        const GroundTask& task) {
  if (ref.is_const) return ref.constant;
  const auto& opt = fluents[ref.fluent];
  if (!opt) throw MissingFluentError(task.dynamic_fluents[ref.fluent]);
  return *opt;
}

inline bool cmp_holds(const FluentVec& fluents, const GroundTask::Cmp& cmp,
                      const GroundTask& task) {
  Rational lhs = resolve(fluents, cmp.lhs, task);
  Rational rhs = resolve(fluents, cmp.rhs, task);
  switch (cmp.op) {
    case CompareOp::Less: return lhs < rhs;
    case CompareOp::Greater: return lhs > rhs;
    case CompareOp::LessEq: return lhs <= rhs;
    case CompareOp::GreaterEq: return lhs >= rhs;
    case CompareOp::Equal: return lhs == rhs;
  }
  return false;
}

inline bool applicable(const FastState& s, const FluentVec& fluents, const GroundTask::Act& act,
                       const GroundTask& task) {
  for (auto id : act.pre_pos)
    if (!get_bit(s.bits, id)) return false;
  for (auto id : act.pre_neg)
    if (get_bit(s.bits, id)) return false;
  for (const auto& cmp : act.comparisons)
    if (!cmp_holds(fluents, cmp, task)) return false;
  return true;
}

inline bool is_goal(const FastState& s, const FluentVec& fluents, const GroundTask& task) {
  if (task.goal_statically_false) return false;
  for (auto id : task.goal_pos)
    if (!get_bit(s.bits, id)) return false;
  for (auto id : task.goal_neg)
    if (get_bit(s.bits, id)) return false;
  for (const auto& cmp : task.goal_cmps)
    if (!cmp_holds(fluents, cmp, task)) return false;
  return true;
}

/// Additive delete relaxation. Comparisons and negative literals are
/// treated as optimistically satisfiable, so the estimate only tracks
/// positive-atom reachability. An unreachable goal atom is a sound
/// dead-end signal: add lists are the only way an atom ever becomes true.
class AdditiveHeuristic {
public:
  explicit AdditiveHeuristic(const GroundTask& task) : task_(task) {}

  static constexpr std::uint32_t kInf = std::numeric_limits<std::uint32_t>::max();

  std::uint32_t operator()(const FastState& s) const {
    std::vector<std::uint32_t> cost(task_.dynamic_atoms.size(), kInf);
    for (std::uint32_t i = 0; i < cost.size(); ++i)
      if (get_bit(s.bits, i)) cost[i] = 0;
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& act : task_.compiled) {
        std::uint64_t total = 1;
        bool reachable = true;
        for (auto id : act.pre_pos) {
          if (cost[id] == kInf) {
            reachable = false;
            break;
          }
          total += cost[id];
        }
        if (!reachable) continue;
        auto capped = static_cast<std::uint32_t>(total > kInf ? kInf : total);
        for (auto id : act.add) {
          if (capped < cost[id]) {
            cost[id] = capped;
            changed = true;
          }
        }
      }
    }
    std::uint64_t h = 0;
    for (auto id : task_.goal_pos) {
      if (cost[id] == kInf) return kInf;
      h += cost[id];
    }
    return static_cast<std::uint32_t>(h > kInf ? kInf : h);
  }

private:
  const GroundTask& task_;
};

}  // namespace detail

/// Forward best-first search over ground states. Unit action costs; with
/// Heuristic::Blind this is breadth-first search, so returned plans are
/// length-optimal. Ties break by insertion order over the sorted grounding,
/// which makes two runs on the same model produce identical plans.
inline SearchResult find_plan(const Domain& domain, const Problem& problem,
                              const SearchBudget& budget = {},
                              Heuristic heuristic = Heuristic::Blind) {
  detail::GroundTask task = detail::TaskCompiler(domain, problem).take();
  if (task.goal_statically_false) {
    // a goal conjunct over atoms/fluents no action can change is false in
    // the initial state: provably unreachable, no search needed
    SearchResult result;
    result.status = SearchResult::Status::NoPlan;
    return result;
  }

  detail::FluentTable fluent_table;
  detail::FastState init;
  init.bits.assign(task.dynamic_atoms.size() / 64 + 1, 0);
  for (auto id : task.init_dynamic_atoms) detail::set_bit(init.bits, id, true);
  init.fluents = fluent_table.intern(task.init_dynamic_fluents);

  std::optional<detail::AdditiveHeuristic> hadd;
  if (heuristic == Heuristic::Additive) hadd.emplace(task);
  auto estimate = [&](const detail::FastState& s) -> std::uint32_t {
    return hadd ? (*hadd)(s) : 0;
  };

  struct Node {
    detail::FastState state;
    std::uint32_t g = 0;
    std::int32_t parent = -1;
    std::uint32_t via = 0;
  };
  struct QueueEntry {
    std::uint64_t f = 0;
    std::uint64_t seq = 0;
    std::uint32_t node = 0;
    bool operator>(const QueueEntry& other) const {
      if (f != other.f) return f > other.f;
      return seq > other.seq;
    }
  };

  std::vector<Node> nodes;
  std::unordered_map<detail::FastState, std::uint32_t, detail::FastStateHash> best_g;
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> open;
  std::uint64_t seq = 0;

  std::uint32_t h0 = estimate(init);
  nodes.push_back(Node{init, 0, -1, 0});
  best_g[init] = 0;
  if (h0 != detail::AdditiveHeuristic::kInf) open.push({h0, seq++, 0});

  SearchResult result;
  const auto start_time = std::chrono::steady_clock::now();
  while (!open.empty()) {
    QueueEntry entry = open.top();
    open.pop();
    const Node& node = nodes[entry.node];
    if (node.g > best_g[node.state]) continue;  // superseded entry

    if (detail::is_goal(node.state, fluent_table.row(node.state.fluents), task)) {
      result.status = SearchResult::Status::Found;
      std::vector<std::uint32_t> actions;
      std::int32_t cur = static_cast<std::int32_t>(entry.node);
      while (cur >= 0 && nodes[cur].parent >= 0) {
        actions.push_back(nodes[cur].via);
        cur = nodes[cur].parent;
      }
      for (auto it = actions.rbegin(); it != actions.rend(); ++it)
        result.plan.steps.push_back(task.actions[task.compiled[*it].source]);
      return result;
    }

    ++result.expansions;
    if (result.expansions > budget.max_expansions) {
      result.status = SearchResult::Status::BudgetExhausted;
      return result;
    }
    if (budget.time_limit && (result.expansions & 1023U) == 0) {
      if (std::chrono::steady_clock::now() - start_time > *budget.time_limit) {
        result.status = SearchResult::Status::BudgetExhausted;
        return result;
      }
    }

    const detail::FastState state = node.state;  // copy: nodes may reallocate below
    const std::uint32_t parent_g = node.g;
    const detail::FluentVec fluents = fluent_table.row(state.fluents);  // copy: table may grow
    for (std::uint32_t ai = 0; ai < task.compiled.size(); ++ai) {
      const auto& act = task.compiled[ai];
      if (!detail::applicable(state, fluents, act, task)) continue;
      detail::FastState next;
      next.bits = state.bits;
      for (auto id : act.del) detail::set_bit(next.bits, id, false);
      for (auto id : act.add) detail::set_bit(next.bits, id, true);
      if (act.numeric.empty()) {
        next.fluents = state.fluents;
      } else {
        detail::FluentVec updated = fluents;
        for (const auto& eff : act.numeric) {
          Rational value = detail::resolve(fluents, eff.value, task);
          if (eff.kind == NumericEffect::Kind::Assign) {
            updated[eff.target] = value;
          } else {
            if (!fluents[eff.target]) throw MissingFluentError(task.dynamic_fluents[eff.target]);
            updated[eff.target] = *fluents[eff.target] + value;
          }
        }
        next.fluents = fluent_table.intern(std::move(updated));
      }
      std::uint32_t g = parent_g + 1;
      auto it = best_g.find(next);
      if (it != best_g.end() && it->second <= g) continue;
      std::uint32_t h = estimate(next);
      if (h == detail::AdditiveHeuristic::kInf) continue;  // proven dead end
      best_g[next] = g;
      nodes.push_back(Node{std::move(next), g, static_cast<std::int32_t>(entry.node), ai});
      open.push(
          {static_cast<std::uint64_t>(g) + h, seq++, static_cast<std::uint32_t>(nodes.size() - 1)});
    }
  }
  result.status = SearchResult::Status::NoPlan;
  return result;
}

}  // namespace lasp
