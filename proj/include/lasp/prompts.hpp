#pragma once

#include <string>
#include <vector>

#include "lasp/ast.hpp"

namespace lasp {

/// Context assembled by the engine for the LLM roles. Everything the
/// prompts may mention lives here; truth-model internals never do.
struct RoleContext {
  std::string task;                   // "heat the sandwich and place it on a plate"
  std::vector<std::string> history;   // executed action sentences, in order
  std::string erroneous_action;       // "Pick up the sandwich from the microwave."
  std::string observation;            // d(e)
  std::vector<std::string> candidate_predicates;  // rendered signatures
  std::vector<std::string> candidate_functions;
  std::string parameters;      // "the robot, denoted as ?r; ..."
  std::string correspondence;  // "the agent is ?r; ..."
  std::vector<std::string> candidate_objects;
};

namespace prompts {

inline std::string replace_slot(std::string text, const std::string& slot,
                                const std::string& value) {
  const std::string marker = "{" + slot + "}";
  std::size_t pos = 0;
  while ((pos = text.find(marker, pos)) != std::string::npos) {
    text.replace(pos, marker.size(), value);
    pos += value.size();
  }
  return text;
}

inline std::string join(const std::vector<std::string>& items, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += sep;
    out += items[i];
  }
  return out;
}

inline std::string numbered_lines(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i)
    out += std::to_string(i + 1) + ". " + items[i] + "\n";
  return out;
}

inline constexpr const char* kCauseAnalyzer =
    "You are expected to provide possible reasons for errors in robot actions, where errors are "
    "essentially unexpected outcomes. You are given the robot task, the historical actions, the "
    "action caused the error, the observation of the error. In your answer, each reason should "
    "be as brief as possible. And the answer should follow this format:\n"
    "Possible reasons:\n"
    "1. reason1\n"
    "2. reason2\n"
    " ...\n"
    "The robot task is to {task}.\n"
    "The historical actions are:\n"
    "{history}"
    "The action caused the error is: {erroneous}\n"
    "The observation of the error is: {observation}\n"
    "What are possible reasons that could lead to this error?";

inline constexpr const char* kPreconditionGenerator =
    "You are given a robotic action that caused an error and the reason why this error occurred. "
    "You are expected to provide a precondition for an robotic action to prevent a recurrence of "
    "the same error. The precondition should only require one property of the object or robot "
    "satisfy a certain condition. The answer should be as brief as possible (no further "
    "explanation) and it should follow this format:\n"
    "Precondition: ...\n"
    "The action caused the error is: {erroneous}\n"
    "The reason why this error occurred is: {reason}\n"
    "What precondition should be satisfied to prevent a recurrence of the same error?";

inline constexpr const char* kPropertyEvaluator =
    "You are expected to judge whether the given natural language described precondition can be "
    "expressed by the candidate predicates and functions, or their respective antonyms. You are "
    "given the natural language described precondition, candidate predicates and functions. "
    "Answer should be \"Yes\" or \"No\". If you answer \"Yes\", you are expected to provide a "
    "suitable predicate or two suitable functions for expressing the precondition. The suitable "
    "predicate or two suitable functions must come from the given candidate predicates and "
    "functions. There are two kinds of formats to provide the suitable expression: (1) If "
    "suggesting a predicate, respond with: \"Suitable predicate: ...\"; (2) If suggesting two "
    "functions, respond with: \"Suitable functions: ...\".\n"
    "Natural language described precondition: {nl}\n"
    "Candidate predicates: {predicates}.\n"
    "Candidate functions: {functions}.\n"
    "Can the precondition be expressed by the candidate predicates and functions, or their "
    "respective antonyms? If yes, provide a suitable predicate or two suitable functions for "
    "expressing the precondition.";

inline constexpr const char* kTranslatorFunctions =
    "Given the action description, the candidate parameters, the corresponding between instances "
    "and parameters, candidate functions, and a natural utterance, you are expected to translate "
    "the natural utterance into a PDDL precondition expression for the given action. The "
    "expected PDDL expression should satisfy the following grammar: (<comparison-operator> "
    "<function-1> <function-2>). The grammar of <function> is (<function-name> <parameter-1> "
    "<parameter-2> ...). <function-name> must come from the given candidate functions. "
    "<parameter> must be one of the candidate parameters. <comparsion-operator> should be one of "
    "the following: \"<\", \">\", \"<=\", \">=\". The answer should follow this format (no "
    "further explanation):\n"
    "PDDL expression: ...\n"
    "Here is an example:\n"
    "Action description: Pick up the box from the cabinet.\n"
    "Candidate parameters: the robot, denoted as ?r; the object, denoted as ?obj; the "
    "receptacle, denoted as ?rec.\n"
    "Corresponding between instances and parameters: the robot is ?r; the box is ?obj; the "
    "cabinet is ?rec.\n"
    "Candidate functions: (weight ?obj), (lift-capacity ?r)\n"
    "Natural utterance: The weight of the box should not exceed the maximum weight that the "
    "robot can handle.\n"
    "PDDL expression: (<= (weight ?obj) (lift-capacity ?r))\n"
    "Action description: {erroneous}\n"
    "Candidate parameters: {parameters}.\n"
    "Corresponding between instances and parameters: {correspondence}.\n"
    "Candidate functions: {functions}.\n"
    "Natural utterance: {nl}";

inline constexpr const char* kTranslatorPredicate =
    "Given the action description, the candidate parameters, the corresponding between instances "
    "and parameters, candidate predicate, and a natural utterance, you are expected to translate "
    "the natural utterance into a PDDL precondition expression for the given action.\n"
    "The expected PDDL expression should satisfy one of following grammars: (1) (<predicate> "
    "<parameter-1> <parameter-2> ...); (2) (not (<predicate> <parameter-1> <parameter-2> ...)). "
    "<parameter> must be one of the candidate parameters. <predicate> should be the given "
    "candidate predicate. The answer should follow this format (no further explanation):\n"
    "PDDL expression: ...\n"
    "Here is an example:\n"
    "Action description: Put the plate in the fridge.\n"
    "Candidate parameters: the robot, denoted as ?r; the object, denoted as ?obj; the "
    "receptacle, denoted as ?rec.\n"
    "Corresponding between instances and parameters: the robot is ?r; the plate is ?obj; the "
    "fridge is ?rec.\n"
    "Candidate predicate: (is-open ?rec)\n"
    "Natural utterance: The fridge should be open when placing the plate in the fridge.\n"
    "PDDL expression: (is-open ?rec)\n"
    "Action description: {erroneous}\n"
    "Candidate parameters: {parameters}.\n"
    "Corresponding between instances and parameters: {correspondence}.\n"
    "Candidate predicate: {predicate}.\n"
    "Natural utterance: {nl}";

/// Used when the evaluator answered "No": the utterance may introduce new
/// predicate or function names, so both grammars are allowed and no
/// candidate constraint is imposed.
inline constexpr const char* kTranslatorFree =
    "Given the action description, the candidate parameters of the action, the corresponding "
    "between instances and parameters, and a natural utterance, you are expected to translate "
    "the natural utterance into a PDDL precondition expression for the given action.\n"
    "The expected PDDL expression should satisfy one of following grammars: (1) (<predicate> "
    "<parameter-1> <parameter-2> ...); (2) (not (<predicate> <parameter-1> <parameter-2> ...)); "
    "(3) (<comparison-operator> <function-1> <function-2>). The grammar of <function> is "
    "(<function-name> <parameter-1> <parameter-2> ...). <parameter> must be one of the candidate "
    "parameters. <comparsion-operator> should be one of the following: \"<\", \">\", \"<=\", "
    "\">=\". The answer should follow this format (no further explanation):\n"
    "PDDL expression: ...\n"
    "Action description: {erroneous}\n"
    "Candidate parameters: {parameters}.\n"
    "Corresponding between instances and parameters: {correspondence}.\n"
    "Natural utterance: {nl}";

inline constexpr const char* kObjectExpander =
    "You are expected to select the most suitable object from the candidate objects to prevent a "
    "recurrence of the error and assist the robot complete the task. You are given the robot "
    "task, the action caused the error, the precondition that the action does not satisfy, and "
    "the candidate objects. Answer should follow this format: Suitable object: <object>. "
    "<object> must be one of the candidate objects.\n"
    "The robot task is to {task}.\n"
    "The action caused the error is: {erroneous}\n"
    "The precondition that the action does not satisfy is: {nl}\n"
    "Candidate objects: {candidates}.\n"
    "Which object is the most suitable to prevent a recurrence of the error and assist the robot "
    "complete the task?";

/// Third tier of property-name matching: the deterministic tiers found no
/// acceptable environment property, so the LLM chooses one or declines.
inline constexpr const char* kPropertyMatcher =
    "You are expected to decide which of the candidate properties is semantically closest to a "
    "new property used by a robot planner. You are given the new property and the candidate "
    "properties. Answer should follow this format: Matching property: <property>. <property> "
    "must be one of the candidate properties. If no candidate property has a close meaning, "
    "answer: Matching property: none.\n"
    "New property: {new}.\n"
    "Candidate properties: {candidates}.\n"
    "Which candidate property is semantically closest to the new property?";

inline std::string render_cause_analyzer(const RoleContext& ctx) {
  std::string text = kCauseAnalyzer;
  text = replace_slot(text, "task", ctx.task);
  text = replace_slot(text, "history",
                      ctx.history.empty() ? std::string("none\n") : numbered_lines(ctx.history));
  text = replace_slot(text, "erroneous", ctx.erroneous_action);
  text = replace_slot(text, "observation", ctx.observation);
  return text;
}

inline std::string render_precondition_generator(const std::string& erroneous,
                                                 const std::string& reason) {
  std::string text = kPreconditionGenerator;
  text = replace_slot(text, "erroneous", erroneous);
  text = replace_slot(text, "reason", reason);
  return text;
}

inline std::string render_property_evaluator(const std::string& nl,
                                             const std::vector<std::string>& predicates,
                                             const std::vector<std::string>& functions) {
  std::string text = kPropertyEvaluator;
  text = replace_slot(text, "nl", nl);
  text = replace_slot(text, "predicates", join(predicates, ", "));
  text = replace_slot(text, "functions", join(functions, ", "));
  return text;
}

inline std::string render_translator_functions(const std::string& erroneous,
                                               const std::string& parameters,
                                               const std::string& correspondence,
                                               const std::vector<std::string>& functions,
                                               const std::string& nl) {
  std::string text = kTranslatorFunctions;
  text = replace_slot(text, "erroneous", erroneous);
  text = replace_slot(text, "parameters", parameters);
  text = replace_slot(text, "correspondence", correspondence);
  text = replace_slot(text, "functions", join(functions, ", "));
  text = replace_slot(text, "nl", nl);
  return text;
}

inline std::string render_translator_predicate(const std::string& erroneous,
                                               const std::string& parameters,
                                               const std::string& correspondence,
                                               const std::string& predicate,
                                               const std::string& nl) {
  std::string text = kTranslatorPredicate;
  text = replace_slot(text, "erroneous", erroneous);
  text = replace_slot(text, "parameters", parameters);
  text = replace_slot(text, "correspondence", correspondence);
  text = replace_slot(text, "predicate", predicate);
  text = replace_slot(text, "nl", nl);
  return text;
}

inline std::string render_translator_free(const std::string& erroneous,
                                          const std::string& parameters,
                                          const std::string& correspondence,
                                          const std::string& nl) {
  std::string text = kTranslatorFree;
  text = replace_slot(text, "erroneous", erroneous);
  text = replace_slot(text, "parameters", parameters);
  text = replace_slot(text, "correspondence", correspondence);
  text = replace_slot(text, "nl", nl);
  return text;
}

inline std::string render_object_expander(const std::string& task, const std::string& erroneous,
                                          const std::string& nl,
                                          const std::vector<std::string>& candidates) {
  std::string text = kObjectExpander;
  text = replace_slot(text, "task", task);
  text = replace_slot(text, "erroneous", erroneous);
  text = replace_slot(text, "nl", nl);
  text = replace_slot(text, "candidates", join(candidates, ", "));
  return text;
}

inline std::string render_property_matcher(const std::string& new_property,
                                           const std::vector<std::string>& candidates) {
  std::string text = kPropertyMatcher;
  text = replace_slot(text, "new", new_property);
  text = replace_slot(text, "candidates", join(candidates, ", "));
  return text;
}

/// "the robot, denoted as ?r; the object, denoted as ?obj; ..." from a
/// schema's typed parameter list.
inline std::string describe_parameters(const std::vector<TypedVar>& params) {
  std::vector<std::string> parts;
  for (const auto& p : params) parts.push_back("the " + p.type + ", denoted as " + p.name);
  return join(parts, "; ");
}

/// "the agent is ?r; the sandwich is ?obj; ..." from a binding.
inline std::string describe_correspondence(const std::vector<TypedVar>& params,
                                           const std::vector<std::string>& binding) {
  std::vector<std::string> parts;
  for (std::size_t i = 0; i < params.size() && i < binding.size(); ++i)
    parts.push_back("the " + binding[i] + " is " + params[i].name);
  return join(parts, "; ");
}

}  // namespace prompts
}  // namespace lasp
