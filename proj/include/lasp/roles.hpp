#pragma once

#include <array>
#include <cctype>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lasp/chat.hpp"
#include "lasp/prompts.hpp"

namespace lasp {

/// Reply that does not follow the role's declared output format. One retry
/// with a format reminder is attempted before this becomes fatal.
class ReplyFormatError : public std::runtime_error {
public:
  explicit ReplyFormatError(const std::string& message) : std::runtime_error(message) {}
};

struct ChatParams {
  std::string model = "gpt-4";
  double temperature = 0.0;
  std::optional<std::int64_t> seed;
};

struct ExpressibilityVerdict {
  bool expressible = false;
  enum class Witness { None, Predicate, FunctionPair };
  Witness witness = Witness::None;
  std::string predicate;                  // rendered candidate signature
  std::array<std::string, 2> functions;   // rendered candidate signatures
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  lines.push_back(cur);
  return lines;
}

/// Text after `label` on the first line that carries it, or nullopt.
inline std::optional<std::string> labeled_tail(const std::string& reply,
                                               const std::string& label) {
  for (const auto& raw : split_lines(reply)) {
    std::string line = trim(raw);
    if (line.rfind(label, 0) == 0) return trim(line.substr(label.size()));
  }
  return std::nullopt;
}

/// Name of the head symbol in a rendered signature or expression like
/// "(is-open ?rec - receptacle)".
inline std::string head_symbol(const std::string& rendered) {
  std::size_t open = rendered.find('(');
  if (open == std::string::npos) return "";
  std::size_t start = open + 1;
  std::size_t end = start;
  while (end < rendered.size() && rendered[end] != ' ' && rendered[end] != ')') ++end;
  return rendered.substr(start, end - start);
}

inline std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

inline std::string strip_final_period(std::string s) {
  while (!s.empty() && (s.back() == '.' || s.back() == ' ')) s.pop_back();
  return s;
}

inline std::string run_with_retry(ChatBackend& backend, ChatRequest request,
                                  const std::string& reminder,
                                  const std::function<void(const std::string&)>& parse) {
  std::string reply = backend.complete(request);
  try {
    parse(reply);
    return reply;
  } catch (const ReplyFormatError& first) {
    ChatRequest retry = request;
    retry.messages.back().content += "\n" + reminder;
    std::string second = backend.complete(retry);
    try {
      parse(second);
      return second;
    } catch (const ReplyFormatError& again) {
      throw BackendError(BackendError::Kind::BadReply,
                         std::string("role '") + request.role_tag +
                             "' reply unparseable after retry: " + again.what());
    }
  }
}

inline ChatRequest make_request(const std::string& role_tag, const std::string& prompt,
                                const ChatParams& params) {
  ChatRequest req;
  req.role_tag = role_tag;
  req.messages.push_back({"user", prompt});
  req.model = params.model;
  req.temperature = params.temperature;
  req.seed = params.seed;
  return req;
}

}  // namespace detail

inline std::vector<std::string> parse_reasons_reply(const std::string& reply) {
  std::vector<std::string> lines = detail::split_lines(reply);
  std::size_t start = 0;
  bool header = false;
  for (; start < lines.size(); ++start) {
    if (detail::trim(lines[start]).rfind("Possible reasons:", 0) == 0) {
      header = true;
      ++start;
      break;
    }
  }
  if (!header) throw ReplyFormatError("missing 'Possible reasons:' header");
  std::vector<std::string> reasons;
  for (; start < lines.size(); ++start) {
    std::string line = detail::trim(lines[start]);
    if (line.empty()) continue;
    std::size_t i = 0;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
    if (i == 0 || i >= line.size() || (line[i] != '.' && line[i] != ')')) break;
    std::string body = detail::trim(line.substr(i + 1));
    if (!body.empty()) reasons.push_back(body);
  }
  if (reasons.empty()) throw ReplyFormatError("no numbered reasons found");
  return reasons;
}

inline std::string parse_precondition_reply(const std::string& reply) {
  auto tail = detail::labeled_tail(reply, "Precondition:");
  if (!tail) throw ReplyFormatError("missing 'Precondition:' label");
  if (tail->empty()) throw ReplyFormatError("'Precondition:' with empty text");
  return *tail;
}

inline ExpressibilityVerdict parse_verdict_reply(const std::string& reply,
                                                 const std::vector<std::string>& predicates,
                                                 const std::vector<std::string>& functions) {
  ExpressibilityVerdict verdict;
  std::optional<std::string> answer;
  for (const auto& raw : detail::split_lines(reply)) {
    std::string line = detail::trim(raw);
    if (line.empty()) continue;
    answer = line;
    break;
  }
  if (!answer) throw ReplyFormatError("empty evaluator reply");
  std::string head = detail::lower(detail::strip_final_period(*answer));
  if (head.rfind("no", 0) == 0 && head.size() <= 3) {
    verdict.expressible = false;
    return verdict;
  }
  if (head.rfind("yes", 0) != 0) throw ReplyFormatError("evaluator reply must open with Yes or No");
  verdict.expressible = true;
  auto resolve = [](const std::string& rendered, const std::vector<std::string>& candidates,
                    const char* what) -> std::string {
    std::string name = detail::head_symbol(rendered);
    if (name.empty()) throw ReplyFormatError(std::string("unreadable ") + what + " witness");
    for (const auto& c : candidates)
      if (detail::head_symbol(c) == name) return c;
    throw ReplyFormatError("witness '" + name + "' is not among the " + what + " candidates");
  };
  if (auto pred = detail::labeled_tail(reply, "Suitable predicate:")) {
    verdict.witness = ExpressibilityVerdict::Witness::Predicate;
    verdict.predicate = resolve(*pred, predicates, "predicate");
    return verdict;
  }
  if (auto fns = detail::labeled_tail(reply, "Suitable functions:")) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while ((pos = fns->find('(', pos)) != std::string::npos) {
      std::size_t close = fns->find(')', pos);
      if (close == std::string::npos) break;
      parts.push_back(fns->substr(pos, close - pos + 1));
      pos = close + 1;
    }
    if (parts.size() != 2)
      throw ReplyFormatError("'Suitable functions:' must name exactly two functions");
    verdict.witness = ExpressibilityVerdict::Witness::FunctionPair;
    verdict.functions[0] = resolve(parts[0], functions, "function");
    verdict.functions[1] = resolve(parts[1], functions, "function");
    return verdict;
  }
  throw ReplyFormatError("Yes verdict without a 'Suitable predicate:'/'Suitable functions:' line");
}

inline std::string parse_pddl_expression_reply(const std::string& reply) {
  auto tail = detail::labeled_tail(reply, "PDDL expression:");
  if (!tail) throw ReplyFormatError("missing 'PDDL expression:' label");
  if (tail->empty()) throw ReplyFormatError("'PDDL expression:' with empty text");
  return *tail;
}

inline std::string parse_suitable_object_reply(const std::string& reply,
                                               const std::vector<std::string>& candidates) {
  auto tail = detail::labeled_tail(reply, "Suitable object:");
  if (!tail) throw ReplyFormatError("missing 'Suitable object:' label");
  std::string name = detail::lower(detail::strip_final_period(*tail));
  for (const auto& c : candidates)
    if (detail::lower(c) == name) return c;
  throw ReplyFormatError("object '" + name + "' is not among the candidates");
}

inline std::optional<std::string> parse_matching_property_reply(
    const std::string& reply, const std::vector<std::string>& candidates) {
  auto tail = detail::labeled_tail(reply, "Matching property:");
  if (!tail) throw ReplyFormatError("missing 'Matching property:' label");
  std::string name = detail::lower(detail::strip_final_period(*tail));
  if (name == "none") return std::nullopt;
  for (const auto& c : candidates)
    if (detail::lower(c) == name) return c;
  throw ReplyFormatError("property '" + name + "' is not among the candidates");
}

/// Role 1: cause analyzer. Returns the reasons in reply order.
inline std::vector<std::string> analyze_causes(const RoleContext& ctx, ChatBackend& backend,
                                               const ChatParams& params) {
  std::string prompt = prompts::render_cause_analyzer(ctx);
  std::vector<std::string> reasons;
  detail::run_with_retry(
      backend, detail::make_request("cause_analyzer", prompt, params),
      "Remember: the answer must follow this format:\nPossible reasons:\n1. reason1\n2. reason2",
      [&](const std::string& reply) { reasons = parse_reasons_reply(reply); });
  return reasons;
}

/// Role 2: action precondition generator.
inline std::string generate_precondition(const std::string& erroneous_action,
                                         const std::string& reason, ChatBackend& backend,
                                         const ChatParams& params) {
  std::string prompt = prompts::render_precondition_generator(erroneous_action, reason);
  std::string precondition;
  detail::run_with_retry(
      backend, detail::make_request("precondition_generator", prompt, params),
      "Remember: answer with a single line of the form:\nPrecondition: ...",
      [&](const std::string& reply) { precondition = parse_precondition_reply(reply); });
  return precondition;
}

/// Role 3: property completeness evaluator. Witnesses are resolved against
/// the candidate lists that were actually sent; anything else is a format
/// error.
inline ExpressibilityVerdict evaluate_expressibility(const std::string& nl_precondition,
                                                     const std::vector<std::string>& predicates,
                                                     const std::vector<std::string>& functions,
                                                     ChatBackend& backend,
                                                     const ChatParams& params) {
  std::string prompt = prompts::render_property_evaluator(nl_precondition, predicates, functions);
  ExpressibilityVerdict verdict;
  detail::run_with_retry(
      backend, detail::make_request("property_evaluator", prompt, params),
      "Remember: answer \"Yes\" or \"No\"; after \"Yes\" add one line \"Suitable predicate: ...\" "
      "or \"Suitable functions: ...\" drawn from the candidates.",
      [&](const std::string& reply) {
        verdict = parse_verdict_reply(reply, predicates, functions);
      });
  return verdict;
}

struct TranslationQuery {
  std::string erroneous_action;
  std::string parameters;
  std::string correspondence;
  std::string nl_precondition;
};

/// Role 4: NL-to-PDDL translator. The verdict picks the prompt variant:
/// a predicate witness constrains to the predicate grammar, a function
/// pair to the comparison grammar, and an inexpressible verdict frees the
/// translator to coin new names under either grammar.
inline std::string translate_to_pddl(const TranslationQuery& query,
                                     const ExpressibilityVerdict& verdict, ChatBackend& backend,
                                     const ChatParams& params) {
  std::string prompt;
  switch (verdict.witness) {
    case ExpressibilityVerdict::Witness::Predicate:
      prompt = prompts::render_translator_predicate(query.erroneous_action, query.parameters,
                                                    query.correspondence, verdict.predicate,
                                                    query.nl_precondition);
      break;
    case ExpressibilityVerdict::Witness::FunctionPair:
      prompt = prompts::render_translator_functions(
          query.erroneous_action, query.parameters, query.correspondence,
          {verdict.functions[0], verdict.functions[1]}, query.nl_precondition);
      break;
    case ExpressibilityVerdict::Witness::None:
      prompt = prompts::render_translator_free(query.erroneous_action, query.parameters,
                                               query.correspondence, query.nl_precondition);
      break;
  }
  std::string expression;
  detail::run_with_retry(
      backend, detail::make_request("nl_to_pddl_translator", prompt, params),
      "Remember: answer with a single line of the form:\nPDDL expression: ...",
      [&](const std::string& reply) { expression = parse_pddl_expression_reply(reply); });
  return expression;
}

/// Role 5: object expander. The reply must name one of the candidates;
/// matching is case-insensitive.
inline std::string expand_object(const std::string& task, const std::string& erroneous_action,
                                 const std::string& nl_precondition,
                                 const std::vector<std::string>& candidates, ChatBackend& backend,
                                 const ChatParams& params) {
  if (candidates.empty())
    throw std::logic_error("expand_object called with no candidate objects");
  std::string prompt =
      prompts::render_object_expander(task, erroneous_action, nl_precondition, candidates);
  std::string chosen;
  detail::run_with_retry(
      backend, detail::make_request("object_expander", prompt, params),
      "Remember: answer with a single line of the form:\nSuitable object: <object>\nwhere "
      "<object> is one of the candidate objects.",
      [&](const std::string& reply) { chosen = parse_suitable_object_reply(reply, candidates); });
  return chosen;
}

/// Semantic-similarity fallback when no environment property matches a new
/// property name deterministically.
inline std::optional<std::string> match_property(const std::string& new_property,
                                                 const std::vector<std::string>& candidates,
                                                 ChatBackend& backend, const ChatParams& params) {
  if (candidates.empty()) return std::nullopt;
  std::string prompt = prompts::render_property_matcher(new_property, candidates);
  std::optional<std::string> match;
  detail::run_with_retry(
      backend, detail::make_request("property_matcher", prompt, params),
      "Remember: answer with a single line of the form:\nMatching property: <property>\nor "
      "\"Matching property: none\".",
      [&](const std::string& reply) {
        match = parse_matching_property_reply(reply, candidates);
      });
  return match;
}

}  // namespace lasp
