#pragma once

#include <cctype>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace lasp {

/// Parse failure with 1-based source position.
class ParseError : public std::runtime_error {
public:
  ParseError(std::string message, int line, int column)
      : std::runtime_error(message + " (line " + std::to_string(line) + ", column " +
                           std::to_string(column) + ")"),
        line_(line),
        column_(column) {}

  [[nodiscard]] int line() const { return line_; }
  [[nodiscard]] int column() const { return column_; }

private:
  int line_;
  int column_;
};

/// S-expression node: either an atom token or a list of children.
struct SExpr {
  bool is_atom = false;
  std::string token;            // valid when is_atom
  std::vector<SExpr> children;  // valid when !is_atom
  int line = 0;
  int column = 0;

  [[nodiscard]] const std::string& head() const {
    static const std::string kEmpty;
    if (is_atom || children.empty() || !children.front().is_atom) return kEmpty;
    return children.front().token;
  }
};

/// Tokenizer + reader for the PDDL subset. Identifiers are normalized to
/// lower case (PDDL is case-insensitive); ';' comments run to end of line.
class SExprReader {
public:
  explicit SExprReader(std::string text) : text_(std::move(text)) {}

  SExpr read() {
    skip_trivia();
    SExpr e = read_expr();
    return e;
  }

  /// Reads all top-level expressions and requires nothing but trivia after.
  std::vector<SExpr> read_all() {
    std::vector<SExpr> out;
    skip_trivia();
    while (pos_ < text_.size()) {
      out.push_back(read_expr());
      skip_trivia();
    }
    return out;
  }

  [[nodiscard]] bool at_end() {
    skip_trivia();
    return pos_ >= text_.size();
  }

private:
  SExpr read_expr() {
    skip_trivia();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", line_, column_);
    if (text_[pos_] == '(') {
      SExpr list;
      list.line = line_;
      list.column = column_;
      advance();
      skip_trivia();
      while (pos_ < text_.size() && text_[pos_] != ')') {
        list.children.push_back(read_expr());
        skip_trivia();
      }
      if (pos_ >= text_.size())
        throw ParseError("unbalanced parentheses: missing ')'", list.line, list.column);
      advance();  // consume ')'
      return list;
    }
    if (text_[pos_] == ')') throw ParseError("unexpected ')'", line_, column_);
    SExpr atom;
    atom.is_atom = true;
    atom.line = line_;
    atom.column = column_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
           text_[pos_] != '(' && text_[pos_] != ')' && text_[pos_] != ';') {
      char c = text_[pos_];
      atom.token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      advance();
    }
    if (atom.token.empty()) throw ParseError("empty token", line_, column_);
    return atom;
  }

  void skip_trivia() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  std::string text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

}  // namespace lasp
