#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace robusteq {

// Syntax failure, with the byte offset of the offending token.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t offset)
      : std::runtime_error(msg + " (offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Runtime evaluation failure: unbound variable, division by zero, non-finite result.
class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parsed arithmetic expression over variables x1, x2, ...
// Immutable after parsing; evaluation is pure, so instances can be shared
// and evaluated concurrently without synchronization.
class Expression {
 public:
  Expression();  // the literal 0

  // Evaluates with named bindings; every free variable must be bound.
  double evaluate(const std::map<std::string, double>& bindings) const;

  // Fast path: variable xk reads values[k-1]. values.size() must be
  // at least max_variable_index().
  double evaluate(std::span<const double> values) const;

  std::set<std::string> free_variables() const;
  const std::set<int>& free_variable_indices() const { return *free_indices_; }

  // Largest k over the free variables xk (0 when the expression is closed).
  int max_variable_index() const { return max_index_; }

  // Prints with minimal parentheses; re-parsing yields an expression that
  // evaluates identically.
  std::string to_string() const;

  struct Node;     // parse tree (defined in expr.cpp)
  struct Program;  // flat evaluation program (defined in expr.cpp)

 private:
  friend Expression parse_expression(std::string_view text);

  explicit Expression(std::shared_ptr<const Node> root);

  std::shared_ptr<const Node> root_;
  std::shared_ptr<const Program> program_;
  std::shared_ptr<const std::set<int>> free_indices_;
  int max_index_ = 0;
};

// Grammar:
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-' factor | atom ('^' int)?
//   atom   := number | var | '(' expr ')'
// '+','-','*','/' associate left; '^' takes a literal integer exponent and
// binds tighter than unary minus.
Expression parse_expression(std::string_view text);

}  // namespace robusteq
