#include "robusteq/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace robusteq {

struct Expression::Node {
  enum class Kind { literal, variable, negate, add, sub, mul, div, pow };
  Kind kind;
  double value = 0.0;      // literal
  int var_index = 0;       // variable: k of xk
  int exponent = 0;        // pow
  std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make_literal(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::literal;
  n->value = v;
  return n;
}

NodePtr make_variable(int k) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::variable;
  n->var_index = k;
  return n;
}

NodePtr make_unary(NodePtr child) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::negate;
  n->lhs = std::move(child);
  return n;
}

NodePtr make_binary(Node::Kind kind, NodePtr lhs, NodePtr rhs) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

NodePtr make_pow(NodePtr base, int exponent) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::pow;
  n->lhs = std::move(base);
  n->exponent = exponent;
  return n;
}

struct Token {
  enum class Kind { number, variable, plus, minus, star, slash, caret, lparen, rparen, end };
  Kind kind;
  std::size_t offset;
  double value = 0.0;    // number
  int var_index = 0;     // variable
  bool integral = false; // number without '.' or exponent part
  long long int_value = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    std::size_t start = pos_;
    if (pos_ >= text_.size()) return {Token::Kind::end, start};
    char c = text_[pos_];
    switch (c) {
      case '+': ++pos_; return {Token::Kind::plus, start};
      case '-': ++pos_; return {Token::Kind::minus, start};
      case '*':
        if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '*')
          throw ParseError("'**' is not an operator; use '^'", start);
        ++pos_;
        return {Token::Kind::star, start};
      case '/': ++pos_; return {Token::Kind::slash, start};
      case '^': ++pos_; return {Token::Kind::caret, start};
      case '(': ++pos_; return {Token::Kind::lparen, start};
      case ')': ++pos_; return {Token::Kind::rparen, start};
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return lex_number(start);
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return lex_identifier(start);
    throw ParseError(std::string("unknown token '") + c + "'", start);
  }

 private:
  Token lex_number(std::size_t start) {
    std::size_t p = pos_;
    bool integral = true;
    while (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) ++p;
    if (p < text_.size() && text_[p] == '.') {
      integral = false;
      ++p;
      while (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) ++p;
    }
    if (p < text_.size() && (text_[p] == 'e' || text_[p] == 'E')) {
      std::size_t q = p + 1;
      if (q < text_.size() && (text_[q] == '+' || text_[q] == '-')) ++q;
      if (q < text_.size() && std::isdigit(static_cast<unsigned char>(text_[q]))) {
        integral = false;
        p = q;
        while (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) ++p;
      }
    }
    std::string lexeme(text_.substr(start, p - start));
    Token t{Token::Kind::number, start};
    t.value = std::strtod(lexeme.c_str(), nullptr);
    t.integral = integral;
    if (integral) {
      errno = 0;
      t.int_value = std::strtoll(lexeme.c_str(), nullptr, 10);
      if (errno == ERANGE) t.integral = false;
    }
    pos_ = p;
    return t;
  }

  Token lex_identifier(std::size_t start) {
    std::size_t p = pos_;
    while (p < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[p])) || text_[p] == '_'))
      ++p;
    std::string name(text_.substr(start, p - start));
    // Only x<k> with k >= 1 is a variable.
    bool ok = name.size() >= 2 && name[0] == 'x' && name[1] != '0';
    for (std::size_t i = 1; ok && i < name.size(); ++i)
      ok = std::isdigit(static_cast<unsigned char>(name[i])) != 0;
    if (!ok) throw ParseError("unknown variable '" + name + "'", start);
    long k = std::strtol(name.c_str() + 1, nullptr, 10);
    if (k <= 0 || k > 1000000) throw ParseError("variable index out of range in '" + name + "'", start);
    pos_ = p;
    Token t{Token::Kind::variable, start};
    t.var_index = static_cast<int>(k);
    return t;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lexer_(text) { advance(); }

  NodePtr parse() {
    NodePtr e = parse_expr();
    if (cur_.kind != Token::Kind::end) throw ParseError("unexpected token", cur_.offset);
    return e;
  }

 private:
  void advance() { cur_ = lexer_.next(); }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    while (cur_.kind == Token::Kind::plus || cur_.kind == Token::Kind::minus) {
      Node::Kind op = cur_.kind == Token::Kind::plus ? Node::Kind::add : Node::Kind::sub;
      advance();
      lhs = make_binary(op, std::move(lhs), parse_term());
    }
    return lhs;
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_factor();
    while (cur_.kind == Token::Kind::star || cur_.kind == Token::Kind::slash) {
      Node::Kind op = cur_.kind == Token::Kind::star ? Node::Kind::mul : Node::Kind::div;
      advance();
      lhs = make_binary(op, std::move(lhs), parse_factor());
    }
    return lhs;
  }

  NodePtr parse_factor() {
    if (cur_.kind == Token::Kind::minus) {
      advance();
      return make_unary(parse_factor());
    }
    NodePtr atom = parse_atom();
    if (cur_.kind == Token::Kind::caret) {
      advance();
      return make_pow(std::move(atom), parse_exponent());
    }
    return atom;
  }

  int parse_exponent() {
    bool negative = false;
    if (cur_.kind == Token::Kind::minus) {
      negative = true;
      advance();
    }
    if (cur_.kind != Token::Kind::number) throw ParseError("expected integer exponent", cur_.offset);
    if (!cur_.integral) throw ParseError("non-integer exponent", cur_.offset);
    long long v = cur_.int_value;
    if (v > 1000000) throw ParseError("exponent out of range", cur_.offset);
    advance();
    return static_cast<int>(negative ? -v : v);
  }

  NodePtr parse_atom() {
    switch (cur_.kind) {
      case Token::Kind::number: {
        double v = cur_.value;
        advance();
        return make_literal(v);
      }
      case Token::Kind::variable: {
        int k = cur_.var_index;
        advance();
        return make_variable(k);
      }
      case Token::Kind::lparen: {
        advance();
        NodePtr e = parse_expr();
        if (cur_.kind != Token::Kind::rparen) throw ParseError("expected ')'", cur_.offset);
        advance();
        return e;
      }
      default:
        throw ParseError("expected number, variable or '('", cur_.offset);
    }
  }

  Lexer lexer_;
  Token cur_{Token::Kind::end, 0};
};

double pow_int(double base, int exponent) {
  if (exponent < 0) {
    if (base == 0.0) throw EvalError("division by zero (negative exponent of zero)");
    return 1.0 / pow_int(base, -exponent);
  }
  double result = 1.0;
  double acc = base;
  unsigned n = static_cast<unsigned>(exponent);
  while (n != 0) {
    if (n & 1u) result *= acc;
    n >>= 1;
    if (n != 0) acc *= acc;
  }
  return result;
}

}  // namespace

struct Expression::Program {
  enum class Op : unsigned char { push_const, push_var, negate, add, sub, mul, div, pow };
  struct Ins {
    Op op;
    int arg = 0;       // variable slot or exponent
    double value = 0.0;
  };
  std::vector<Ins> code;
  int max_depth = 0;
};

namespace {

void emit(const Node& node, Expression::Program& prog, int depth, std::set<int>& free_indices) {
  using Op = Expression::Program::Op;
  if (depth > prog.max_depth) prog.max_depth = depth;
  switch (node.kind) {
    case Node::Kind::literal:
      prog.code.push_back({Op::push_const, 0, node.value});
      break;
    case Node::Kind::variable:
      free_indices.insert(node.var_index);
      prog.code.push_back({Op::push_var, node.var_index - 1, 0.0});
      break;
    case Node::Kind::negate:
      emit(*node.lhs, prog, depth, free_indices);
      prog.code.push_back({Op::negate});
      break;
    case Node::Kind::pow:
      emit(*node.lhs, prog, depth, free_indices);
      prog.code.push_back({Op::pow, node.exponent, 0.0});
      break;
    case Node::Kind::add:
    case Node::Kind::sub:
    case Node::Kind::mul:
    case Node::Kind::div: {
      emit(*node.lhs, prog, depth, free_indices);
      emit(*node.rhs, prog, depth + 1, free_indices);
      Op op = node.kind == Node::Kind::add   ? Op::add
              : node.kind == Node::Kind::sub ? Op::sub
              : node.kind == Node::Kind::mul ? Op::mul
                                             : Op::div;
      prog.code.push_back({op});
      break;
    }
  }
}

// Precedence levels used by the printer; mirrors the parser.
int precedence(const Node& n) {
  switch (n.kind) {
    case Node::Kind::add:
    case Node::Kind::sub: return 1;
    case Node::Kind::mul:
    case Node::Kind::div: return 2;
    case Node::Kind::negate: return 3;
    case Node::Kind::pow: return 4;
    default: return 5;
  }
}

void print_node(const Node& n, std::string& out);

void print_child(const Node& child, int min_prec, std::string& out) {
  if (precedence(child) < min_prec) {
    out += '(';
    print_node(child, out);
    out += ')';
  } else {
    print_node(child, out);
  }
}

void print_node(const Node& n, std::string& out) {
  char buf[40];
  switch (n.kind) {
    case Node::Kind::literal:
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      out += buf;
      break;
    case Node::Kind::variable:
      out += 'x';
      out += std::to_string(n.var_index);
      break;
    case Node::Kind::negate:
      out += '-';
      print_child(*n.lhs, 3, out);
      break;
    case Node::Kind::pow:
      print_child(*n.lhs, 5, out);
      out += '^';
      out += std::to_string(n.exponent);
      break;
    case Node::Kind::add:
      print_child(*n.lhs, 1, out);
      out += " + ";
      print_child(*n.rhs, 2, out);
      break;
    case Node::Kind::sub:
      print_child(*n.lhs, 1, out);
      out += " - ";
      print_child(*n.rhs, 2, out);
      break;
    case Node::Kind::mul:
      print_child(*n.lhs, 2, out);
      out += "*";
      print_child(*n.rhs, 3, out);
      break;
    case Node::Kind::div:
      print_child(*n.lhs, 2, out);
      out += "/";
      print_child(*n.rhs, 3, out);
      break;
  }
}

}  // namespace

Expression::Expression() : Expression(make_literal(0.0)) {}

Expression::Expression(std::shared_ptr<const Node> root) : root_(std::move(root)) {
  auto program = std::make_shared<Program>();
  auto free_indices = std::make_shared<std::set<int>>();
  std::set<int> indices;
  emit(*root_, *program, 1, indices);
  *free_indices = std::move(indices);
  program_ = std::move(program);
  free_indices_ = std::move(free_indices);
  max_index_ = free_indices_->empty() ? 0 : *free_indices_->rbegin();
}

Expression parse_expression(std::string_view text) {
  if (text.empty()) throw ParseError("empty expression", 0);
  Parser parser(text);
  return Expression(parser.parse());
}

double Expression::evaluate(std::span<const double> values) const {
  if (static_cast<int>(values.size()) < max_index_)
    throw EvalError("unbound variable x" + std::to_string(max_index_));
  double local[64];
  local[0] = 0.0;
  std::vector<double> heap;
  double* stack = local;
  if (program_->max_depth > 64) {
    heap.resize(static_cast<std::size_t>(program_->max_depth));
    stack = heap.data();
  }
  int sp = 0;
  using Op = Program::Op;
  for (const Program::Ins& ins : program_->code) {
    switch (ins.op) {
      case Op::push_const: stack[sp++] = ins.value; break;
      case Op::push_var: stack[sp++] = values[static_cast<std::size_t>(ins.arg)]; break;
      case Op::negate: stack[sp - 1] = -stack[sp - 1]; break;
      case Op::pow: stack[sp - 1] = pow_int(stack[sp - 1], ins.arg); break;
      case Op::add: --sp; stack[sp - 1] += stack[sp]; break;
      case Op::sub: --sp; stack[sp - 1] -= stack[sp]; break;
      case Op::mul: --sp; stack[sp - 1] *= stack[sp]; break;
      case Op::div:
        --sp;
        if (stack[sp] == 0.0) throw EvalError("division by zero");
        stack[sp - 1] /= stack[sp];
        break;
    }
  }
  double result = stack[0];
  if (!std::isfinite(result)) throw EvalError("non-finite result");
  return result;
}

double Expression::evaluate(const std::map<std::string, double>& bindings) const {
  std::vector<double> values(static_cast<std::size_t>(max_index_), 0.0);
  for (int k : *free_indices_) {
    auto it = bindings.find("x" + std::to_string(k));
    if (it == bindings.end()) throw EvalError("unbound variable x" + std::to_string(k));
    values[static_cast<std::size_t>(k - 1)] = it->second;
  }
  return evaluate(values);
}

std::set<std::string> Expression::free_variables() const {
  std::set<std::string> names;
  for (int k : *free_indices_) names.insert("x" + std::to_string(k));
  return names;
}

std::string Expression::to_string() const {
  std::string out;
  print_node(*root_, out);
  return out;
}

}  // namespace robusteq
