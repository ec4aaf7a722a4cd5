/*
 * expr.cc
 *
 * recursive descent parser and tree-walking evaluator
 *
 *   expr    := term (('+' | '-') term)*
 *   term    := unary (('*' | '/') unary)*
 *   unary   := '-' unary | power
 *   power   := primary ('^' unary)?
 *   primary := number | ident | func '(' expr ')' | 'delay' '(' ident ',' number ')'
 *            | '(' expr ')'
 */

#include "symctl/expr.hh"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>

namespace symctl::expr {

ParseError::ParseError(std::size_t position, const std::string& message)
    : Error("parse error at " + std::to_string(position) + ": " + message),
      position_(position) {}

namespace {

struct Token {
  enum Kind { Number, Ident, Symbol, End } kind;
  std::string text;
  double number = 0.0;
  std::size_t pos = 0;
};

class Lexer {
public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

private:
  void advance() {
    while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_])))
      ++i_;
    tok_ = Token{Token::End, "", 0.0, i_};
    if (i_ >= src_.size())
      return;
    char c = src_[i_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::string buf(src_.substr(i_));
      char* end = nullptr;
      double v = std::strtod(buf.c_str(), &end);
      std::size_t len = static_cast<std::size_t>(end - buf.c_str());
      if (len == 0)
        throw ParseError(i_, "malformed number");
      tok_ = Token{Token::Number, std::string(src_.substr(i_, len)), v, i_};
      i_ += len;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i_;
      while (j < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[j])) || src_[j] == '_'))
        ++j;
      tok_ = Token{Token::Ident, std::string(src_.substr(i_, j - i_)), 0.0, i_};
      i_ = j;
      return;
    }
    static constexpr std::string_view symbols = "+-*/^(),";
    if (symbols.find(c) == std::string_view::npos)
      throw ParseError(i_, std::string("unexpected character '") + c + "'");
    tok_ = Token{Token::Symbol, std::string(1, c), 0.0, i_};
    ++i_;
  }

  std::string_view src_;
  std::size_t i_ = 0;
  Token tok_;
};

bool is_symbol(const Token& t, char c) {
  return t.kind == Token::Symbol && t.text[0] == c;
}

/* x3 -> 2, u1 -> 0; returns false for anything that is not a variable */
bool variable_index(const std::string& name, char prefix, std::size_t& index) {
  if (name.size() < 2 || name[0] != prefix)
    return false;
  if (!std::all_of(name.begin() + 1, name.end(),
                   [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
    return false;
  if (name[1] == '0')
    return false;
  index = std::stoul(name.substr(1)) - 1;
  return true;
}

} // namespace

class Parser {
public:
  Parser(std::string_view src, std::size_t n, std::size_t m) : lex_(src), n_(n), m_(m) {}

  Expression run() {
    int root = expr();
    if (lex_.peek().kind != Token::End)
      throw ParseError(lex_.peek().pos, "unexpected trailing '" + lex_.peek().text + "'");
    out_.root_ = root;
    return std::move(out_);
  }

private:
  int add(Expression::Node node) {
    out_.nodes_.push_back(node);
    return static_cast<int>(out_.nodes_.size()) - 1;
  }

  int binary(Op op, int lhs, int rhs) {
    Expression::Node node;
    node.op = op;
    node.lhs = lhs;
    node.rhs = rhs;
    return add(node);
  }

  int expr() {
    int lhs = term();
    while (is_symbol(lex_.peek(), '+') || is_symbol(lex_.peek(), '-')) {
      Op op = lex_.take().text[0] == '+' ? Op::Add : Op::Sub;
      lhs = binary(op, lhs, term());
    }
    return lhs;
  }

  int term() {
    int lhs = unary();
    while (is_symbol(lex_.peek(), '*') || is_symbol(lex_.peek(), '/')) {
      Token t = lex_.take();
      int rhs = unary();
      const auto& r = out_.nodes_[rhs];
      if (t.text[0] == '/' && r.op == Op::Constant && r.value == 0.0)
        throw ParseError(t.pos, "division by constant zero");
      lhs = binary(t.text[0] == '*' ? Op::Mul : Op::Div, lhs, rhs);
    }
    return lhs;
  }

  int unary() {
    if (is_symbol(lex_.peek(), '-')) {
      lex_.take();
      Expression::Node node;
      node.op = Op::Neg;
      node.lhs = unary();
      return add(node);
    }
    return power();
  }

  int power() {
    int base = primary();
    if (is_symbol(lex_.peek(), '^')) {
      lex_.take();
      return binary(Op::Pow, base, unary());
    }
    return base;
  }

  void expect(char c) {
    if (!is_symbol(lex_.peek(), c))
      throw ParseError(lex_.peek().pos, std::string("expected '") + c + "'");
    lex_.take();
  }

  int primary() {
    Token t = lex_.take();
    if (t.kind == Token::Number) {
      Expression::Node node;
      node.op = Op::Constant;
      node.value = t.number;
      return add(node);
    }
    if (is_symbol(t, '(')) {
      int inner = expr();
      expect(')');
      return inner;
    }
    if (t.kind != Token::Ident)
      throw ParseError(t.pos, t.kind == Token::End ? "unexpected end of input"
                                                   : "unexpected '" + t.text + "'");

    std::size_t idx = 0;
    if (variable_index(t.text, 'x', idx)) {
      if (idx >= n_)
        throw ParseError(t.pos, "state variable " + t.text + " exceeds n=" + std::to_string(n_));
      Expression::Node node;
      node.op = Op::State;
      node.index = idx;
      return add(node);
    }
    if (variable_index(t.text, 'u', idx)) {
      if (idx >= m_)
        throw ParseError(t.pos, "input variable " + t.text + " exceeds m=" + std::to_string(m_));
      Expression::Node node;
      node.op = Op::Input;
      node.index = idx;
      return add(node);
    }
    if (t.text == "delay")
      return delay(t);

    static const std::pair<const char*, Op> functions[] = {
        {"sin", Op::Sin}, {"cos", Op::Cos}, {"tan", Op::Tan},
        {"exp", Op::Exp}, {"abs", Op::Abs}, {"sqrt", Op::Sqrt}};
    for (const auto& [name, op] : functions) {
      if (t.text == name) {
        expect('(');
        Expression::Node node;
        node.op = op;
        node.lhs = expr();
        expect(')');
        return add(node);
      }
    }
    throw ParseError(t.pos, "unknown identifier '" + t.text + "'");
  }

  int delay(const Token& at) {
    expect('(');
    Token var = lex_.take();
    std::size_t idx = 0;
    if (var.kind != Token::Ident || !variable_index(var.text, 'x', idx))
      throw ParseError(var.pos, "delay expects a state variable");
    if (idx >= n_)
      throw ParseError(var.pos, "state variable " + var.text + " exceeds n=" + std::to_string(n_));
    expect(',');
    bool negative = false;
    if (is_symbol(lex_.peek(), '-')) {
      negative = true;
      lex_.take();
    }
    Token theta = lex_.take();
    if (theta.kind != Token::Number)
      throw ParseError(theta.pos, "delay argument must be a literal constant");
    if (negative && theta.number != 0.0)
      throw ParseError(theta.pos, "delay argument must be nonnegative");
    expect(')');
    (void)at;
    Expression::Node node;
    node.op = Op::Delayed;
    node.index = idx;
    node.value = theta.number;
    return add(node);
  }

  Lexer lex_;
  std::size_t n_;
  std::size_t m_;
  Expression out_;
};

Expression parse(std::string_view source, std::size_t n, std::size_t m) {
  return Parser(source, n, m).run();
}

double Expression::evaluate(std::span<const double> x, std::span<const double> u,
                            const History* history) const {
  std::function<double(int)> eval = [&](int i) -> double {
    const Node& node = nodes_[i];
    switch (node.op) {
    case Op::Constant:
      return node.value;
    case Op::State:
      return x[node.index];
    case Op::Input:
      return u[node.index];
    case Op::Delayed:
      if (!history)
        throw Error("expression references delay(x" + std::to_string(node.index + 1) +
                    ", ...) but no history was supplied");
      return history->value(node.index, node.value);
    case Op::Neg:
      return -eval(node.lhs);
    case Op::Sin:
      return std::sin(eval(node.lhs));
    case Op::Cos:
      return std::cos(eval(node.lhs));
    case Op::Tan:
      return std::tan(eval(node.lhs));
    case Op::Exp:
      return std::exp(eval(node.lhs));
    case Op::Abs:
      return std::fabs(eval(node.lhs));
    case Op::Sqrt:
      return std::sqrt(eval(node.lhs));
    case Op::Add:
      return eval(node.lhs) + eval(node.rhs);
    case Op::Sub:
      return eval(node.lhs) - eval(node.rhs);
    case Op::Mul:
      return eval(node.lhs) * eval(node.rhs);
    case Op::Div:
      return eval(node.lhs) / eval(node.rhs);
    case Op::Pow:
      return std::pow(eval(node.lhs), eval(node.rhs));
    }
    return 0.0;
  };
  if (root_ < 0)
    throw Error("evaluating an empty expression");
  return eval(root_);
}

bool Expression::has_delay() const {
  return std::any_of(nodes_.begin(), nodes_.end(),
                     [](const Node& n) { return n.op == Op::Delayed; });
}

std::vector<DelayTerm> Expression::delay_terms() const {
  std::vector<DelayTerm> out;
  for (const auto& n : nodes_)
    if (n.op == Op::Delayed)
      out.push_back({n.index, n.value});
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double Expression::max_delay() const {
  double m = 0.0;
  for (const auto& n : nodes_)
    if (n.op == Op::Delayed)
      m = std::max(m, n.value);
  return m;
}

namespace {

std::string number_text(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* function_name(Op op) {
  switch (op) {
  case Op::Sin: return "sin";
  case Op::Cos: return "cos";
  case Op::Tan: return "tan";
  case Op::Exp: return "exp";
  case Op::Abs: return "abs";
  case Op::Sqrt: return "sqrt";
  default: return nullptr;
  }
}

char binary_symbol(Op op) {
  switch (op) {
  case Op::Add: return '+';
  case Op::Sub: return '-';
  case Op::Mul: return '*';
  case Op::Div: return '/';
  case Op::Pow: return '^';
  default: return '?';
  }
}

} // namespace

std::string Expression::to_string() const {
  std::function<std::string(int)> print = [&](int i) -> std::string {
    const Node& node = nodes_[i];
    switch (node.op) {
    case Op::Constant:
      return node.value < 0 ? "(" + number_text(node.value) + ")" : number_text(node.value);
    case Op::State:
      return "x" + std::to_string(node.index + 1);
    case Op::Input:
      return "u" + std::to_string(node.index + 1);
    case Op::Delayed:
      return "delay(x" + std::to_string(node.index + 1) + ", " + number_text(node.value) + ")";
    case Op::Neg:
      return "(-" + print(node.lhs) + ")";
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
    case Op::Pow:
      return "(" + print(node.lhs) + " " + binary_symbol(node.op) + " " + print(node.rhs) + ")";
    default:
      return std::string(function_name(node.op)) + "(" + print(node.lhs) + ")";
    }
  };
  return root_ < 0 ? std::string() : print(root_);
}

bool Expression::structurally_equal(const Expression& other) const {
  std::function<bool(int, int)> same = [&](int a, int b) -> bool {
    if ((a < 0) != (b < 0))
      return false;
    if (a < 0)
      return true;
    const Node& p = nodes_[a];
    const Node& q = other.nodes_[b];
    if (p.op != q.op)
      return false;
    switch (p.op) {
    case Op::Constant:
      return p.value == q.value;
    case Op::State:
    case Op::Input:
      return p.index == q.index;
    case Op::Delayed:
      return p.index == q.index && p.value == q.value;
    default:
      return same(p.lhs, q.lhs) && same(p.rhs, q.rhs);
    }
  };
  return same(root_, other.root_);
}

} // namespace symctl::expr
