/*
 * expr.hh
 *
 * Vector-field expressions over x1..xn, u1..um and point delays
 * delay(xi, theta). Parsed once, immutable afterwards.
 */

#ifndef SYMCTL_EXPR_HH_
#define SYMCTL_EXPR_HH_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "symctl/types.hh"

namespace symctl::expr {

enum class Op : std::uint8_t {
  Constant,
  State,
  Input,
  Delayed,
  Neg,
  Sin,
  Cos,
  Tan,
  Exp,
  Abs,
  Sqrt,
  Add,
  Sub,
  Mul,
  Div,
  Pow,
};

class ParseError : public Error {
public:
  ParseError(std::size_t position, const std::string& message);
  std::size_t position() const { return position_; }

private:
  std::size_t position_;
};

/* a delayed reference delay(x_{var+1}, theta) */
struct DelayTerm {
  std::size_t var;
  double theta;
  bool operator==(const DelayTerm&) const = default;
  auto operator<=>(const DelayTerm&) const = default;
};

/*
 * class: History
 *
 * lookup of past state values; value(var, theta) returns x_var(t - theta)
 * relative to the evaluation instant t
 */
class History {
public:
  virtual ~History() = default;
  virtual double value(std::size_t var, double theta) const = 0;
};

class Expression {
public:
  struct Node {
    Op op = Op::Constant;
    double value = 0.0;    // constant value or delay theta
    std::size_t index = 0; // 0-based variable index
    int lhs = -1;
    int rhs = -1;
  };

  Expression() = default;

  double evaluate(std::span<const double> x, std::span<const double> u,
                  const History* history = nullptr) const;

  bool has_delay() const;
  std::vector<DelayTerm> delay_terms() const;
  double max_delay() const;

  /* fully parenthesised, parse(to_string()) reproduces the same tree */
  std::string to_string() const;

  bool structurally_equal(const Expression& other) const;

  const std::vector<Node>& nodes() const { return nodes_; }
  int root() const { return root_; }

private:
  friend class Parser;
  std::vector<Node> nodes_;
  int root_ = -1;
};

/*
 * parse an infix expression; n and m bound the admissible variable indices.
 * Throws ParseError with the byte offset of the offending token.
 */
Expression parse(std::string_view source, std::size_t n, std::size_t m);

} // namespace symctl::expr

#endif
