#pragma once

// Arithmetic expressions for nonlinearities h(t, u, v) and weights g(s).
//
// Grammar (precedence climbing, no implicit multiplication):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right-associative
//   primary := number | constant | variable | func '(' args ')' | '(' expr ')'
//
// Functions: sin cos tan exp log sqrt abs (one argument), min max (two).
// Constants: pi, e.

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace rh::expr {

/// Variable set an expression is parsed against.
enum class Variables {
  State,   // t, u, v
  Weight,  // s
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, std::string message, std::vector<std::string> expected = {});

  std::size_t offset() const { return offset_; }
  const std::vector<std::string>& expected() const { return expected_; }
  const std::string& detail() const { return detail_; }

 private:
  std::size_t offset_;
  std::string detail_;
  std::vector<std::string> expected_;
};

/// Domain violation or non-finite intermediate during evaluation.
class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class BinaryOp { Add, Sub, Mul, Div, Pow };
enum class Function { Sin, Cos, Tan, Exp, Log, Sqrt, Abs, Min, Max };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  enum class Kind { Number, Variable, Negate, Binary, Call };
  Kind kind{Kind::Number};
  double number{0};
  int variable{0};  // 0 = t (or s), 1 = u, 2 = v
  BinaryOp op{BinaryOp::Add};
  Function fn{Function::Sin};
  std::vector<NodePtr> args;
};

/// Immutable expression tree; cheap to copy (shared structure).
class Expr {
 public:
  Expr() = default;
  Expr(NodePtr root, Variables vars) : root_(std::move(root)), vars_(vars) {}

  const NodePtr& root() const { return root_; }
  Variables variables() const { return vars_; }
  bool empty() const { return root_ == nullptr; }

 private:
  NodePtr root_;
  Variables vars_{Variables::State};
};

Expr parse(std::string_view source, Variables vars = Variables::State);

/// Evaluates at (t, u, v); weights read their variable from `t`.
double eval(const Expr& e, double t, double u = 0.0, double v = 0.0);

/// f(t, u, v) = h(t, u, v) + omega * v.
Expr shift_to_f(const Expr& h, double omega);

struct Interval {
  double lo{0};
  double hi{0};

  double width() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
  static Interval make(double lo, double hi);
};

/// f(t, clamp(u, u_range), clamp(v, v_range)): the constant extension of f
/// outside the box in u and v.
Expr clamp_extend(const Expr& f, Interval u_range, Interval v_range);

/// Fully parenthesised source text; numbers printed with 17 significant digits.
std::string to_string(const Expr& e);

bool structurally_equal(const Expr& a, const Expr& b);

/// True when the expression is the literal `value` (e.g. the default weight "1").
bool is_constant(const Expr& e, double value);

struct Box3 {
  Interval t, u, v;
  static Box3 make(Interval t, Interval u, Interval v);
};

struct BoxSearchOptions {
  int grid = 41;              // points per non-degenerate axis
  int starts = 8;             // best grid points polished by coordinate descent
  double step_tolerance = 1e-9;  // relative to max(1, axis width)
};

struct BoxExtremum {
  double value{0};
  Eigen::Vector3d point{Eigen::Vector3d::Zero()};  // (t, u, v)
  std::size_t evaluations{0};
};

/// Numerical sup / inf of f over a box: dense grid followed by
/// coordinate-descent polishing. Heuristic, not a rigorous bound.
BoxExtremum box_sup(const Expr& f, const Box3& box, const BoxSearchOptions& opts = {});
BoxExtremum box_inf(const Expr& f, const Box3& box, const BoxSearchOptions& opts = {});

}  // namespace rh::expr
