#include "rh/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <utility>

namespace rh::expr {

namespace {

std::string format_parse_error(std::size_t offset, const std::string& message,
                               const std::vector<std::string>& expected) {
  std::ostringstream os;
  os << "offset " << offset << ": " << message;
  if (!expected.empty()) {
    os << " (expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) os << (i ? ", " : "") << expected[i];
    os << ")";
  }
  return os.str();
}

enum class TokKind { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
  TokKind kind{TokKind::End};
  std::size_t offset{0};
  std::string_view text;
  double number{0};
};

std::string describe(const Token& t) {
  if (t.kind == TokKind::End) return "end of input";
  return "'" + std::string(t.text) + "'";
}

struct FunctionInfo {
  std::string_view name;
  Function fn;
  int arity;
};

constexpr std::array<FunctionInfo, 9> kFunctions{{
    {"sin", Function::Sin, 1},
    {"cos", Function::Cos, 1},
    {"tan", Function::Tan, 1},
    {"exp", Function::Exp, 1},
    {"log", Function::Log, 1},
    {"sqrt", Function::Sqrt, 1},
    {"abs", Function::Abs, 1},
    {"min", Function::Min, 2},
    {"max", Function::Max, 2},
}};

std::string_view function_name(Function fn) {
  for (const auto& f : kFunctions)
    if (f.fn == fn) return f.name;
  return "?";
}

std::string_view variable_name(int index, Variables vars) {
  if (vars == Variables::Weight) return "s";
  static constexpr std::array<std::string_view, 3> names{"t", "u", "v"};
  return names[static_cast<std::size_t>(index)];
}

NodePtr make_number(double x) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Number;
  n->number = x;
  return n;
}

NodePtr make_variable(int index) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Variable;
  n->variable = index;
  return n;
}

NodePtr make_negate(NodePtr x) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Negate;
  n->args = {std::move(x)};
  return n;
}

NodePtr make_binary(BinaryOp op, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Binary;
  n->op = op;
  n->args = {std::move(a), std::move(b)};
  return n;
}

NodePtr make_call(Function fn, std::vector<NodePtr> args) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Call;
  n->fn = fn;
  n->args = std::move(args);
  return n;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    Token tok;
    tok.offset = pos_;
    if (pos_ >= src_.size()) return tok;
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return lex_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos_;
      while (end < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_')) ++end;
      tok.kind = TokKind::Ident;
      tok.text = src_.substr(pos_, end - pos_);
      pos_ = end;
      return tok;
    }
    tok.text = src_.substr(pos_, 1);
    switch (c) {
      case '+': tok.kind = TokKind::Plus; break;
      case '-': tok.kind = TokKind::Minus; break;
      case '*': tok.kind = TokKind::Star; break;
      case '/': tok.kind = TokKind::Slash; break;
      case '^': tok.kind = TokKind::Caret; break;
      case '(': tok.kind = TokKind::LParen; break;
      case ')': tok.kind = TokKind::RParen; break;
      case ',': tok.kind = TokKind::Comma; break;
      default:
        throw ParseError(pos_, "unexpected character '" + std::string(1, c) + "'");
    }
    ++pos_;
    return tok;
  }

 private:
  Token lex_number() {
    const std::size_t start = pos_;
    std::size_t end = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) ++end, ++n;
      return n;
    };
    std::size_t mantissa = digits();
    if (end < src_.size() && src_[end] == '.') {
      ++end;
      mantissa += digits();
    }
    if (mantissa == 0) throw ParseError(start, "malformed number", {"digit"});
    // Exponent only when digits follow; otherwise 'e' starts the next token.
    if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
      std::size_t probe = end + 1;
      if (probe < src_.size() && (src_[probe] == '+' || src_[probe] == '-')) ++probe;
      if (probe < src_.size() && std::isdigit(static_cast<unsigned char>(src_[probe]))) {
        end = probe;
        digits();
      }
    }
    Token tok;
    tok.kind = TokKind::Number;
    tok.offset = start;
    tok.text = src_.substr(start, end - start);
    const auto res = std::from_chars(src_.data() + start, src_.data() + end, tok.number);
    if (res.ec != std::errc{} || !std::isfinite(tok.number))
      throw ParseError(start, "number out of range");
    pos_ = end;
    return tok;
  }

  std::string_view src_;
  std::size_t pos_{0};
};

class Parser {
 public:
  Parser(std::string_view src, Variables vars) : lexer_(src), vars_(vars) { advance(); }

  NodePtr parse_all() {
    NodePtr root = parse_expr();
    if (cur_.kind != TokKind::End)
      throw ParseError(cur_.offset, "unexpected " + describe(cur_), {"operator", "end of input"});
    return root;
  }

 private:
  void advance() { cur_ = lexer_.next(); }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    while (cur_.kind == TokKind::Plus || cur_.kind == TokKind::Minus) {
      const BinaryOp op = cur_.kind == TokKind::Plus ? BinaryOp::Add : BinaryOp::Sub;
      advance();
      lhs = make_binary(op, lhs, parse_term());
    }
    return lhs;
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    while (cur_.kind == TokKind::Star || cur_.kind == TokKind::Slash) {
      const BinaryOp op = cur_.kind == TokKind::Star ? BinaryOp::Mul : BinaryOp::Div;
      advance();
      lhs = make_binary(op, lhs, parse_unary());
    }
    return lhs;
  }

  NodePtr parse_unary() {
    if (cur_.kind == TokKind::Minus) {
      advance();
      return make_negate(parse_unary());
    }
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    if (cur_.kind == TokKind::Caret) {
      advance();
      return make_binary(BinaryOp::Pow, base, parse_unary());
    }
    return base;
  }

  NodePtr parse_primary() {
    const Token tok = cur_;
    switch (tok.kind) {
      case TokKind::Number:
        advance();
        return make_number(tok.number);
      case TokKind::LParen: {
        advance();
        NodePtr inner = parse_expr();
        expect(TokKind::RParen, "')'");
        return inner;
      }
      case TokKind::Ident:
        advance();
        return parse_identifier(tok);
      default:
        throw ParseError(tok.offset, "unexpected " + describe(tok), {"number", "identifier", "'('", "'-'"});
    }
  }

  NodePtr parse_identifier(const Token& tok) {
    const std::string_view name = tok.text;
    for (const auto& f : kFunctions) {
      if (f.name != name) continue;
      if (cur_.kind != TokKind::LParen)
        throw ParseError(cur_.offset, "function '" + std::string(name) + "' requires an argument list", {"'('"});
      advance();
      std::vector<NodePtr> args{parse_expr()};
      while (cur_.kind == TokKind::Comma) {
        advance();
        args.push_back(parse_expr());
      }
      expect(TokKind::RParen, "')'");
      if (static_cast<int>(args.size()) != f.arity)
        throw ParseError(tok.offset, "function '" + std::string(name) + "' takes " + std::to_string(f.arity) +
                                         " argument(s), got " + std::to_string(args.size()));
      return make_call(f.fn, std::move(args));
    }
    if (name == "pi") return make_number(std::numbers::pi);
    if (name == "e") return make_number(std::numbers::e);
    if (vars_ == Variables::Weight) {
      if (name == "s") return make_variable(0);
    } else {
      if (name == "t") return make_variable(0);
      if (name == "u") return make_variable(1);
      if (name == "v") return make_variable(2);
    }
    const std::vector<std::string> allowed = vars_ == Variables::Weight
                                                 ? std::vector<std::string>{"s", "pi", "e", "function"}
                                                 : std::vector<std::string>{"t", "u", "v", "pi", "e", "function"};
    throw ParseError(tok.offset, "unknown identifier '" + std::string(name) + "'", allowed);
  }

  void expect(TokKind kind, const char* what) {
    if (cur_.kind != kind) throw ParseError(cur_.offset, "unexpected " + describe(cur_), {what});
    advance();
  }

  Lexer lexer_;
  Variables vars_;
  Token cur_;
};

double checked(double x, const char* what) {
  if (!std::isfinite(x)) throw EvalError(std::string("non-finite result in ") + what);
  return x;
}

double eval_node(const Node& n, const std::array<double, 3>& x) {
  switch (n.kind) {
    case Node::Kind::Number: return n.number;
    case Node::Kind::Variable: return x[static_cast<std::size_t>(n.variable)];
    case Node::Kind::Negate: return -eval_node(*n.args[0], x);
    case Node::Kind::Binary: {
      const double a = eval_node(*n.args[0], x);
      const double b = eval_node(*n.args[1], x);
      switch (n.op) {
        case BinaryOp::Add: return checked(a + b, "'+'");
        case BinaryOp::Sub: return checked(a - b, "'-'");
        case BinaryOp::Mul: return checked(a * b, "'*'");
        case BinaryOp::Div:
          if (b == 0.0) throw EvalError("division by zero");
          return checked(a / b, "'/'");
        case BinaryOp::Pow:
          if (a == 0.0 && b < 0.0) throw EvalError("zero raised to a negative power");
          return checked(std::pow(a, b), "'^'");
      }
      break;
    }
    case Node::Kind::Call: {
      const double a = eval_node(*n.args[0], x);
      switch (n.fn) {
        case Function::Sin: return checked(std::sin(a), "sin");
        case Function::Cos: return checked(std::cos(a), "cos");
        case Function::Tan: return checked(std::tan(a), "tan");
        case Function::Exp: return checked(std::exp(a), "exp");
        case Function::Log:
          if (!(a > 0.0)) throw EvalError("log of non-positive argument");
          return std::log(a);
        case Function::Sqrt:
          if (a < 0.0) throw EvalError("sqrt of negative argument");
          return std::sqrt(a);
        case Function::Abs: return std::abs(a);
        case Function::Min: return std::min(a, eval_node(*n.args[1], x));
        case Function::Max: return std::max(a, eval_node(*n.args[1], x));
      }
      break;
    }
  }
  throw EvalError("corrupt expression node");
}

void print_node(const Node& n, Variables vars, std::string& out) {
  switch (n.kind) {
    case Node::Kind::Number: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", std::abs(n.number));
      if (std::signbit(n.number)) out += "(-" + std::string(buf) + ")";
      else out += buf;
      return;
    }
    case Node::Kind::Variable: out += variable_name(n.variable, vars); return;
    case Node::Kind::Negate:
      out += "(-";
      print_node(*n.args[0], vars, out);
      out += ")";
      return;
    case Node::Kind::Binary: {
      static constexpr std::array<const char*, 5> sym{" + ", " - ", " * ", " / ", "^"};
      out += "(";
      print_node(*n.args[0], vars, out);
      out += sym[static_cast<std::size_t>(n.op)];
      print_node(*n.args[1], vars, out);
      out += ")";
      return;
    }
    case Node::Kind::Call:
      out += function_name(n.fn);
      out += "(";
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) out += ", ";
        print_node(*n.args[i], vars, out);
      }
      out += ")";
      return;
  }
}

bool nodes_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
  switch (a.kind) {
    case Node::Kind::Number:
      if (a.number != b.number) return false;
      break;
    case Node::Kind::Variable:
      if (a.variable != b.variable) return false;
      break;
    case Node::Kind::Binary:
      if (a.op != b.op) return false;
      break;
    case Node::Kind::Call:
      if (a.fn != b.fn) return false;
      break;
    case Node::Kind::Negate: break;
  }
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!nodes_equal(*a.args[i], *b.args[i])) return false;
  return true;
}

NodePtr substitute(const NodePtr& n, const std::array<NodePtr, 3>& repl) {
  if (n->kind == Node::Kind::Variable) {
    const auto& r = repl[static_cast<std::size_t>(n->variable)];
    return r ? r : n;
  }
  if (n->args.empty()) return n;
  auto copy = std::make_shared<Node>(*n);
  for (auto& a : copy->args) a = substitute(a, repl);
  return copy;
}

NodePtr clamp_node(int var, Interval r) {
  return make_call(Function::Min,
                   {make_call(Function::Max, {make_variable(var), make_number(r.lo)}), make_number(r.hi)});
}

}  // namespace

ParseError::ParseError(std::size_t offset, std::string message, std::vector<std::string> expected)
    : std::runtime_error(format_parse_error(offset, message, expected)),
      offset_(offset),
      detail_(std::move(message)),
      expected_(std::move(expected)) {}

Expr parse(std::string_view source, Variables vars) {
  Parser p(source, vars);
  return Expr(p.parse_all(), vars);
}

double eval(const Expr& e, double t, double u, double v) {
  if (e.empty()) throw EvalError("empty expression");
  return eval_node(*e.root(), {t, u, v});
}

Expr shift_to_f(const Expr& h, double omega) {
  return Expr(make_binary(BinaryOp::Add, h.root(),
                          make_binary(BinaryOp::Mul, make_number(omega), make_variable(2))),
              h.variables());
}

Interval Interval::make(double lo, double hi) {
  if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw std::invalid_argument("interval requires finite lo <= hi");
  return Interval{lo, hi};
}

Expr clamp_extend(const Expr& f, Interval u_range, Interval v_range) {
  Interval::make(u_range.lo, u_range.hi);
  Interval::make(v_range.lo, v_range.hi);
  return Expr(substitute(f.root(), {nullptr, clamp_node(1, u_range), clamp_node(2, v_range)}), f.variables());
}

std::string to_string(const Expr& e) {
  std::string out;
  if (!e.empty()) print_node(*e.root(), e.variables(), out);
  return out;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.empty() || b.empty()) return a.empty() == b.empty();
  return a.variables() == b.variables() && nodes_equal(*a.root(), *b.root());
}

bool is_constant(const Expr& e, double value) {
  return !e.empty() && e.root()->kind == Node::Kind::Number && e.root()->number == value;
}

Box3 Box3::make(Interval t, Interval u, Interval v) {
  return Box3{Interval::make(t.lo, t.hi), Interval::make(u.lo, u.hi), Interval::make(v.lo, v.hi)};
}

namespace {

BoxExtremum box_max(const Expr& f, const Box3& box, const BoxSearchOptions& opts, double sign) {
  const std::array<Interval, 3> axes{box.t, box.u, box.v};
  std::array<int, 3> counts{};
  for (std::size_t k = 0; k < 3; ++k) counts[k] = axes[k].width() > 0.0 ? std::max(opts.grid, 2) : 1;
  auto coord = [&](std::size_t k, int i) {
    if (counts[k] == 1) return axes[k].lo;
    if (i == counts[k] - 1) return axes[k].hi;
    return axes[k].lo + axes[k].width() * double(i) / double(counts[k] - 1);
  };

  BoxExtremum out;
  auto objective = [&](const Eigen::Vector3d& x) {
    ++out.evaluations;
    return sign * eval(f, x[0], x[1], x[2]);
  };

  struct Sample {
    double value;
    std::size_t index;
    Eigen::Vector3d x;
  };
  std::vector<Sample> samples;
  samples.reserve(static_cast<std::size_t>(counts[0]) * counts[1] * counts[2]);
  std::size_t idx = 0;
  for (int i = 0; i < counts[0]; ++i)
    for (int j = 0; j < counts[1]; ++j)
      for (int l = 0; l < counts[2]; ++l) {
        const Eigen::Vector3d x(coord(0, i), coord(1, j), coord(2, l));
        samples.push_back({objective(x), idx++, x});
      }

  const std::size_t starts = std::min<std::size_t>(std::max(opts.starts, 1), samples.size());
  std::partial_sort(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(starts), samples.end(),
                    [](const Sample& a, const Sample& b) {
                      return a.value != b.value ? a.value > b.value : a.index < b.index;
                    });

  double best = samples.front().value;
  Eigen::Vector3d best_x = samples.front().x;
  for (std::size_t s = 0; s < starts; ++s) {
    Eigen::Vector3d x = samples[s].x;
    double fx = samples[s].value;
    std::array<double, 3> step{}, tol{};
    for (std::size_t k = 0; k < 3; ++k) {
      step[k] = counts[k] > 1 ? axes[k].width() / double(counts[k] - 1) : 0.0;
      tol[k] = opts.step_tolerance * std::max(1.0, axes[k].width());
    }
    auto active = [&] {
      for (std::size_t k = 0; k < 3; ++k)
        if (step[k] > tol[k]) return true;
      return false;
    };
    for (int iter = 0; active() && iter < 100000; ++iter) {
      bool improved = false;
      for (std::size_t k = 0; k < 3 && !improved; ++k) {
        if (step[k] <= tol[k]) continue;
        for (double dir : {1.0, -1.0}) {
          Eigen::Vector3d y = x;
          y[static_cast<Eigen::Index>(k)] =
              std::clamp(x[static_cast<Eigen::Index>(k)] + dir * step[k], axes[k].lo, axes[k].hi);
          if (y == x) continue;
          const double fy = objective(y);
          if (fy > fx) {
            x = y;
            fx = fy;
            improved = true;
            break;
          }
        }
      }
      if (!improved)
        for (std::size_t k = 0; k < 3; ++k) step[k] /= 2.0;
    }
    if (fx > best) {
      best = fx;
      best_x = x;
    }
  }
  out.value = sign * best;
  out.point = best_x;
  return out;
}

}  // namespace

BoxExtremum box_sup(const Expr& f, const Box3& box, const BoxSearchOptions& opts) {
  return box_max(f, box, opts, 1.0);
}

BoxExtremum box_inf(const Expr& f, const Box3& box, const BoxSearchOptions& opts) {
  return box_max(f, box, opts, -1.0);
}

}  // namespace rh::expr
