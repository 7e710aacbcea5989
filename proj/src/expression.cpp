#include "mhdnat/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

namespace mhdnat {

namespace {

enum class Op { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Func };
enum class Fn { Sin, Cos, Tan, Exp, Log, Sqrt, Sinh, Cosh, Tanh, Atan, Asin, Acos, Abs };

struct FnName {
  const char* name;
  Fn fn;
};

constexpr FnName kFunctions[] = {
    {"sin", Fn::Sin},   {"cos", Fn::Cos},   {"tan", Fn::Tan},   {"exp", Fn::Exp},   {"log", Fn::Log},
    {"sqrt", Fn::Sqrt}, {"sinh", Fn::Sinh}, {"cosh", Fn::Cosh}, {"tanh", Fn::Tanh}, {"atan", Fn::Atan},
    {"asin", Fn::Asin}, {"acos", Fn::Acos}, {"abs", Fn::Abs},
};

const char* fn_name(Fn fn) {
  for (const auto& f : kFunctions)
    if (f.fn == fn) return f.name;
  return "?";
}

}  // namespace

struct Expression::Node {
  Op op = Op::Const;
  double value = 0.0;
  int var = -1;
  Fn fn = Fn::Sin;
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr make_const(double v) {
  auto n = std::make_shared<Expression::Node>();
  n->op = Op::Const;
  n->value = v;
  return n;
}

NodePtr make_var(int index) {
  auto n = std::make_shared<Expression::Node>();
  n->op = Op::Var;
  n->var = index;
  return n;
}

bool is_const(const NodePtr& n, double v) { return n->op == Op::Const && n->value == v; }

NodePtr make_fn(Fn fn, NodePtr a);

NodePtr make_binary(Op op, NodePtr a, NodePtr b) {
  if (a->op == Op::Const && b->op == Op::Const) {
    const double x = a->value, y = b->value;
    switch (op) {
      case Op::Add: return make_const(x + y);
      case Op::Sub: return make_const(x - y);
      case Op::Mul: return make_const(x * y);
      case Op::Div: return make_const(x / y);
      case Op::Pow: return make_const(std::pow(x, y));
      default: break;
    }
  }
  switch (op) {
    case Op::Add:
      if (is_const(a, 0.0)) return b;
      if (is_const(b, 0.0)) return a;
      break;
    case Op::Sub:
      if (is_const(b, 0.0)) return a;
      break;
    case Op::Mul:
      if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
      if (is_const(a, 1.0)) return b;
      if (is_const(b, 1.0)) return a;
      break;
    case Op::Div:
      if (is_const(a, 0.0)) return make_const(0.0);
      if (is_const(b, 1.0)) return a;
      break;
    case Op::Pow:
      if (is_const(b, 0.0)) return make_const(1.0);
      if (is_const(b, 1.0)) return a;
      break;
    default: break;
  }
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr make_neg(NodePtr a) {
  if (a->op == Op::Const) return make_const(-a->value);
  if (a->op == Op::Neg) return a->a;
  auto n = std::make_shared<Expression::Node>();
  n->op = Op::Neg;
  n->a = std::move(a);
  return n;
}

NodePtr make_fn(Fn fn, NodePtr a) {
  auto n = std::make_shared<Expression::Node>();
  n->op = Op::Func;
  n->fn = fn;
  n->a = std::move(a);
  return n;
}

NodePtr add(NodePtr a, NodePtr b) { return make_binary(Op::Add, std::move(a), std::move(b)); }
NodePtr sub(NodePtr a, NodePtr b) { return make_binary(Op::Sub, std::move(a), std::move(b)); }
NodePtr mul(NodePtr a, NodePtr b) { return make_binary(Op::Mul, std::move(a), std::move(b)); }
NodePtr div(NodePtr a, NodePtr b) { return make_binary(Op::Div, std::move(a), std::move(b)); }
NodePtr pow(NodePtr a, NodePtr b) { return make_binary(Op::Pow, std::move(a), std::move(b)); }

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  Parser(std::string_view text, const std::vector<std::string>& vars) : s_(text), vars_(vars) {}

  NodePtr parse() {
    NodePtr n = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    std::ostringstream os;
    os << "expression \"" << s_ << "\": " << what << " at position " << pos_;
    throw ExpressionError(os.str());
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = add(lhs, term());
      else if (accept('-'))
        lhs = sub(lhs, term());
      else
        return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      skip_ws();
      if (pos_ + 1 < s_.size() && s_[pos_] == '*' && s_[pos_ + 1] == '*') return lhs;  // handled in power
      if (accept('*'))
        lhs = mul(lhs, unary());
      else if (accept('/'))
        lhs = div(lhs, unary());
      else
        return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make_neg(unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    skip_ws();
    if (pos_ + 1 < s_.size() && s_[pos_] == '*' && s_[pos_ + 1] == '*') {
      pos_ += 2;
      return pow(base, unary());
    }
    if (accept('^')) return pow(base, unary());
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr n = expr();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const std::string rest(s_.substr(pos_));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(rest, &used);
    } catch (const std::exception&) {
      fail("malformed number");
    }
    pos_ += used;
    return make_const(v);
  }

  NodePtr name() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    const std::string id(s_.substr(start, pos_ - start));
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == '(') {
      ++pos_;
      std::vector<NodePtr> args{expr()};
      while (accept(',')) args.push_back(expr());
      if (!accept(')')) fail("expected ')' after arguments of " + id);
      if (id == "pow") {
        if (args.size() != 2) fail("pow takes two arguments");
        return pow(args[0], args[1]);
      }
      for (const auto& f : kFunctions) {
        if (id == f.name) {
          if (args.size() != 1) fail(id + " takes one argument");
          return make_fn(f.fn, args[0]);
        }
      }
      fail("unknown function '" + id + "'");
    }
    for (std::size_t i = 0; i < vars_.size(); ++i)
      if (vars_[i] == id) return make_var(static_cast<int>(i));
    if (id == "pi") return make_const(std::numbers::pi);
    if (id == "e") return make_const(std::numbers::e);
    std::string allowed;
    for (const auto& v : vars_) allowed += (allowed.empty() ? "" : ", ") + v;
    fail("unknown variable '" + id + "' (allowed: " + (allowed.empty() ? "none" : allowed) + ")");
  }

  std::string_view s_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Evaluation

template <class T>
T apply_fn(Fn fn, const T& x) {
  using std::abs, std::acos, std::asin, std::atan, std::cos, std::cosh, std::exp, std::log, std::sin, std::sinh,
      std::sqrt, std::tan, std::tanh;
  switch (fn) {
    case Fn::Sin: return sin(x);
    case Fn::Cos: return cos(x);
    case Fn::Tan: return tan(x);
    case Fn::Exp: return exp(x);
    case Fn::Log: return log(x);
    case Fn::Sqrt: return sqrt(x);
    case Fn::Sinh: return sinh(x);
    case Fn::Cosh: return cosh(x);
    case Fn::Tanh: return tanh(x);
    case Fn::Atan: return atan(x);
    case Fn::Asin: return asin(x);
    case Fn::Acos: return acos(x);
    case Fn::Abs: return abs(x);
  }
  return x;
}

template <class T>
T eval_node(const Expression::Node& n, std::span<const T> args) {
  switch (n.op) {
    case Op::Const: return T(n.value);
    case Op::Var: return args[static_cast<std::size_t>(n.var)];
    case Op::Add: return eval_node(*n.a, args) + eval_node(*n.b, args);
    case Op::Sub: return eval_node(*n.a, args) - eval_node(*n.b, args);
    case Op::Mul: return eval_node(*n.a, args) * eval_node(*n.b, args);
    case Op::Div: return eval_node(*n.a, args) / eval_node(*n.b, args);
    case Op::Neg: return -eval_node(*n.a, args);
    case Op::Pow: {
      using std::pow;
      if (n.b->op == Op::Const) return pow(eval_node(*n.a, args), n.b->value);
      return pow(eval_node(*n.a, args), eval_node(*n.b, args));
    }
    case Op::Func: return apply_fn(n.fn, eval_node(*n.a, args));
  }
  return T(0.0);
}

bool node_constant(const Expression::Node& n) {
  switch (n.op) {
    case Op::Const: return true;
    case Op::Var: return false;
    case Op::Neg:
    case Op::Func: return node_constant(*n.a);
    default: return node_constant(*n.a) && node_constant(*n.b);
  }
}

// ---------------------------------------------------------------------------
// Symbolic differentiation

NodePtr diff(const NodePtr& n, int var) {
  switch (n->op) {
    case Op::Const: return make_const(0.0);
    case Op::Var: return make_const(n->var == var ? 1.0 : 0.0);
    case Op::Add: return add(diff(n->a, var), diff(n->b, var));
    case Op::Sub: return sub(diff(n->a, var), diff(n->b, var));
    case Op::Neg: return make_neg(diff(n->a, var));
    case Op::Mul: return add(mul(diff(n->a, var), n->b), mul(n->a, diff(n->b, var)));
    case Op::Div:
      return div(sub(mul(diff(n->a, var), n->b), mul(n->a, diff(n->b, var))), pow(n->b, make_const(2.0)));
    case Op::Pow: {
      if (n->b->op == Op::Const) {
        const double k = n->b->value;
        return mul(mul(make_const(k), pow(n->a, make_const(k - 1.0))), diff(n->a, var));
      }
      // d(a^b) = a^b (b' log a + b a'/a)
      return mul(n, add(mul(diff(n->b, var), make_fn(Fn::Log, n->a)), div(mul(n->b, diff(n->a, var)), n->a)));
    }
    case Op::Func: {
      const NodePtr& a = n->a;
      const NodePtr da = diff(a, var);
      if (is_const(da, 0.0)) return make_const(0.0);
      NodePtr outer;
      switch (n->fn) {
        case Fn::Sin: outer = make_fn(Fn::Cos, a); break;
        case Fn::Cos: outer = make_neg(make_fn(Fn::Sin, a)); break;
        case Fn::Tan: outer = add(make_const(1.0), pow(make_fn(Fn::Tan, a), make_const(2.0))); break;
        case Fn::Exp: outer = n; break;
        case Fn::Log: outer = div(make_const(1.0), a); break;
        case Fn::Sqrt: outer = div(make_const(0.5), n); break;
        case Fn::Sinh: outer = make_fn(Fn::Cosh, a); break;
        case Fn::Cosh: outer = make_fn(Fn::Sinh, a); break;
        case Fn::Tanh: outer = sub(make_const(1.0), pow(n, make_const(2.0))); break;
        case Fn::Atan: outer = div(make_const(1.0), add(make_const(1.0), pow(a, make_const(2.0)))); break;
        case Fn::Asin:
          outer = div(make_const(1.0), make_fn(Fn::Sqrt, sub(make_const(1.0), pow(a, make_const(2.0)))));
          break;
        case Fn::Acos:
          outer = make_neg(div(make_const(1.0), make_fn(Fn::Sqrt, sub(make_const(1.0), pow(a, make_const(2.0))))));
          break;
        case Fn::Abs: outer = div(a, n); break;
      }
      return mul(outer, da);
    }
  }
  return make_const(0.0);
}

// ---------------------------------------------------------------------------
// Printing (used for derived expressions)

int precedence(Op op) {
  switch (op) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return 4;
    default: return 5;
  }
}

void print(std::ostream& os, const NodePtr& n, const std::vector<std::string>& vars) {
  auto wrap = [&](const NodePtr& child, bool strict) {
    const bool paren = strict ? precedence(child->op) <= precedence(n->op) : precedence(child->op) < precedence(n->op);
    if (paren) os << '(';
    print(os, child, vars);
    if (paren) os << ')';
  };
  switch (n->op) {
    case Op::Const: {
      std::ostringstream num;
      num.precision(17);
      num << n->value;
      if (n->value < 0.0)
        os << '(' << num.str() << ')';
      else
        os << num.str();
      break;
    }
    case Op::Var: os << vars[static_cast<std::size_t>(n->var)]; break;
    case Op::Add: wrap(n->a, false); os << " + "; wrap(n->b, false); break;
    case Op::Sub: wrap(n->a, false); os << " - "; wrap(n->b, true); break;
    case Op::Mul: wrap(n->a, false); os << "*"; wrap(n->b, false); break;
    case Op::Div: wrap(n->a, false); os << "/"; wrap(n->b, true); break;
    case Op::Pow: wrap(n->a, true); os << "^"; wrap(n->b, false); break;
    case Op::Neg: os << "-"; wrap(n->a, false); break;
    case Op::Func: os << fn_name(n->fn) << '('; print(os, n->a, vars); os << ')'; break;
  }
}

}  // namespace

Expression::Expression() : Expression(make_const(0.0), {}, "0") {}

Expression::Expression(std::shared_ptr<const Node> root, std::vector<std::string> variables, std::string text)
    : root_(std::move(root)), variables_(std::move(variables)), text_(std::move(text)) {}

Expression Expression::parse(std::string_view text, std::vector<std::string> variables) {
  Parser parser(text, variables);
  NodePtr root = parser.parse();
  return Expression(std::move(root), std::move(variables), std::string(text));
}

Expression Expression::constant(double value, std::vector<std::string> variables) {
  std::ostringstream os;
  os.precision(17);
  os << value;
  return Expression(make_const(value), std::move(variables), os.str());
}

double Expression::eval(std::span<const double> args) const {
  if (args.size() != variables_.size()) throw ExpressionError("expression \"" + text_ + "\": wrong argument count");
  return eval_node<double>(*root_, args);
}

Jet Expression::eval(std::span<const Jet> args) const {
  if (args.size() != variables_.size()) throw ExpressionError("expression \"" + text_ + "\": wrong argument count");
  return eval_node<Jet>(*root_, args);
}

Expression Expression::derivative(std::string_view variable) const {
  int index = -1;
  for (std::size_t i = 0; i < variables_.size(); ++i)
    if (variables_[i] == variable) index = static_cast<int>(i);
  if (index < 0) throw ExpressionError("cannot differentiate \"" + text_ + "\" by undeclared variable " + std::string(variable));
  NodePtr d = diff(root_, index);
  std::ostringstream os;
  print(os, d, variables_);
  return Expression(std::move(d), variables_, os.str());
}

bool Expression::is_constant() const { return node_constant(*root_); }

double eval_constant(std::string_view text) {
  return Expression::parse(text, {}).eval(std::span<const double>{});
}

}  // namespace mhdnat
