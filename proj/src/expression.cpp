#include "tvmed/expression.hpp"

#include "tvmed/io.hpp"
#include "tvmed/types.hpp"

#include <cctype>
#include <cmath>
#include <numbers>

namespace tvmed {

struct Expression::Node {
  enum class Op { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Call } op = Op::Const;
  double value = 0.0;
  double (*fn)(double) = nullptr;
  std::shared_ptr<const Node> lhs, rhs;

  double eval(double t) const {
    switch (op) {
      case Op::Const: return value;
      case Op::Var: return t;
      case Op::Neg: return -lhs->eval(t);
      case Op::Add: return lhs->eval(t) + rhs->eval(t);
      case Op::Sub: return lhs->eval(t) - rhs->eval(t);
      case Op::Mul: return lhs->eval(t) * rhs->eval(t);
      case Op::Div: return lhs->eval(t) / rhs->eval(t);
      case Op::Pow: {
        const double base = lhs->eval(t);
        const double ex = rhs->eval(t);
        // small integer powers exactly, so polynomials match hand arithmetic
        if (ex == std::floor(ex) && std::abs(ex) <= 16.0) {
          double r = 1.0;
          for (int i = 0; i < int(std::abs(ex)); ++i) r *= base;
          return ex < 0 ? 1.0 / r : r;
        }
        return std::pow(base, ex);
      }
      case Op::Call: return fn(lhs->eval(t));
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Op = Expression::Node::Op;

NodePtr make_const(double v) {
  auto n = std::make_shared<Expression::Node>();
  n->op = Op::Const;
  n->value = v;
  return n;
}

NodePtr make_op(Op op, NodePtr lhs, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

class Parser {
public:
  explicit Parser(const std::string& text) : s_(text) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

private:
  [[noreturn]] void fail(const std::string& what) const {
    throw InvalidArgument("expression '" + s_ + "': " + what + " at offset " + std::to_string(pos_));
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) lhs = make_op(Op::Add, lhs, term());
      else if (accept('-')) lhs = make_op(Op::Sub, lhs, term());
      else return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) lhs = make_op(Op::Mul, lhs, unary());
      else if (accept('/')) lhs = make_op(Op::Div, lhs, unary());
      else return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make_op(Op::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make_op(Op::Pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return name();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.'))
      ++pos_;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < s_.size() && (s_[p] == '+' || s_[p] == '-')) ++p;
      if (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) {
        pos_ = p;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      }
    }
    auto v = io::parse_double(std::string_view(s_).substr(start, pos_ - start));
    if (!v) fail("bad number");
    return make_const(*v);
  }

  NodePtr name() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    const std::string id = s_.substr(start, pos_ - start);
    if (id == "t") return make_op(Op::Var, nullptr);
    if (id == "pi") return make_const(std::numbers::pi);
    if (id == "e") return make_const(std::numbers::e);
    double (*fn)(double) = nullptr;
    if (id == "sin") fn = [](double x) { return std::sin(x); };
    else if (id == "cos") fn = [](double x) { return std::cos(x); };
    else if (id == "tan") fn = [](double x) { return std::tan(x); };
    else if (id == "exp") fn = [](double x) { return std::exp(x); };
    else if (id == "log") fn = [](double x) { return std::log(x); };
    else if (id == "sqrt") fn = [](double x) { return std::sqrt(x); };
    else if (id == "abs") fn = [](double x) { return std::abs(x); };
    else fail("unknown name '" + id + "'");
    if (!accept('(')) fail("expected '(' after " + id);
    NodePtr arg = expr();
    if (!accept(')')) fail("expected ')'");
    auto n = std::make_shared<Expression::Node>();
    n->op = Op::Call;
    n->fn = fn;
    n->lhs = std::move(arg);
    return n;
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression::Expression() : root_(make_const(0.0)), source_("0") {}

Expression Expression::parse(const std::string& text) {
  Expression e;
  e.root_ = Parser(text).parse();
  e.source_ = text;
  return e;
}

Expression Expression::constant(double v) {
  Expression e;
  e.root_ = make_const(v);
  e.source_ = io::format_double(v);
  return e;
}

double Expression::operator()(double t) const { return root_->eval(t); }

}  // namespace tvmed
