#pragma once

#include <memory>
#include <string>

namespace tvmed {

/// A real function of time parsed from text such as "15+8.7*sin(0.5*pi*t)".
///
/// Grammar: + - * / ^ (right-associative, binds tighter than unary minus),
/// parentheses, numeric literals, the variable t, the constants pi and e, and
/// the functions sin cos tan exp log sqrt abs. Immutable and cheap to copy.
class Expression {
public:
  Expression();  // the constant 0
  static Expression parse(const std::string& text);
  static Expression constant(double v);

  double operator()(double t) const;
  const std::string& source() const { return source_; }

  struct Node;

private:
  std::shared_ptr<const Node> root_;
  std::string source_;
};

}  // namespace tvmed
