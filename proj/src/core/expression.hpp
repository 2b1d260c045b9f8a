#pragma once

#include <string>
#include <vector>

#include "geometry.hpp"

namespace porohom {

/// Closed-form scalar field over x1..x3, y1..y3 and t.
///
/// Grammar: + - * / ^ with the usual precedence (^ binds right), unary minus,
/// parentheses, numeric literals, the constants `pi` and `e`, and the
/// functions sin cos tan exp log sqrt abs tanh (one argument) and pow min max
/// (two arguments).
class Expression {
 public:
  Expression();  // the constant 0
  static Expression parse(const std::string& text);
  static Expression constant(double value);

  double operator()(const Point& x, const Point& y = {0.0, 0.0, 0.0},
                    double t = 0.0) const;
  const std::string& text() const { return text_; }
  bool depends_on_y() const { return uses_y_; }
  bool depends_on_t() const { return uses_t_; }

  enum class OpCode : unsigned char {
    push, var_x, var_y, var_t, add, sub, mul, div, pow, neg,
    sin, cos, tan, exp, log, sqrt, abs, tanh, min, max,
  };
  struct Op {
    OpCode code;
    int slot = 0;
    double value = 0.0;
  };

 private:
  std::vector<Op> code_;
  std::string text_;
  bool uses_y_ = false;
  bool uses_t_ = false;
  int stack_depth_ = 1;
};

}  // namespace porohom
