#include "expression.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

#include "error.hpp"

namespace porohom {

namespace {

using OpCode = Expression::OpCode;

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  std::vector<Expression::Op> run() {
    expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return std::move(code_);
  }

  bool uses_y = false;
  bool uses_t = false;

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("expression \"" + text_ + "\": " + msg + " at offset " +
                      std::to_string(pos_));
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void emit(OpCode code, int slot = 0, double value = 0.0) {
    code_.push_back({code, slot, value});
  }

  void expr() {
    term();
    for (;;) {
      if (accept('+')) {
        term();
        emit(OpCode::add);
      } else if (accept('-')) {
        term();
        emit(OpCode::sub);
      } else {
        return;
      }
    }
  }

  void term() {
    unary();
    for (;;) {
      if (accept('*')) {
        unary();
        emit(OpCode::mul);
      } else if (accept('/')) {
        unary();
        emit(OpCode::div);
      } else {
        return;
      }
    }
  }

  void unary() {
    if (accept('-')) {
      unary();
      emit(OpCode::neg);
    } else if (accept('+')) {
      unary();
    } else {
      power();
    }
  }

  void power() {
    primary();
    if (accept('^')) {
      unary();
      emit(OpCode::pow);
    }
  }

  void primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      expr();
      if (!accept(')')) fail("expected ')'");
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double value = 0.0;
      const char* begin = text_.data() + pos_;
      const auto [end, ec] = std::from_chars(begin, text_.data() + text_.size(), value);
      if (ec != std::errc()) fail("malformed number");
      pos_ += static_cast<std::size_t>(end - begin);
      emit(OpCode::push, 0, value);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      identifier(text_.substr(start, pos_ - start));
      return;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  void identifier(const std::string& name) {
    if (name == "pi") return emit(OpCode::push, 0, std::numbers::pi);
    if (name == "e") return emit(OpCode::push, 0, std::numbers::e);
    if (name == "t") {
      uses_t = true;
      return emit(OpCode::var_t);
    }
    if (name.size() == 2 && (name[0] == 'x' || name[0] == 'y') && name[1] >= '1' &&
        name[1] <= '3') {
      const int slot = name[1] - '1';
      if (name[0] == 'y') uses_y = true;
      return emit(name[0] == 'x' ? OpCode::var_x : OpCode::var_y, slot);
    }

    static const std::array<std::pair<const char*, OpCode>, 8> unary_fns{{
        {"sin", OpCode::sin}, {"cos", OpCode::cos}, {"tan", OpCode::tan},
        {"exp", OpCode::exp}, {"log", OpCode::log}, {"sqrt", OpCode::sqrt},
        {"abs", OpCode::abs}, {"tanh", OpCode::tanh},
    }};
    static const std::array<std::pair<const char*, OpCode>, 3> binary_fns{{
        {"pow", OpCode::pow}, {"min", OpCode::min}, {"max", OpCode::max},
    }};
    for (const auto& [fname, op] : unary_fns) {
      if (name == fname) {
        if (!accept('(')) fail("expected '(' after " + name);
        expr();
        if (!accept(')')) fail("expected ')'");
        return emit(op);
      }
    }
    for (const auto& [fname, op] : binary_fns) {
      if (name == fname) {
        if (!accept('(')) fail("expected '(' after " + name);
        expr();
        if (!accept(',')) fail("expected ',' in " + name);
        expr();
        if (!accept(')')) fail("expected ')'");
        return emit(op);
      }
    }
    fail("unknown identifier '" + name + "'");
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  std::vector<Expression::Op> code_;
};

}  // namespace

Expression::Expression() : code_{{OpCode::push, 0, 0.0}}, text_("0") {}

Expression Expression::parse(const std::string& text) {
  Parser parser(text);
  Expression e;
  e.code_ = parser.run();
  e.text_ = text;
  e.uses_y_ = parser.uses_y;
  e.uses_t_ = parser.uses_t;
  int depth = 0;
  int max_depth = 0;
  for (const Op& op : e.code_) {
    switch (op.code) {
      case OpCode::push: case OpCode::var_x: case OpCode::var_y: case OpCode::var_t:
        ++depth;
        break;
      case OpCode::add: case OpCode::sub: case OpCode::mul: case OpCode::div:
      case OpCode::pow: case OpCode::min: case OpCode::max:
        --depth;
        break;
      default:
        break;
    }
    max_depth = std::max(max_depth, depth);
  }
  e.stack_depth_ = max_depth;
  return e;
}

Expression Expression::constant(double value) {
  Expression e;
  e.code_ = {{OpCode::push, 0, value}};
  e.text_ = std::to_string(value);
  return e;
}

double Expression::operator()(const Point& x, const Point& y, double t) const {
  double small[32] = {};
  std::vector<double> big;
  double* stack = small;
  if (stack_depth_ > 32) {
    big.resize(static_cast<std::size_t>(stack_depth_));
    stack = big.data();
  }
  int top = -1;
  for (const Op& op : code_) {
    switch (op.code) {
      case OpCode::push: stack[++top] = op.value; break;
      case OpCode::var_x: stack[++top] = x[op.slot]; break;
      case OpCode::var_y: stack[++top] = y[op.slot]; break;
      case OpCode::var_t: stack[++top] = t; break;
      case OpCode::add: --top; stack[top] += stack[top + 1]; break;
      case OpCode::sub: --top; stack[top] -= stack[top + 1]; break;
      case OpCode::mul: --top; stack[top] *= stack[top + 1]; break;
      case OpCode::div: --top; stack[top] /= stack[top + 1]; break;
      case OpCode::pow: --top; stack[top] = std::pow(stack[top], stack[top + 1]); break;
      case OpCode::min: --top; stack[top] = std::min(stack[top], stack[top + 1]); break;
      case OpCode::max: --top; stack[top] = std::max(stack[top], stack[top + 1]); break;
      case OpCode::neg: stack[top] = -stack[top]; break;
      case OpCode::sin: stack[top] = std::sin(stack[top]); break;
      case OpCode::cos: stack[top] = std::cos(stack[top]); break;
      case OpCode::tan: stack[top] = std::tan(stack[top]); break;
      case OpCode::exp: stack[top] = std::exp(stack[top]); break;
      case OpCode::log: stack[top] = std::log(stack[top]); break;
      case OpCode::sqrt: stack[top] = std::sqrt(stack[top]); break;
      case OpCode::abs: stack[top] = std::abs(stack[top]); break;
      case OpCode::tanh: stack[top] = std::tanh(stack[top]); break;
    }
  }
  return stack[0];
}

}  // namespace porohom
