#include "radma/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

namespace radma {

ExprError::ExprError(Kind kind, std::size_t position, const std::string& what)
    : std::runtime_error(what + " at position " + std::to_string(position)),
      kind_(kind),
      position_(position) {}

RangeError::RangeError(double value, const std::string& what)
    : std::range_error(what), value_(value) {}

bool RangeError::is_overflow() const noexcept {
  return std::isinf(value_) && value_ > 0;
}

bool structurally_equal(const ExprNode& a, const ExprNode& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case NodeKind::constant:
      return a.value == b.value;
    case NodeKind::variable:
      return a.index == b.index;
    case NodeKind::exp:
      return structurally_equal(*a.lhs, *b.lhs);
    case NodeKind::pow:
      return a.value == b.value && structurally_equal(*a.lhs, *b.lhs);
    default:
      return structurally_equal(*a.lhs, *b.lhs) &&
             structurally_equal(*a.rhs, *b.rhs);
  }
}

namespace {

NodePtr make_node(NodeKind kind, double value = 0.0, int index = 0,
                  NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  return std::make_shared<const ExprNode>(
      ExprNode{kind, value, index, std::move(lhs), std::move(rhs)});
}

// Grammar (whitespace insignificant):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' ['+' | '-'] number)?
//   primary := number | 'v' digits | 'exp' '(' expr ')' | '(' expr ')'
class Parser {
 public:
  Parser(const std::string& text, int n) : text_(text), n_(n) {}

  NodePtr parse() {
    NodePtr root = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ExprError(ExprError::Kind::syntax, pos_, "syntax error: " + msg);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= text_.size()) fail(std::string("expected '") + c + "', found end of input");
      fail(std::string("expected '") + c + "'");
    }
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make_node(NodeKind::add, 0, 0, lhs, term());
      } else if (accept('-')) {
        lhs = make_node(NodeKind::sub, 0, 0, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make_node(NodeKind::mul, 0, 0, lhs, unary());
      } else if (accept('/')) {
        lhs = make_node(NodeKind::div, 0, 0, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) {
      return make_node(NodeKind::sub, 0, 0, make_node(NodeKind::constant, 0.0), unary());
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) {
      skip_ws();
      double sign = 1.0;
      if (accept('-')) {
        sign = -1.0;
      } else {
        accept('+');
      }
      skip_ws();
      if (pos_ >= text_.size() || !(std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
        fail("exponent must be a real literal");
      }
      base = make_node(NodeKind::pow, sign * number(), 0, base);
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == '^') fail("chained exponents are not allowed");
    }
    return base;
  }

  double number() {
    const char* begin = text_.c_str() + pos_;
    char* end = nullptr;
    double value = std::strtod(begin, &end);
    if (end == begin) fail("malformed number");
    // strtod accepts hex and inf/nan; the grammar only allows decimal reals.
    for (const char* p = begin; p != end; ++p) {
      if (!(std::isdigit(static_cast<unsigned char>(*p)) || *p == '.' || *p == 'e' || *p == 'E' ||
            *p == '+' || *p == '-')) {
        fail("malformed number");
      }
    }
    pos_ += static_cast<std::size_t>(end - begin);
    return value;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("expected operand, found end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return make_node(NodeKind::constant, number());
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      std::string ident = text_.substr(start, pos_ - start);
      if (ident == "exp") {
        expect('(');
        NodePtr arg = expr();
        expect(')');
        return make_node(NodeKind::exp, 0, 0, arg);
      }
      if (ident.size() >= 2 && ident[0] == 'v' &&
          std::all_of(ident.begin() + 1, ident.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
        long index = ident.size() > 10 ? std::numeric_limits<long>::max() : std::stol(ident.substr(1));
        if (index < 1 || index > n_) {
          throw ExprError(ExprError::Kind::variable_index, start,
                          "variable index out of range: " + ident + " (n = " + std::to_string(n_) + ")");
        }
        return make_node(NodeKind::variable, 0, static_cast<int>(index));
      }
      throw ExprError(ExprError::Kind::unknown_identifier, start, "unknown identifier '" + ident + "'");
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  const std::string& text_;
  int n_;
  std::size_t pos_ = 0;
};

void check_indices(const ExprNode& node, int n) {
  if (node.kind == NodeKind::variable && (node.index < 1 || node.index > n)) {
    throw ExprError(ExprError::Kind::variable_index, 0,
                    "variable index out of range: v" + std::to_string(node.index));
  }
  if (node.lhs) check_indices(*node.lhs, n);
  if (node.rhs) check_indices(*node.rhs, n);
}

std::string format_real(double x) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", x);
  return buf.data();
}

void print(const ExprNode& node, std::string& out) {
  auto binary = [&](char op) {
    out += '(';
    print(*node.lhs, out);
    out += op;
    print(*node.rhs, out);
    out += ')';
  };
  switch (node.kind) {
    case NodeKind::constant:
      out += format_real(node.value);
      break;
    case NodeKind::variable:
      out += 'v' + std::to_string(node.index);
      break;
    case NodeKind::add: binary('+'); break;
    case NodeKind::sub: binary('-'); break;
    case NodeKind::mul: binary('*'); break;
    case NodeKind::div: binary('/'); break;
    case NodeKind::pow:
      out += '(';
      print(*node.lhs, out);
      out += '^';
      out += format_real(node.value);
      out += ')';
      break;
    case NodeKind::exp:
      out += "exp(";
      print(*node.lhs, out);
      out += ')';
      break;
  }
}

}  // namespace

Expr parse(const std::string& text, int n) {
  if (n < 1) throw std::invalid_argument("parse: component count must be >= 1");
  Expr e;
  e.root_ = Parser(text, n).parse();
  e.arity_ = n;
  e.compile();
  return e;
}

Expr make_expr(NodePtr root, int n) {
  if (!root) throw std::invalid_argument("make_expr: null tree");
  check_indices(*root, n);
  Expr e;
  e.root_ = std::move(root);
  e.arity_ = n;
  e.compile();
  return e;
}

void Expr::compile() {
  program_.clear();
  std::size_t depth = 0;
  max_stack_ = 0;
  auto emit = [&](auto&& self, const ExprNode& node) -> void {
    switch (node.kind) {
      case NodeKind::constant:
      case NodeKind::variable:
        program_.push_back({node.kind, node.value, node.index - 1});
        max_stack_ = std::max(max_stack_, ++depth);
        break;
      case NodeKind::pow:
      case NodeKind::exp:
        self(self, *node.lhs);
        program_.push_back({node.kind, node.value, 0});
        break;
      default:
        self(self, *node.lhs);
        self(self, *node.rhs);
        program_.push_back({node.kind, 0.0, 0});
        --depth;
        break;
    }
  };
  emit(emit, *root_);
}

#pragma GCC diagnostic push
#pragma GCC diagnostic ignored "-Wmaybe-uninitialized"
double Expr::eval_unchecked(std::span<const double> v) const noexcept {
  constexpr std::size_t kInline = 32;
  std::array<double, kInline> inline_stack;  // NOLINT: written before read
  std::vector<double> heap_stack;
  double* stack = inline_stack.data();
  if (max_stack_ > kInline) {
    heap_stack.resize(max_stack_);
    stack = heap_stack.data();
  }
  std::size_t top = 0;
  for (const Instr& ins : program_) {
    switch (ins.op) {
      case NodeKind::constant: stack[top++] = ins.value; break;
      case NodeKind::variable: stack[top++] = v[static_cast<std::size_t>(ins.index)]; break;
      case NodeKind::add: --top; stack[top - 1] += stack[top]; break;
      case NodeKind::sub: --top; stack[top - 1] -= stack[top]; break;
      case NodeKind::mul: --top; stack[top - 1] *= stack[top]; break;
      case NodeKind::div: --top; stack[top - 1] /= stack[top]; break;
      case NodeKind::pow: {
        double& b = stack[top - 1];
        if (ins.value == 1.0) break;
        if (ins.value == 2.0) {
          b = b * b;
        } else if (ins.value == 0.5 && b >= 0.0) {
          b = std::sqrt(b);
        } else {
          b = std::pow(b, ins.value);
        }
        break;
      }
      case NodeKind::exp: stack[top - 1] = std::exp(stack[top - 1]); break;
    }
  }
  return stack[0];
}
#pragma GCC diagnostic pop

double Expr::eval(std::span<const double> v) const {
  if (static_cast<int>(v.size()) != arity_) {
    throw std::invalid_argument("eval: expected " + std::to_string(arity_) + " arguments");
  }
  double r = eval_unchecked(v);
  if (!(r >= 0.0) || std::isinf(r)) {
    std::string what = std::isnan(r) ? "NaN" : (std::isinf(r) ? "infinite" : "negative");
    throw RangeError(r, "eval: " + what + " value " + format_real(r) + " for " + to_string());
  }
  return r;
}

std::string Expr::to_string() const {
  std::string out;
  if (root_) print(*root_, out);
  return out;
}

double radical_inverse(std::size_t index, unsigned base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

std::vector<double> simplex_ball_point(std::size_t index, int n) {
  static constexpr std::array<unsigned, 16> primes = {2, 3, 5, 7, 11, 13, 17, 19,
                                                      23, 29, 31, 37, 41, 43, 47, 53};
  if (n < 1 || n > static_cast<int>(primes.size())) {
    throw std::invalid_argument("simplex_ball_point: n must be in 1..16");
  }
  std::vector<double> u(static_cast<std::size_t>(n));
  for (int d = 0; d < n; ++d) u[static_cast<std::size_t>(d)] = radical_inverse(index, primes[static_cast<std::size_t>(d)]);
  std::sort(u.begin(), u.end());
  // The n spacings of n sorted uniforms are uniform on the simplex-ball.
  std::vector<double> y(u.size());
  double prev = 0.0;
  for (std::size_t d = 0; d < u.size(); ++d) {
    y[d] = u[d] - prev;
    prev = u[d];
  }
  return y;
}

std::optional<std::size_t> ValidationReport::first_violation() const {
  if (violations.empty()) return std::nullopt;
  return violations.front().sample;
}

ValidationReport validate_nonneg(const Expr& f, int n, double radius, std::size_t samples) {
  if (!(radius > 0.0)) throw std::invalid_argument("validate_nonneg: radius must be > 0");
  if (samples < 1) throw std::invalid_argument("validate_nonneg: samples must be >= 1");
  if (f.arity() != n) throw std::invalid_argument("validate_nonneg: arity mismatch");

  ValidationReport report;
  report.samples = samples;
  double min_val = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < samples; ++s) {
    std::vector<double> v = simplex_ball_point(s + 1, n);
    double norm = 0.0;
    for (double& x : v) {
      x *= radius;
      norm += x;
    }
    try {
      double val = f.eval(v);
      if (norm > 0.0) min_val = std::min(min_val, val);
    } catch (const RangeError& e) {
      report.violations.push_back({s, v, e.value(), e.what()});
    }
  }
  report.min_positive_norm_value = std::isinf(min_val) ? 0.0 : min_val;
  report.h2_evidence = !std::isinf(min_val) && min_val > 0.0;
  return report;
}

}  // namespace radma
