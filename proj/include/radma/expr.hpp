#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace radma {

/// Parse failure. `position()` is the 0-based character offset into the
/// source text where the problem was detected.
class ExprError : public std::runtime_error {
 public:
  enum class Kind { syntax, unknown_identifier, variable_index };

  ExprError(Kind kind, std::size_t position, const std::string& what);

  Kind kind() const noexcept { return kind_; }
  std::size_t position() const noexcept { return position_; }

 private:
  Kind kind_;
  std::size_t position_;
};

/// Raised when an evaluation leaves the codomain [0, inf): negative, NaN or
/// infinite result. `value()` is the offending result.
class RangeError : public std::range_error {
 public:
  RangeError(double value, const std::string& what);
  double value() const noexcept { return value_; }
  bool is_overflow() const noexcept;

 private:
  double value_;
};

enum class NodeKind { constant, variable, add, sub, mul, div, pow, exp };

struct ExprNode;
using NodePtr = std::shared_ptr<const ExprNode>;

/// Immutable expression tree node. `value` holds the constant for
/// `constant` and the exponent for `pow`; `index` is the 1-based variable
/// index for `variable`.
struct ExprNode {
  NodeKind kind;
  double value = 0.0;
  int index = 0;
  NodePtr lhs;
  NodePtr rhs;
};

bool structurally_equal(const ExprNode& a, const ExprNode& b);

/// A parsed nonlinearity f : R^n_+ -> R_+.
///
/// Holds the tree (for printing and inspection) and a flattened postfix
/// program used by `eval`. Copies share the immutable tree.
class Expr {
 public:
  Expr() = default;

  int arity() const noexcept { return arity_; }
  const ExprNode& root() const { return *root_; }
  bool empty() const noexcept { return root_ == nullptr; }

  /// Evaluates at `v` (size must equal arity, components >= 0).
  /// Throws RangeError if the result is negative, NaN or infinite.
  double eval(std::span<const double> v) const;

  /// Same as eval but returns the raw result without range checks.
  double eval_unchecked(std::span<const double> v) const noexcept;

  /// Fully parenthesised text that parses back to the same tree.
  std::string to_string() const;

  friend Expr parse(const std::string& text, int n);
  friend Expr make_expr(NodePtr root, int n);

 private:
  struct Instr {
    NodeKind op;
    double value;
    int index;
  };

  void compile();

  NodePtr root_;
  int arity_ = 0;
  std::vector<Instr> program_;
  std::size_t max_stack_ = 0;
};

Expr parse(const std::string& text, int n);

/// Wraps an already-built tree. Throws ExprError (variable_index) if a
/// variable is outside 1..n.
Expr make_expr(NodePtr root, int n);

struct Violation {
  std::size_t sample = 0;
  std::vector<double> point;
  double value = 0.0;
  std::string message;
};

struct ValidationReport {
  std::size_t samples = 0;
  std::vector<Violation> violations;
  /// Smallest value seen at sampled points with norm > 0 (no violation).
  double min_positive_norm_value = 0.0;
  /// True if that minimum is strictly positive: sampled evidence for H2.
  bool h2_evidence = false;

  bool ok() const noexcept { return violations.empty(); }
  std::optional<std::size_t> first_violation() const;
};

/// Evaluates `f` on a deterministic Halton sample of the region
/// { v >= 0 : |v|_1 <= radius } and reports codomain violations.
ValidationReport validate_nonneg(const Expr& f, int n, double radius,
                                 std::size_t samples);

/// Deterministic low-discrepancy points of the unit simplex-ball
/// { y >= 0, sum y <= 1 } in dimension n (Halton + sorted spacings).
std::vector<double> simplex_ball_point(std::size_t index, int n);

/// Radical inverse of `index` in the given prime base.
double radical_inverse(std::size_t index, unsigned base);

}  // namespace radma
