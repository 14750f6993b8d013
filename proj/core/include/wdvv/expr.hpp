#pragma once

// Closed-form expression trees for prepotentials and parametric solutions.
// Trees are immutable and share subtrees; evaluation is pure.

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "wdvv/jet.hpp"

namespace wdvv {

class Expr {
 public:
  enum class Kind { var, constant, add, mul, pow, log, exp };

  static Expr var(std::size_t index);
  static Expr constant(Scalar value);

  Kind kind() const { return node_->kind; }
  std::size_t var_index() const { return node_->index; }
  Scalar const_value() const { return node_->value; }
  double exponent() const { return node_->exponent; }
  const Expr& lhs() const { return node_->args[0]; }
  const Expr& rhs() const { return node_->args[1]; }
  const Expr& arg() const { return node_->args[0]; }

  /// One more than the largest variable index used (0 for constants).
  std::size_t arity() const;
  std::string to_string() const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr pow(const Expr& a, double r);
  friend Expr log(const Expr& a);
  friend Expr exp(const Expr& a);

 private:
  struct Node {
    Kind kind;
    std::size_t index = 0;
    Scalar value{};
    double exponent = 1.0;
    std::vector<Expr> args;
  };
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Expr make(Kind k, std::vector<Expr> args, double exponent = 1.0);

  std::shared_ptr<const Node> node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator-(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator+(const Expr& a, double b);
Expr operator+(double a, const Expr& b);
Expr operator-(const Expr& a, double b);
Expr operator-(double a, const Expr& b);
Expr operator*(double a, const Expr& b);
Expr operator*(const Expr& a, double b);
Expr operator/(const Expr& a, double b);
Expr operator/(double a, const Expr& b);
Expr pow(const Expr& a, double r);
Expr log(const Expr& a);
Expr exp(const Expr& a);

/// Jet of e at point, truncated at order. Domain violations are reported as
/// DomainError whose message names the offending node path (e.g.
/// "/add[1]/mul[0]/log").
Jet eval_expr(const Expr& e, std::span<const Scalar> point, std::size_t order, const JetOptions& opts = {});
Jet eval_expr(const Expr& e, std::span<const double> point, std::size_t order, const JetOptions& opts = {});

/// Plain scalar evaluation along an independent code path (no jets).
Scalar eval_scalar(const Expr& e, std::span<const Scalar> point, const JetOptions& opts = {});

}  // namespace wdvv
