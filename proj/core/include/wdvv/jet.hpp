#pragma once

// Multivariate truncated Taylor expansions ("jets") over complex scalars.
//
// A jet of order K in n variables at a point p stores the Taylor coefficients
// f_k = (d^k f)(p) / k! for every multi-index k with |k| <= K. Arithmetic on
// jets is the truncated Cauchy product, so every partial derivative up to
// order K of any composite expression is exact up to roundoff.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace wdvv {

using Scalar = std::complex<double>;

/// Principal square root with a negative zero imaginary part treated as +0,
/// so that values computed along different code paths land on the same side
/// of the cut along the negative real axis.
inline Scalar principal_sqrt(Scalar z) { return std::sqrt(Scalar(z.real() + 0.0, z.imag() + 0.0)); }

/// Exponent vector of a monomial, one entry per variable.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<unsigned> exponents) : exps_(std::move(exponents)) {}
  MultiIndex(std::initializer_list<unsigned> exponents) : exps_(exponents) {}

  static MultiIndex zero(std::size_t nvars) { return MultiIndex(std::vector<unsigned>(nvars, 0)); }
  static MultiIndex unit(std::size_t nvars, std::size_t var);

  std::size_t size() const { return exps_.size(); }
  unsigned operator[](std::size_t i) const { return exps_[i]; }
  unsigned degree() const;
  /// Product of factorials of the entries.
  double factorial() const;
  const std::vector<unsigned>& exponents() const { return exps_; }

  MultiIndex operator+(const MultiIndex& other) const;
  bool operator==(const MultiIndex&) const = default;

  std::string to_string() const;

 private:
  std::vector<unsigned> exps_;
};

/// Fixed enumeration of all monomials of degree <= order in nvars variables,
/// graded by total degree. Layouts are immutable and shared between jets.
class JetLayout {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  static std::shared_ptr<const JetLayout> get(std::size_t nvars, std::size_t order);

  std::size_t nvars() const { return nvars_; }
  std::size_t order() const { return order_; }
  std::size_t size() const { return monomials_.size(); }

  const MultiIndex& monomial(std::size_t k) const { return monomials_[k]; }
  unsigned degree(std::size_t k) const { return degrees_[k]; }
  /// Position of a monomial, or npos if its degree exceeds the order.
  std::size_t index_of(const MultiIndex& m) const;
  /// Position of monomial(k) + e_var, or npos if out of range.
  std::size_t raised(std::size_t k, std::size_t var) const { return raised_[k * nvars_ + var]; }

  struct Product {
    std::uint32_t lhs, rhs, out;
  };
  /// Every (i, j) pair whose monomial product stays within the order.
  std::span<const Product> products() const { return products_; }

  JetLayout(std::size_t nvars, std::size_t order);

 private:
  std::uint64_t encode(const MultiIndex& m) const;

  std::size_t nvars_;
  std::size_t order_;
  std::vector<MultiIndex> monomials_;
  std::vector<unsigned> degrees_;
  std::vector<std::size_t> raised_;
  std::vector<Product> products_;
  std::vector<std::pair<std::uint64_t, std::size_t>> lookup_;  // sorted by code
};

/// Tolerances that govern the domain checks of the transcendental jet ops.
struct JetOptions {
  /// Arguments of log / non-integer pow within this relative distance of the
  /// negative real axis (or of zero) raise DomainError.
  double branch_cut_margin = 1e-12;
};

class Jet {
 public:
  Jet() = default;
  Jet(std::shared_ptr<const JetLayout> layout, std::vector<Scalar> coeffs);

  static Jet constant(Scalar value, std::size_t nvars, std::size_t order);
  static Jet constant(Scalar value, std::shared_ptr<const JetLayout> layout);
  /// Coordinate function x_index expanded at a point where x_index = value.
  static Jet variable(std::size_t index, Scalar value, std::size_t nvars, std::size_t order);

  std::size_t nvars() const { return layout_->nvars(); }
  std::size_t order() const { return layout_->order(); }
  const std::shared_ptr<const JetLayout>& layout() const { return layout_; }
  std::span<const Scalar> coeffs() const { return coeffs_; }

  Scalar value() const { return coeffs_.front(); }
  /// Taylor coefficient of the monomial; zero beyond the stored order.
  Scalar coeff(const MultiIndex& m) const;
  /// Partial derivative d^|m| f at the expansion point.
  Scalar partial(const MultiIndex& m) const;

  /// d f / d x_var, one order lower.
  Jet derivative(std::size_t var) const;
  /// Drop every coefficient above new_order.
  Jet truncated(std::size_t new_order) const;
  /// Same jet with the constant term replaced.
  Jet with_value(Scalar v) const;

  Jet& operator+=(const Jet& b);
  Jet& operator-=(const Jet& b);
  Jet& operator*=(const Jet& b);
  Jet& operator/=(const Jet& b);
  Jet& operator+=(Scalar b);
  Jet& operator-=(Scalar b);
  Jet& operator*=(Scalar b);
  Jet& operator/=(Scalar b);

  Jet operator-() const;

  /// Largest coefficient modulus.
  double max_abs() const;

 private:
  void require_same_layout(const Jet& b, const char* op) const;

  std::shared_ptr<const JetLayout> layout_;
  std::vector<Scalar> coeffs_;
};

Jet operator+(Jet a, const Jet& b);
Jet operator-(Jet a, const Jet& b);
Jet operator*(const Jet& a, const Jet& b);
Jet operator/(const Jet& a, const Jet& b);
Jet operator+(Jet a, Scalar b);
Jet operator+(Scalar a, Jet b);
Jet operator-(Jet a, Scalar b);
Jet operator-(Scalar a, const Jet& b);
Jet operator*(Jet a, Scalar b);
Jet operator*(Scalar a, Jet b);
Jet operator/(Jet a, Scalar b);
Jet operator/(Scalar a, const Jet& b);

Jet reciprocal(const Jet& a);
Jet log(const Jet& a, const JetOptions& opts = {});
Jet exp(const Jet& a);
/// Real power. Integer exponents are exact and accept any nonzero base;
/// other exponents use the principal branch.
Jet pow(const Jet& a, double r, const JetOptions& opts = {});
Jet sqrt(const Jet& a, const JetOptions& opts = {});

/// Reconstruct a jet of order K from jets (order K-1) of its gradient and
/// its value at the expansion point. Each coefficient is read from the first
/// variable present in its monomial; see gradient_curl for the consistency
/// defect this ignores.
Jet from_gradient(std::span<const Jet> gradient, Scalar value);
/// Largest mismatch between mixed partials implied by a candidate gradient.
double gradient_curl(std::span<const Jet> gradient);

// Named operations mirroring the arithmetic above, for table-driven callers.
enum class ArithOp { add, sub, mul, div };
enum class UnaryOp { log, exp, pow };

Jet jet_var(std::size_t index, Scalar value, std::size_t nvars, std::size_t order);
Jet jet_arith(ArithOp op, const Jet& a, const Jet& b);
Jet jet_unary(UnaryOp op, const Jet& a, double exponent = 1.0, const JetOptions& opts = {});
Scalar partial(const Jet& j, const MultiIndex& idx);

/// True when z sits on (or within margin of) the principal branch cut of
/// log: the closed negative real axis including zero.
bool near_branch_cut(Scalar z, double margin);

}  // namespace wdvv
