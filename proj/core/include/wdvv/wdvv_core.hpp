#pragma once

// The three defining conditions of a Frobenius prepotential: associativity,
// normalization against a flat metric, and quasi-homogeneity under an Euler
// field. All checks are pointwise and built on jets.

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "wdvv/expr.hpp"
#include "wdvv/jet.hpp"

namespace wdvv {

/// Constant non-degenerate symmetric metric and its inverse.
class FlatMetric {
 public:
  static constexpr double kMaxCondition = 1e12;

  /// Throws DegenerateError when eta is not symmetric or its condition
  /// number exceeds kMaxCondition.
  explicit FlatMetric(Eigen::MatrixXd eta);

  /// delta_{a+b = n-1}: ones on the antidiagonal.
  static FlatMetric antidiagonal(std::size_t n);
  /// 1 in the (0,0) slot, antidiagonal on the rest; the metric of the
  /// three-variable rational model in (x1, x2, x3) labeling.
  static FlatMetric first_plus_antidiagonal(std::size_t n);

  std::size_t dim() const { return static_cast<std::size_t>(eta_.rows()); }
  const Eigen::MatrixXd& eta() const { return eta_; }
  const Eigen::MatrixXd& eta_inv() const { return eta_inv_; }

 private:
  Eigen::MatrixXd eta_;
  Eigen::MatrixXd eta_inv_;
};

/// Weights of E = sum_a (d_a x^a + r_a) d_a and the degree of F.
struct EulerData {
  std::vector<double> d;
  std::vector<double> r;
  double d_F = 0.0;
  std::optional<std::vector<double>> mu;

  /// Checks d_a r_a = 0 and, with mu present, d_a = 1 + mu_1 - mu_a.
  void validate(double tol = 1e-12) const;
  /// Weights read off mu: d_a = 1 + mu_1 - mu_a, r = 0.
  static EulerData from_mu(std::vector<double> mu, double d_F);
};

/// c_{abc} at one point.
class StructureTensor {
 public:
  StructureTensor() = default;
  explicit StructureTensor(std::size_t n) : n_(n), c_(n * n * n) {}

  std::size_t dim() const { return n_; }
  Scalar& operator()(std::size_t a, std::size_t b, std::size_t c) { return c_[(a * n_ + b) * n_ + c]; }
  Scalar operator()(std::size_t a, std::size_t b, std::size_t c) const { return c_[(a * n_ + b) * n_ + c]; }

  double max_abs() const;
  /// Largest |c_abc - c_perm(abc)| over all index permutations.
  double symmetry_defect() const;
  /// max |this - other| entrywise.
  double max_diff(const StructureTensor& other) const;
  /// Every entry multiplied by (1 + eps); negative controls use this.
  StructureTensor scaled(double factor) const;

 private:
  std::size_t n_ = 0;
  std::vector<Scalar> c_;
};

/// Absolute residual and the same value divided by the largest |c| entry
/// (or 1 if that is smaller than 1), so rescaling cannot hide a failure.
struct Residual {
  double absolute = 0.0;
  double relative = 0.0;
};

StructureTensor third_tensor(const Expr& F, std::span<const Scalar> point, const JetOptions& opts = {});
StructureTensor third_tensor(const Expr& F, std::span<const double> point, const JetOptions& opts = {});

Residual associativity_residual(const StructureTensor& c, const FlatMetric& eta);
Residual normalization_residual(const StructureTensor& c, const FlatMetric& eta);
/// Max |third partial| of G = sum_a (d_a x^a + r_a) dF/dx^a - d_F F.
Residual quasi_homogeneity_residual(const Expr& F, const EulerData& e, std::span<const Scalar> point,
                                    const JetOptions& opts = {});
Residual quasi_homogeneity_residual(const Expr& F, const EulerData& e, std::span<const double> point,
                                    const JetOptions& opts = {});

/// Third partials of a jet of order >= 3, packaged as a tensor.
StructureTensor tensor_from_jet(const Jet& j);

}  // namespace wdvv
