#include "wdvv/wdvv_core.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "wdvv/errors.hpp"

namespace wdvv {

FlatMetric::FlatMetric(Eigen::MatrixXd eta) : eta_(std::move(eta)) {
  if (eta_.rows() == 0 || eta_.rows() != eta_.cols()) throw ShapeError("flat metric must be a non-empty square matrix");
  const double scale = std::max(1.0, eta_.cwiseAbs().maxCoeff());
  if ((eta_ - eta_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) throw DegenerateError("flat metric is not symmetric");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(eta_);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  if (smin == 0.0 || sv(0) / smin > kMaxCondition) throw DegenerateError("flat metric is degenerate (condition number above 1e12)");
  eta_inv_ = eta_.inverse();
}

FlatMetric FlatMetric::antidiagonal(std::size_t n) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t a = 0; a < n; ++a) m(a, n - 1 - a) = 1.0;
  return FlatMetric(m);
}

FlatMetric FlatMetric::first_plus_antidiagonal(std::size_t n) {
  if (n < 2) throw ShapeError("first_plus_antidiagonal needs n >= 2");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  m(0, 0) = 1.0;
  for (std::size_t a = 1; a < n; ++a) m(a, n - a) = 1.0;
  return FlatMetric(m);
}

void EulerData::validate(double tol) const {
  if (d.size() != r.size()) throw ShapeError("Euler data: d and r differ in length");
  for (std::size_t a = 0; a < d.size(); ++a) {
    if (std::abs(d[a] * r[a]) > tol) throw ConfigError("Euler data: d_a * r_a must vanish");
  }
  if (mu) {
    if (mu->size() != d.size()) throw ShapeError("Euler data: mu has the wrong length");
    for (std::size_t a = 0; a < d.size(); ++a) {
      if (std::abs(d[a] - (1.0 + (*mu)[0] - (*mu)[a])) > tol) throw ConfigError("Euler data: d_a != 1 + mu_1 - mu_a");
    }
  }
}

EulerData EulerData::from_mu(std::vector<double> mu, double d_F) {
  EulerData e;
  e.d.resize(mu.size());
  for (std::size_t a = 0; a < mu.size(); ++a) e.d[a] = 1.0 + mu[0] - mu[a];
  e.r.assign(mu.size(), 0.0);
  e.d_F = d_F;
  e.mu = std::move(mu);
  return e;
}

double StructureTensor::max_abs() const {
  double m = 0.0;
  for (const auto& v : c_) m = std::max(m, std::abs(v));
  return m;
}

double StructureTensor::symmetry_defect() const {
  double worst = 0.0;
  for (std::size_t a = 0; a < n_; ++a) {
    for (std::size_t b = 0; b < n_; ++b) {
      for (std::size_t c = 0; c < n_; ++c) {
        std::array<std::size_t, 3> idx{a, b, c};
        const Scalar ref = (*this)(a, b, c);
        std::sort(idx.begin(), idx.end());
        do {
          worst = std::max(worst, std::abs(ref - (*this)(idx[0], idx[1], idx[2])));
        } while (std::next_permutation(idx.begin(), idx.end()));
      }
    }
  }
  return worst;
}

double StructureTensor::max_diff(const StructureTensor& other) const {
  if (other.n_ != n_) throw ShapeError("structure tensors differ in dimension");
  double m = 0.0;
  for (std::size_t k = 0; k < c_.size(); ++k) m = std::max(m, std::abs(c_[k] - other.c_[k]));
  return m;
}

StructureTensor StructureTensor::scaled(double factor) const {
  StructureTensor t = *this;
  for (auto& v : t.c_) v *= factor;
  return t;
}

StructureTensor tensor_from_jet(const Jet& j) {
  if (j.order() < 3) throw ShapeError("third partials need a jet of order >= 3");
  const std::size_t n = j.nvars();
  StructureTensor t(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t c = 0; c < n; ++c) {
        std::vector<unsigned> e(n, 0);
        ++e[a];
        ++e[b];
        ++e[c];
        t(a, b, c) = j.partial(MultiIndex(std::move(e)));
      }
    }
  }
  return t;
}

StructureTensor third_tensor(const Expr& F, std::span<const Scalar> point, const JetOptions& opts) {
  return tensor_from_jet(eval_expr(F, point, 3, opts));
}

StructureTensor third_tensor(const Expr& F, std::span<const double> point, const JetOptions& opts) {
  return tensor_from_jet(eval_expr(F, point, 3, opts));
}

namespace {

double relative_to(double abs, double scale) { return abs / std::max(1.0, scale); }

}  // namespace

Residual associativity_residual(const StructureTensor& c, const FlatMetric& eta) {
  const std::size_t n = c.dim();
  if (eta.dim() != n) throw ShapeError("structure tensor and metric differ in dimension");
  const auto& ginv = eta.eta_inv();
  // raised(a,b,g) = sum_d c_{abd} eta^{dg}
  std::vector<Scalar> raised(n * n * n, Scalar{});
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t g = 0; g < n; ++g) {
        Scalar s{};
        for (std::size_t d = 0; d < n; ++d) s += c(a, b, d) * ginv(d, g);
        raised[(a * n + b) * n + g] = s;
      }
  double worst = 0.0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t w = 0; w < n; ++w)
        for (std::size_t r = 0; r < n; ++r) {
          Scalar lhs{}, rhs{};
          for (std::size_t g = 0; g < n; ++g) {
            lhs += raised[(a * n + b) * n + g] * c(g, w, r);
            rhs += raised[(a * n + w) * n + g] * c(g, b, r);
          }
          worst = std::max(worst, std::abs(lhs - rhs));
        }
  const double scale = c.max_abs();
  return {worst, relative_to(worst, scale * scale)};
}

Residual normalization_residual(const StructureTensor& c, const FlatMetric& eta) {
  const std::size_t n = c.dim();
  if (eta.dim() != n) throw ShapeError("structure tensor and metric differ in dimension");
  double worst = 0.0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) worst = std::max(worst, std::abs(c(0, a, b) - eta.eta()(a, b)));
  return {worst, relative_to(worst, c.max_abs())};
}

Residual quasi_homogeneity_residual(const Expr& F, const EulerData& e, std::span<const Scalar> point,
                                    const JetOptions& opts) {
  const std::size_t n = point.size();
  if (e.d.size() != n || e.r.size() != n) throw ShapeError("Euler data dimension does not match the point");
  e.validate();
  const Jet f4 = eval_expr(F, point, 4, opts);
  Jet g = f4.truncated(3) * (-e.d_F);
  for (std::size_t a = 0; a < n; ++a) {
    Jet coeff = Jet::variable(a, point[a], n, 3) * e.d[a] + e.r[a];
    g += coeff * f4.derivative(a);
  }
  const StructureTensor t = tensor_from_jet(g);
  return {t.max_abs(), relative_to(t.max_abs(), tensor_from_jet(f4.truncated(3)).max_abs())};
}

Residual quasi_homogeneity_residual(const Expr& F, const EulerData& e, std::span<const double> point,
                                    const JetOptions& opts) {
  std::vector<Scalar> p(point.begin(), point.end());
  return quasi_homogeneity_residual(F, e, std::span<const Scalar>(p), opts);
}

}  // namespace wdvv
