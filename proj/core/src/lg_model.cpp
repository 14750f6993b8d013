#include "wdvv/lg_model.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "wdvv/errors.hpp"
#include "wdvv/numdiff.hpp"

namespace wdvv {

namespace {

// Coefficients of W over a scalar type (Scalar, or Jet when the chart point
// itself is a jet and we want derivatives with respect to it).
template <class T>
struct Coeffs {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<T> a;  // a_0..a_{n-1}
  std::vector<T> v;  // v_1..v_{m+1}
};

Scalar inverse(const Scalar& z) { return 1.0 / z; }
Jet inverse(const Jet& z) { return reciprocal(z); }
Scalar zero_like(const Scalar&) { return 0.0; }
Jet zero_like(const Jet& j) { return Jet::constant(0.0, j.layout()); }
Scalar value_of(const Scalar& z) { return z; }
Scalar value_of(const Jet& j) { return j.value(); }

template <class T>
std::vector<T> flat_to_v_impl(std::span<const T> x) {
  if (x.empty()) throw ShapeError("flat_to_v needs at least one coordinate");
  const std::size_t m = x.size() - 1;
  std::vector<T> v;
  v.reserve(m + 1);
  for (std::size_t k = 1; k <= m; ++k) {
    const std::size_t target = (k - 1) * m + k;
    T sum = zero_like(x[0]);
    // ordered k-tuples from {1..m} summing to target
    std::vector<std::size_t> idx(k, 1);
    while (true) {
      std::size_t s = 0;
      for (auto i : idx) s += i;
      if (s == target) {
        T prod = x[idx[0] - 1];
        for (std::size_t r = 1; r < k; ++r) prod = prod * x[idx[r] - 1];
        sum = sum + prod;
      }
      std::size_t pos = 0;
      while (pos < k && idx[pos] == m) idx[pos++] = 1;
      if (pos == k) break;
      ++idx[pos];
    }
    v.push_back(sum);
  }
  v.push_back(x[m]);
  return v;
}

template <class T>
Coeffs<T> coeffs_from_chart(std::size_t n, std::size_t m, std::span<const T> x) {
  const std::size_t dim = m == 0 ? n : n + m + 1;
  if (x.size() != dim) {
    throw ShapeError("chart point for (n,m)=(" + std::to_string(n) + "," + std::to_string(m) + ") needs " +
                     std::to_string(dim) + " coordinates, got " + std::to_string(x.size()));
  }
  Coeffs<T> c;
  c.n = n;
  c.m = m;
  for (std::size_t k = 0; k < n; ++k) c.a.push_back(x[n - 1 - k]);
  if (m > 0) c.v = flat_to_v_impl<T>(x.subspan(n));
  return c;
}

Coeffs<Scalar> coeffs_of(const RationalPotential& p) { return {p.n, p.m, p.a, p.v}; }

template <class T>
T power(const T& z, std::size_t k, const T& one) {
  T r = one;
  for (std::size_t i = 0; i < k; ++i) r = r * z;
  return r;
}

template <class T>
T pole_distance(const Coeffs<T>& c, const T& z) {
  const T w = z - c.v.back();
  if (std::abs(value_of(w)) == 0.0) throw DomainError("evaluation of W at its pole");
  return w;
}

template <class T>
T W_impl(const Coeffs<T>& c, const T& z) {
  const T one = zero_like(z) + Scalar(1.0);
  T r = power(z, c.n + 1, one) * (1.0 / static_cast<double>(c.n + 1));
  for (std::size_t k = 0; k < c.n; ++k) r = r + c.a[k] * power(z, k, one);
  if (c.m > 0) {
    const T winv = inverse(pole_distance(c, z));
    T wk = one;
    for (std::size_t k = 1; k <= c.m; ++k) {
      wk = wk * winv;
      r = r + c.v[k - 1] * wk * (1.0 / static_cast<double>(k));
    }
  }
  return r;
}

template <class T>
T dW_impl(const Coeffs<T>& c, const T& z) {
  const T one = zero_like(z) + Scalar(1.0);
  T r = power(z, c.n, one);
  for (std::size_t k = 1; k < c.n; ++k) r = r + c.a[k] * power(z, k - 1, one) * static_cast<double>(k);
  if (c.m > 0) {
    const T winv = inverse(pole_distance(c, z));
    T wk = winv;
    for (std::size_t k = 1; k <= c.m; ++k) {
      wk = wk * winv;
      r = r - c.v[k - 1] * wk;
    }
  }
  return r;
}

template <class T>
T d2W_impl(const Coeffs<T>& c, const T& z) {
  const T one = zero_like(z) + Scalar(1.0);
  T r = power(z, c.n - 1, one) * static_cast<double>(c.n);
  for (std::size_t k = 2; k < c.n; ++k) {
    r = r + c.a[k] * power(z, k - 2, one) * static_cast<double>(k * (k - 1));
  }
  if (c.m > 0) {
    const T winv = inverse(pole_distance(c, z));
    T wk = winv * winv;
    for (std::size_t k = 1; k <= c.m; ++k) {
      wk = wk * winv;
      r = r + c.v[k - 1] * wk * static_cast<double>(k + 1);
    }
  }
  return r;
}

template <class T>
std::vector<T> lame_impl(const Coeffs<T>& c, const std::vector<T>& alpha) {
  std::vector<T> h(alpha.size());
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    const T one = zero_like(alpha[i]) + Scalar(1.0);
    T num = c.m > 0 ? power(alpha[i] - c.v.back(), c.m + 1, one) : one;
    T den = one;
    for (std::size_t j = 0; j < alpha.size(); ++j) {
      if (j != i) den = den * (alpha[i] - alpha[j]);
    }
    if (std::abs(value_of(den)) == 0.0) throw DegenerateError("coinciding critical points in Lame coefficient");
    h[i] = num / den;
  }
  return h;
}

std::vector<Scalar> poly_mul(const std::vector<Scalar>& p, const std::vector<Scalar>& q) {
  std::vector<Scalar> r(p.size() + q.size() - 1, Scalar{});
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
  return r;
}

// (z - c)^k, constant term first
std::vector<Scalar> shifted_power(Scalar c, std::size_t k) {
  std::vector<Scalar> r{1.0};
  for (std::size_t i = 0; i < k; ++i) r = poly_mul(r, {-c, 1.0});
  return r;
}

bool lex_less(const Scalar& a, const Scalar& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

std::vector<Scalar> match_to(const std::vector<Scalar>& roots, const std::vector<Scalar>& ref) {
  std::vector<Scalar> out(ref.size());
  std::vector<bool> used(roots.size(), false);
  for (std::size_t i = 0; i < ref.size(); ++i) {
    std::size_t best = roots.size();
    double dist = 0;
    for (std::size_t j = 0; j < roots.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(roots[j] - ref[i]);
      if (best == roots.size() || d < dist) {
        best = j;
        dist = d;
      }
    }
    used[best] = true;
    out[i] = roots[best];
  }
  return out;
}

double max_abs(const CMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

std::vector<Scalar> flat_to_v(std::span<const Scalar> x) { return flat_to_v_impl<Scalar>(x); }
std::vector<Jet> flat_to_v(std::span<const Jet> x) { return flat_to_v_impl<Jet>(x); }

RationalPotential RationalPotential::from_chart_point(std::size_t n, std::size_t m, std::span<const Scalar> x) {
  if (n == 0) throw ShapeError("polynomial degree parameter n must be at least 1");
  auto c = coeffs_from_chart<Scalar>(n, m, x);
  RationalPotential p{n, m, std::move(c.a), std::move(c.v), {x.begin(), x.end()}};
  p.validate();
  return p;
}

void RationalPotential::validate() const {
  if (n == 0) throw ShapeError("polynomial degree parameter n must be at least 1");
  if (a.size() != n) throw ShapeError("potential needs n coefficients a_0..a_{n-1}");
  if (chart.size() != chart_dim()) throw ShapeError("potential carries a chart point of the wrong dimension");
  if (m == 0) {
    if (!v.empty()) throw ShapeError("m = 0 potential has no pole part");
    return;
  }
  if (v.size() != m + 1) throw ShapeError("potential needs m+1 pole coefficients");
  if (v[m - 1] == Scalar{}) throw DegenerateError("leading pole coefficient v_m vanishes");
}

Scalar eval_W(const RationalPotential& p, Scalar z) { return W_impl(coeffs_of(p), z); }

Jet eval_W(const RationalPotential& p, const Jet& z) {
  const auto c = coeffs_of(p);
  Coeffs<Jet> cj{c.n, c.m, {}, {}};
  for (auto s : c.a) cj.a.push_back(Jet::constant(s, z.layout()));
  for (auto s : c.v) cj.v.push_back(Jet::constant(s, z.layout()));
  return W_impl(cj, z);
}

Scalar eval_dW(const RationalPotential& p, Scalar z) { return dW_impl(coeffs_of(p), z); }
Scalar eval_d2W(const RationalPotential& p, Scalar z) { return d2W_impl(coeffs_of(p), z); }

std::vector<Scalar> critical_polynomial(const RationalPotential& p) {
  p.validate();
  std::vector<Scalar> A(p.n + 1, Scalar{});
  A[p.n] = 1.0;
  for (std::size_t k = 1; k < p.n; ++k) A[k - 1] += static_cast<double>(k) * p.a[k];
  if (p.m == 0) return A;
  const Scalar c = p.pole();
  auto P = poly_mul(A, shifted_power(c, p.m + 1));
  for (std::size_t k = 1; k <= p.m; ++k) {
    const auto t = shifted_power(c, p.m - k);
    for (std::size_t i = 0; i < t.size(); ++i) P[i] -= p.v[k - 1] * t[i];
  }
  return P;
}

double normalized_discriminant(std::span<const Scalar> roots) {
  double scale = 1.0;
  for (auto r : roots) scale = std::max(scale, std::abs(r));
  double d = 1.0;
  for (std::size_t i = 0; i < roots.size(); ++i)
    for (std::size_t j = i + 1; j < roots.size(); ++j) {
      const double s = std::abs(roots[i] - roots[j]) / scale;
      d *= s * s;
    }
  return d;
}

std::vector<Scalar> critical_points(const RationalPotential& p, const CriticalPointOptions& opts) {
  const auto P = critical_polynomial(p);
  const std::size_t N = P.size() - 1;
  CMatrix companion = CMatrix::Zero(N, N);
  for (std::size_t i = 1; i < N; ++i) companion(i, i - 1) = 1.0;
  for (std::size_t i = 0; i < N; ++i) companion(i, N - 1) = -P[i];
  Eigen::ComplexEigenSolver<CMatrix> es(companion, false);
  if (es.info() != Eigen::Success) throw ConvergenceError("companion eigenvalue solver failed");
  std::vector<Scalar> roots(es.eigenvalues().data(), es.eigenvalues().data() + N);

  const double disc = normalized_discriminant(roots);
  if (disc < opts.discriminant_threshold) {
    throw DegenerateError("critical points are (nearly) multiple: normalized discriminant " + std::to_string(disc));
  }

  for (auto& r : roots) {
    for (int it = 0; it < opts.newton_steps; ++it) {
      const Scalar d2 = eval_d2W(p, r);
      if (d2 == Scalar{}) break;
      const Scalar step = eval_dW(p, r) / d2;
      r -= step;
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(r))) break;
    }
    const double scale = std::pow(std::max(1.0, std::abs(r)), static_cast<double>(p.n));
    if (std::abs(eval_dW(p, r)) > opts.residual_threshold * scale) {
      throw ConvergenceError("critical point residual above threshold after Newton polish");
    }
  }
  std::sort(roots.begin(), roots.end(), lex_less);
  return roots;
}

std::vector<Scalar> canonical_coords(const RationalPotential& p, const CriticalPointOptions& opts) {
  auto alpha = critical_points(p, opts);
  std::vector<Scalar> u;
  u.reserve(alpha.size());
  for (auto a : alpha) u.push_back(eval_W(p, a));
  return u;
}

std::vector<Expr> tangent_frame(const RationalPotential& p) {
  p.validate();
  const std::size_t N = p.chart_dim();
  std::vector<Jet> xj;
  for (std::size_t i = 0; i < N; ++i) xj.push_back(Jet::variable(i, p.chart[i], N, 1));
  const auto c = coeffs_from_chart<Jet>(p.n, p.m, std::span<const Jet>(xj));
  const Expr z = Expr::var(0);
  std::vector<Expr> frame;
  for (std::size_t alpha = 0; alpha < N; ++alpha) {
    const MultiIndex e = MultiIndex::unit(N, alpha);
    Expr t = Expr::constant(0.0);
    for (std::size_t k = 0; k < p.n; ++k) {
      const Scalar d = c.a[k].coeff(e);
      if (d == Scalar{}) continue;
      t = t + Expr::constant(d) * (k == 0 ? Expr::constant(1.0) : pow(z, static_cast<double>(k)));
    }
    if (p.m > 0) {
      const Expr w = z - Expr::constant(p.pole());
      for (std::size_t k = 1; k <= p.m; ++k) {
        const Scalar d = c.v[k - 1].coeff(e);
        if (d != Scalar{}) t = t + Expr::constant(d / static_cast<double>(k)) * pow(w, -static_cast<double>(k));
      }
      // moving the pole: d/dv_{m+1} of v_k/(k w^k) is v_k / w^{k+1}
      const Scalar dpole = c.v.back().coeff(e);
      if (dpole != Scalar{}) {
        for (std::size_t k = 1; k <= p.m; ++k) {
          t = t + Expr::constant(dpole * p.v[k - 1]) * pow(w, -static_cast<double>(k + 1));
        }
      }
    }
    frame.push_back(t);
  }
  return frame;
}

namespace {

Scalar checked_d2W(const RationalPotential& p, Scalar a, double threshold) {
  const Scalar d2 = eval_d2W(p, a);
  const double scale = std::pow(std::max(1.0, std::abs(a)), static_cast<double>(p.n - 1));
  if (std::abs(d2) < threshold * scale) throw DegenerateError("near-degenerate critical point (W'' ~ 0)");
  return d2;
}

}  // namespace

Scalar residue_pairing(const RationalPotential& p, const Expr& t1, const Expr& t2, const CriticalPointOptions& opts) {
  Scalar g{};
  for (auto a : critical_points(p, opts)) {
    const Scalar d2 = checked_d2W(p, a, 1e-10);
    const std::vector<Scalar> z{a};
    g += eval_scalar(t1, z) * eval_scalar(t2, z) / d2;
  }
  return g;
}

CMatrix residue_metric(const RationalPotential& p, const CriticalPointOptions& opts) {
  const auto frame = tangent_frame(p);
  const auto alpha = critical_points(p, opts);
  const std::size_t N = frame.size();
  CMatrix vals(alpha.size(), N);
  CVector inv_d2(alpha.size());
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    inv_d2(i) = 1.0 / checked_d2W(p, alpha[i], 1e-10);
    const std::vector<Scalar> z{alpha[i]};
    for (std::size_t a = 0; a < N; ++a) vals(i, a) = eval_scalar(frame[a], z);
  }
  return vals.transpose() * inv_d2.asDiagonal() * vals;
}

StructureTensor structure_tensor_lg(const RationalPotential& p, const CriticalPointOptions& opts) {
  const auto frame = tangent_frame(p);
  const auto alpha = critical_points(p, opts);
  const std::size_t N = frame.size();
  StructureTensor c(N);
  for (auto a : alpha) {
    const Scalar w = 1.0 / checked_d2W(p, a, 1e-10);
    const std::vector<Scalar> z{a};
    std::vector<Scalar> t(N);
    for (std::size_t k = 0; k < N; ++k) t[k] = eval_scalar(frame[k], z);
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j)
        for (std::size_t k = 0; k < N; ++k) c(i, j, k) += t[i] * t[j] * t[k] * w;
  }
  return c;
}

std::vector<Scalar> lame_coeffs(const RationalPotential& p, std::span<const Scalar> alpha) {
  return lame_impl(coeffs_of(p), std::vector<Scalar>(alpha.begin(), alpha.end()));
}

// ---------------------------------------------------------------------------
// Charts

CMatrix CanonicalChart::eta() const {
  CVector hs(size());
  for (std::size_t i = 0; i < size(); ++i) hs(i) = h_sq[i];
  return du_dx.transpose() * hs.asDiagonal() * du_dx;
}

CMatrix CanonicalChart::m_matrix() const {
  CMatrix M(size(), size());
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t a = 0; a < size(); ++a) M(i, a) = dx_du(a, i) / h[i];
  return M;
}

CanonicalChart build_chart(std::size_t n, std::size_t m, std::span<const Scalar> chart_point,
                           const CanonicalChart* reference, const ChartOptions& opts) {
  const auto p = RationalPotential::from_chart_point(n, m, chart_point);
  auto roots = critical_points(p, opts.roots);
  if (reference) {
    if (reference->n != n || reference->m != m) throw ShapeError("reference chart has a different (n, m)");
    roots = match_to(roots, reference->alpha);
  }
  const std::size_t N = roots.size();
  const std::size_t D = p.chart_dim();
  if (N != D) throw ShapeError("chart needs as many critical points as chart coordinates");
  for (auto a : roots) checked_d2W(p, a, opts.degenerate_threshold);

  // Order-1 jets in the chart coordinates. Each critical point is continued
  // by jet-valued Newton on W'(alpha; x) = 0 starting from the scalar root.
  std::vector<Jet> xj;
  for (std::size_t i = 0; i < D; ++i) xj.push_back(Jet::variable(i, chart_point[i], D, 1));
  const auto cj = coeffs_from_chart<Jet>(n, m, std::span<const Jet>(xj));
  std::vector<Jet> aj;
  for (auto r : roots) {
    Jet a = Jet::constant(r, xj[0].layout());
    for (int it = 0; it < 3; ++it) a = a - dW_impl(cj, a) / d2W_impl(cj, a);
    aj.push_back(a.with_value(r));
  }
  std::vector<Jet> uj;
  for (const auto& a : aj) uj.push_back(W_impl(cj, a));
  const auto hj = lame_impl(cj, aj);

  CanonicalChart c;
  c.n = n;
  c.m = m;
  c.chart_point.assign(chart_point.begin(), chart_point.end());
  c.alpha = roots;
  c.du_dx.resize(N, D);
  c.dhsq_dx.resize(N, D);
  for (std::size_t i = 0; i < N; ++i) {
    c.u.push_back(uj[i].value());
    c.h_sq.push_back(hj[i].value());
    for (std::size_t a = 0; a < D; ++a) {
      const MultiIndex e = MultiIndex::unit(D, a);
      c.du_dx(i, a) = uj[i].coeff(e);
      c.dhsq_dx(i, a) = hj[i].coeff(e);
    }
  }
  Eigen::FullPivLU<CMatrix> lu(c.du_dx);
  if (!lu.isInvertible() || lu.rcond() < 1e-13) throw DegenerateError("canonical coordinates are not a chart here");
  c.dx_du = lu.inverse();

  for (std::size_t i = 0; i < N; ++i) {
    if (c.h_sq[i] == Scalar{}) throw DegenerateError("vanishing Lame coefficient");
    const Scalar principal = principal_sqrt(c.h_sq[i]);
    int sign = 1;
    if (reference && std::abs(-principal - reference->h[i]) < std::abs(principal - reference->h[i])) sign = -1;
    c.h.push_back(principal * static_cast<double>(sign));
    c.branch_signs.push_back(sign);
  }
  c.beta = rotation_coeffs(c);
  return c;
}

CanonicalChart chart_along_u(const CanonicalChart& base, std::size_t k, double t, const ChartOptions& opts) {
  if (k >= base.size()) throw ShapeError("canonical direction out of range");
  std::vector<Scalar> x = base.chart_point;
  for (std::size_t a = 0; a < x.size(); ++a) x[a] += t * base.dx_du(a, k);
  return build_chart(base.n, base.m, x, &base, opts);
}

CMatrix rotation_coeffs(const CanonicalChart& c) {
  const std::size_t N = c.size();
  // d_j h_i^2 = sum_alpha dhsq_dx(i, alpha) dx_du(alpha, j)
  const CMatrix dh = c.dhsq_dx * c.dx_du;
  CMatrix beta = CMatrix::Zero(N, N);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      if (i != j) beta(i, j) = dh(i, j) / (2.0 * c.h[i] * c.h[j]);
  return beta;
}

namespace model111 {

Expr prepotential() {
  const Expr x1 = Expr::var(0), x2 = Expr::var(1), x3 = Expr::var(2);
  return x2 * x3 * x3 * x3 / 6.0 + x1 * x1 * x1 / 6.0 + x1 * x2 * x3 + 0.5 * x2 * x2 * (log(x2) - 1.5);
}

FlatMetric metric() { return FlatMetric::first_plus_antidiagonal(3); }

EulerData euler() { return {{1.0, 1.5, 0.5}, {0.0, 0.0, 0.0}, 3.0, std::nullopt}; }

namespace {
void require_111(const CanonicalChart& c) {
  if (c.n != 1 || c.m != 1) throw ShapeError("closed form only for the n = m = 1 model");
}
}  // namespace

std::vector<Scalar> h_sq(const CanonicalChart& c) {
  require_111(c);
  const Scalar x3 = c.chart_point[2];
  std::vector<Scalar> h;
  for (auto a : c.alpha) h.push_back((a - x3) / (3.0 * a - x3));
  return h;
}

CMatrix dx_du(const CanonicalChart& c) {
  require_111(c);
  const Scalar x3 = c.chart_point[2];
  CMatrix J(3, 3);
  for (std::size_t i = 0; i < 3; ++i) {
    const Scalar a = c.alpha[i];
    J(0, i) = (a - x3) / (3.0 * a - x3);
    J(1, i) = a * (a - x3) / (3.0 * a - x3);
    J(2, i) = 1.0 / (3.0 * a - x3);
  }
  return J;
}

CMatrix beta(const CanonicalChart& c) {
  require_111(c);
  const Scalar x3 = c.chart_point[2];
  CMatrix b = CMatrix::Zero(3, 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      if (i == j) continue;
      const std::size_t k = 3 - i - j;
      const Scalar ai = c.alpha[i], aj = c.alpha[j], ak = c.alpha[k];
      b(i, j) = -(ak - x3) * (3.0 * ak - x3) / ((3.0 * ai - x3) * (3.0 * aj - x3)) /
                principal_sqrt((ai - x3) * (3.0 * ai - x3) * (aj - x3) * (3.0 * aj - x3));
    }
  return b;
}

CMatrix beta_sq(const CanonicalChart& c) {
  require_111(c);
  const Scalar x3 = c.chart_point[2];
  const auto h = h_sq(c);
  CMatrix b = CMatrix::Zero(3, 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      if (i == j) continue;
      const std::size_t k = 3 - i - j;
      const Scalar dij = c.alpha[i] - c.alpha[j];
      const Scalar f = 4.0 * x3 - 3.0 * c.alpha[k];
      b(i, j) = -h[k] / (dij * dij * f * f);
    }
  return b;
}

}  // namespace model111

// ---------------------------------------------------------------------------
// Darboux-Egoroff system

double DarbouxEgoroffResidual::max() const { return std::max({rotation, translation, scaling}); }

DarbouxEgoroffResidual darboux_egoroff_residual(const UFamily& beta, std::span<const Scalar> u, double h,
                                                bool richardson) {
  const std::size_t N = u.size();
  const CMatrix b0 = beta(0, 0.0);
  if (static_cast<std::size_t>(b0.rows()) != N) throw ShapeError("beta family and u differ in dimension");
  std::vector<CMatrix> db;
  for (std::size_t k = 0; k < N; ++k) {
    db.push_back(central_derivative([&](double t) { return beta(k, t); }, h, richardson));
  }
  DarbouxEgoroffResidual r;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      if (i == j) continue;
      Scalar sum{}, euler{};
      for (std::size_t k = 0; k < N; ++k) {
        sum += db[k](i, j);
        euler += u[k] * db[k](i, j);
        if (k != i && k != j) r.rotation = std::max(r.rotation, std::abs(db[k](i, j) - b0(i, k) * b0(k, j)));
      }
      r.translation = std::max(r.translation, std::abs(sum));
      r.scaling = std::max(r.scaling, std::abs(euler + b0(i, j)));
    }
  return r;
}

double chart_step(const CanonicalChart& chart, double step) {
  double scale = 1.0, sep = -1.0;
  for (std::size_t i = 0; i < chart.size(); ++i) {
    scale = std::max(scale, std::abs(chart.u[i]));
    for (std::size_t j = i + 1; j < chart.size(); ++j) {
      const double d = std::abs(chart.u[i] - chart.u[j]);
      sep = sep < 0 ? d : std::min(sep, d);
    }
  }
  const double h = step * scale;
  if (sep >= 0 && h > 0.05 * sep) {
    throw DegenerateError("finite-difference step " + std::to_string(h) +
                          " too large for canonical coordinate separation " + std::to_string(sep));
  }
  return h;
}

UFamily chart_beta_family(const CanonicalChart& base, const ChartOptions& opts) {
  return [base, opts](std::size_t k, double t) -> CMatrix {
    if (t == 0.0) return base.beta;
    return chart_along_u(base, k, t, opts).beta;
  };
}

DarbouxEgoroffResidual darboux_egoroff_residual(const CanonicalChart& chart, double step, bool richardson) {
  return darboux_egoroff_residual(chart_beta_family(chart), chart.u, chart_step(chart, step), richardson);
}

VMatrices v_matrices(const CMatrix& beta, std::span<const Scalar> u) {
  const std::size_t N = u.size();
  if (static_cast<std::size_t>(beta.rows()) != N || static_cast<std::size_t>(beta.cols()) != N) {
    throw ShapeError("beta must be N x N");
  }
  VMatrices out;
  out.V = CMatrix::Zero(N, N);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) out.V(i, j) = (u[j] - u[i]) * beta(i, j);
  for (std::size_t j = 0; j < N; ++j) {
    CMatrix Vj = CMatrix::Zero(N, N);
    for (std::size_t k = 0; k < N; ++k)
      for (std::size_t l = 0; l < N; ++l) {
        const double d = (l == j ? 1.0 : 0.0) - (k == j ? 1.0 : 0.0);
        if (d != 0.0) Vj(k, l) = d * beta(k, l);
      }
    out.V_j.push_back(Vj);
  }
  return out;
}

VMatrices v_matrices(const CanonicalChart& chart) { return v_matrices(chart.beta, chart.u); }

double v_flow_residual(const CanonicalChart& chart, double step) {
  const double h = chart_step(chart, step);
  const auto base = v_matrices(chart);
  double worst = 0.0;
  for (std::size_t j = 0; j < chart.size(); ++j) {
    const CMatrix dV = central_derivative(
        [&](double t) -> CMatrix { return t == 0.0 ? base.V : v_matrices(chart_along_u(chart, j, t)).V; }, h);
    const CMatrix comm = base.V_j[j] * base.V - base.V * base.V_j[j];
    worst = std::max(worst, max_abs(dV - comm));
  }
  return worst;
}

IdempotentReport idempotent_check(const CanonicalChart& chart, const CMatrix& eta) {
  const std::size_t N = chart.size();
  const CMatrix M = chart.m_matrix();
  Eigen::FullPivLU<CMatrix> lu(M);
  if (!lu.isInvertible()) throw DegenerateError("m-matrix is singular");
  const CMatrix Minv = lu.inverse();
  std::vector<CMatrix> C;
  for (std::size_t j = 0; j < N; ++j) {
    CMatrix E = CMatrix::Zero(N, N);
    E(j, j) = 1.0;
    C.push_back(Minv * E * M);
  }
  IdempotentReport r;
  CMatrix sum = CMatrix::Zero(N, N);
  for (std::size_t i = 0; i < N; ++i) {
    sum += C[i];
    for (std::size_t j = 0; j < N; ++j) {
      const CMatrix d = C[i] * C[j] - (i == j ? C[i] : CMatrix::Zero(N, N));
      r.idempotent = std::max(r.idempotent, max_abs(d));
    }
  }
  r.partition = max_abs(sum - CMatrix::Identity(N, N));

  // upper-index tensor from the m-matrix, then lowered with eta
  StructureTensor up(N);
  for (std::size_t j = 0; j < N; ++j)
    for (std::size_t a = 0; a < N; ++a)
      for (std::size_t b = 0; b < N; ++b)
        for (std::size_t cc = 0; cc < N; ++cc) up(a, b, cc) += M(j, a) * M(j, b) * M(j, cc) / M(j, 0);
  StructureTensor low(N);
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = 0; b < N; ++b)
      for (std::size_t cc = 0; cc < N; ++cc) {
        Scalar s{};
        for (std::size_t a2 = 0; a2 < N; ++a2)
          for (std::size_t b2 = 0; b2 < N; ++b2)
            for (std::size_t c2 = 0; c2 < N; ++c2) s += eta(a, a2) * eta(b, b2) * eta(cc, c2) * up(a2, b2, c2);
        low(a, b, cc) = s;
      }
  r.tensor_diff = low.max_diff(structure_tensor_lg(chart.potential()));
  r.orthogonality = max_abs(M.transpose() * M - eta.inverse());
  return r;
}

MuReport mu_from_chart(const CanonicalChart& chart) {
  const CMatrix M = chart.m_matrix();
  const CMatrix Vt = M.fullPivLu().solve(v_matrices(chart).V * M);
  MuReport r;
  for (Eigen::Index a = 0; a < Vt.rows(); ++a) r.mu.push_back(Vt(a, a));
  CMatrix off = Vt;
  off.diagonal().setZero();
  r.off_diagonal = max_abs(off);
  return r;
}

std::vector<Scalar> euler_action(const CanonicalChart& chart) {
  CVector u(chart.size());
  for (std::size_t i = 0; i < chart.size(); ++i) u(i) = chart.u[i];
  const CVector e = chart.dx_du * u;
  return {e.data(), e.data() + e.size()};
}

std::vector<Scalar> identity_action(const CanonicalChart& chart) {
  const CVector e = chart.dx_du.rowwise().sum();
  return {e.data(), e.data() + e.size()};
}

std::string chart_to_json(const CanonicalChart& chart) {
  using nlohmann::ordered_json;
  auto cplx = [](Scalar z) { return ordered_json::array({z.real(), z.imag()}); };
  auto list = [&](const std::vector<Scalar>& v) {
    ordered_json a = ordered_json::array();
    for (auto z : v) a.push_back(cplx(z));
    return a;
  };
  ordered_json j;
  j["n"] = chart.n;
  j["m"] = chart.m;
  j["flat_point"] = list(chart.chart_point);
  j["alpha"] = list(chart.alpha);
  j["u"] = list(chart.u);
  j["h_sq"] = list(chart.h_sq);
  ordered_json beta = ordered_json::array();
  for (Eigen::Index i = 0; i < chart.beta.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index k = 0; k < chart.beta.cols(); ++k) row.push_back(cplx(chart.beta(i, k)));
    beta.push_back(row);
  }
  j["beta"] = beta;
  j["branch_signs"] = chart.branch_signs;
  return j.dump();
}

}  // namespace wdvv
