#include "wdvv/n3_top.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <ostream>

#include "wdvv/errors.hpp"

namespace wdvv {

namespace {

template <class T>
T cube(const T& t) {
  return t * t * t;
}

// The omega parametrization of the algebraic branch, generic over scalars
// and univariate jets.
template <class T>
struct Branch {
  T s, y, q;
  std::array<T, 3> a, omega_sq, h_sq;
};

template <class T>
Branch<T> branch_of(const T& w) {
  const T w2 = w * w;
  const T d = w2 + 3.0;
  Branch<T> b;
  b.a = {4.0 / d, (w + 1.0) * (w + 1.0) / d, (w - 1.0) * (w - 1.0) / d};
  b.s = cube(w - 3.0) * (w + 1.0) / (cube(w + 3.0) * (w - 1.0));
  b.y = (w - 3.0) * (w - 3.0) * (w + 1.0) / ((w + 3.0) * d);
  b.q = 4.0 * (w2 - 1.0) * (w2 - 1.0) / cube(d);
  b.omega_sq = {-(w2 - 1.0) / (4.0 * (w2 - 9.0)), (w + 1.0) / (4.0 * w * (w - 3.0)),
                -(w - 1.0) / (4.0 * w * (w + 3.0))};
  const std::array<T, 3> labeled{b.a[0], b.a[2], b.a[1]};
  for (std::size_t i = 0; i < 3; ++i) b.h_sq[i] = (labeled[i] - 1.0) / (3.0 * labeled[i] - 1.0);
  return b;
}

void check_omega(Scalar w) {
  for (double bad : {0.0, 1.0, -1.0, 3.0, -3.0}) {
    if (std::abs(w - bad) < 1e-9) throw DomainError(fmt::format("omega = {} is excluded from the branch", bad));
  }
}

// curve parametrization by x = (omega - 3)/(omega + 3)
template <class T>
T curve_y(const T& x) {
  return x * x * (x + 2.0) / (x * x + x + 1.0);
}
template <class T>
T curve_s(const T& x) {
  return cube(x) * (x + 2.0) / (2.0 * x + 1.0);
}

const MultiIndex kD1{1};
const MultiIndex kD2{2};

struct CurveDerivs {
  Scalar y, s, dy, d2y;  // d/ds
};

CurveDerivs curve_derivs(Scalar x, double y_scale) {
  const Jet X = Jet::variable(0, x, 1, 2);
  const Jet Y = y_scale * curve_y(X);
  const Jet S = curve_s(X);
  const Scalar y1 = Y.partial(kD1), y2 = Y.partial(kD2), s1 = S.partial(kD1), s2 = S.partial(kD2);
  if (std::abs(s1) < 1e-12) throw DegenerateError("s'(x) vanishes: branch point of the curve");
  return {Y.value(), S.value(), y1 / s1, (y2 * s1 - y1 * s2) / (s1 * s1 * s1)};
}

double casimir_drift(const Trajectory& t, Scalar c0) {
  double worst = 0.0;
  for (const auto& y : t.y) worst = std::max(worst, std::abs(y.cwiseProduct(y).sum() - c0));
  return worst;
}

}  // namespace

Triple euler_top_rhs(Scalar s, const Triple& w) {
  if (std::abs(s) < 1e-12 || std::abs(s - 1.0) < 1e-12) throw DomainError("Euler top is singular at s = 0, 1");
  return {w[1] * w[2] / s, w[0] * w[2] / (s * (s - 1.0)), w[0] * w[1] / (1.0 - s)};
}

Triple TopTrajectory::omega(std::size_t node) const {
  const auto& y = path.y.at(node);
  return {y(0), y(1), y(2)};
}

Triple TopTrajectory::omega_at(double t) const {
  const OdeState y = path.at(t);
  return {y(0), y(1), y(2)};
}

namespace {

std::string fmt_complex(Scalar z) { return fmt::format("({:.6g}{:+.6g}i)", z.real(), z.imag()); }

double distance_to_segment(Scalar p, Scalar a, Scalar b) {
  const Scalar d = b - a;
  const double len2 = std::norm(d);
  const double t = len2 > 0 ? std::clamp(std::real((p - a) * std::conj(d)) / len2, 0.0, 1.0) : 0.0;
  return std::abs(p - (a + t * d));
}

TopTrajectory integrate_segment(Scalar origin, Scalar direction, double t0, double t1, const Triple& w0,
                                const OdeOptions& opts) {
  const Scalar a = origin + direction * t0, b = origin + direction * t1;
  for (double sing : {0.0, 1.0}) {
    if (distance_to_segment(sing, a, b) <= 1e-6) {
      throw DomainError(fmt::format("path from {} to {} passes within 1e-6 of the singular point s = {}",
                                    fmt_complex(a), fmt_complex(b), sing));
    }
  }
  OdeState y0(3);
  y0 << w0[0], w0[1], w0[2];
  auto rhs = [origin, direction](double t, const OdeState& y) {
    const Triple d = euler_top_rhs(origin + direction * t, {y(0), y(1), y(2)});
    OdeState out(3);
    out << direction * d[0], direction * d[1], direction * d[2];
    return out;
  };
  TopTrajectory t;
  t.origin = origin;
  t.direction = direction;
  t.path = integrate(rhs, t0, y0, t1, opts);
  t.casimir0 = y0.cwiseProduct(y0).sum();
  t.casimir_drift = casimir_drift(t.path, t.casimir0);
  return t;
}

}  // namespace

TopTrajectory integrate_top(double s0, const Triple& w0, double s_end, const OdeOptions& opts) {
  return integrate_segment(0.0, 1.0, s0, s_end, w0, opts);
}

TopTrajectory integrate_top(Scalar s0, const Triple& w0, Scalar s_end, const OdeOptions& opts) {
  const double len = std::abs(s_end - s0);
  if (len == 0.0) throw DomainError("empty integration segment");
  return integrate_segment(s0, (s_end - s0) / len, 0.0, len, w0, opts);
}

void write_trajectory_csv(const TopTrajectory& t, std::ostream& out) {
  out << "s_re,s_im,w1_re,w1_im,w2_re,w2_im,w3_re,w3_im,casimir_re,casimir_im\n";
  for (std::size_t k = 0; k < t.path.size(); ++k) {
    const auto& y = t.path.y[k];
    const Scalar c = y.cwiseProduct(y).sum();
    const Scalar s = t.s(k);
    out << fmt::format("{:.17g},{:.17g}", s.real(), s.imag());
    for (Eigen::Index i = 0; i < 3; ++i) out << fmt::format(",{:.17g},{:.17g}", y(i).real(), y(i).imag());
    out << fmt::format(",{:.17g},{:.17g}\n", c.real(), c.imag());
  }
}

HitchinPoint hitchin_branch(Scalar omega, Scalar x3) {
  check_omega(omega);
  const auto b = branch_of(omega);
  HitchinPoint p;
  p.omega = omega;
  p.x = x_from_omega(omega);
  p.s = b.s;
  p.y = b.y;
  p.q = b.q;
  p.a = b.a;
  p.omega_sq = b.omega_sq;
  p.h_sq = b.h_sq;
  p.u_diff = 8.0 * x3 * x3 * cube(omega) / ((omega * omega + 3.0) * (omega * omega + 3.0));
  return p;
}

Scalar omega_from_x(Scalar x) {
  if (std::abs(x - 1.0) < 1e-14) throw DomainError("x = 1 corresponds to omega = infinity");
  return 3.0 * (1.0 + x) / (1.0 - x);
}

Scalar x_from_omega(Scalar omega) {
  if (std::abs(omega + 3.0) < 1e-14) throw DomainError("omega = -3 has no x");
  return (omega - 3.0) / (omega + 3.0);
}

Scalar omega_on_branch(Scalar s, Scalar guess) {
  Scalar w = guess;
  for (int it = 0; it < 50; ++it) {
    check_omega(w);
    const Jet W = Jet::variable(0, w, 1, 1);
    const Jet S = branch_of(W).s;
    const Scalar ds = S.partial(kD1);
    if (std::abs(ds) < 1e-14) throw DegenerateError("ds/domega vanishes during branch continuation");
    const Scalar step = (S.value() - s) / ds;
    // near s = 1 ds/domega is small and roundoff in s keeps the step from
    // shrinking further, so a residual at roundoff level also counts
    const bool at_roundoff = std::abs(S.value() - s) <= 1e-15 * std::max(1.0, std::abs(s));
    w -= step;
    if (at_roundoff || std::abs(step) < 1e-15 * std::max(1.0, std::abs(w))) return w;
  }
  throw ConvergenceError("Newton for omega(s) did not converge");
}

SignChoice euler_top_signs(Scalar omega) {
  check_omega(omega);
  const Jet W = Jet::variable(0, omega, 1, 1);
  const auto b = branch_of(W);
  const Scalar ds = b.s.partial(kD1);
  const Scalar s = b.s.value();
  SignChoice best;
  best.residual = std::numeric_limits<double>::infinity();
  for (int mask = 0; mask < 8; ++mask) {
    std::array<int, 3> sg{};
    Triple w{};
    Triple dw{};
    for (std::size_t k = 0; k < 3; ++k) {
      sg[k] = (mask >> k) & 1 ? -1 : 1;
      w[k] = static_cast<double>(sg[k]) * principal_sqrt(b.omega_sq[k].value());
      dw[k] = b.omega_sq[k].partial(kD1) / ds / (2.0 * w[k]);
    }
    const Scalar d01 = w[1] * w[2] / s, d1 = w[0] * w[2] / (s * (s - 1.0)), d2 = w[0] * w[1] / (1.0 - s);
    const double r = std::max({std::abs(dw[0] - d01), std::abs(dw[1] - d1), std::abs(dw[2] - d2)});
    if (r < best.residual) {
      best.residual = r;
      best.signs = sg;
    }
  }
  double scale = 1.0;
  for (const auto& o : b.omega_sq) scale = std::max(scale, std::abs(o.partial(kD1) / ds));
  best.found = best.residual < 1e-8 * scale;
  return best;
}

Triple hitchin_top_state(Scalar omega, const SignChoice& signs) {
  const auto b = branch_of(omega);
  Triple w{};
  for (std::size_t k = 0; k < 3; ++k) w[k] = static_cast<double>(signs.signs[k]) * principal_sqrt(b.omega_sq[k]);
  return w;
}

namespace {

// omega(s_to) continued from omega(s_from) = w, halving the step when Newton
// fails (it is poorly conditioned close to s = 1).
Scalar continue_omega(Scalar s_from, Scalar s_to, Scalar w) {
  for (int pieces = 1; pieces <= 1024; pieces *= 2) {
    try {
      Scalar v = w;
      for (int i = 1; i <= pieces; ++i) v = omega_on_branch(s_from + (s_to - s_from) * (double(i) / pieces), v);
      return v;
    } catch (const ConvergenceError&) {
    } catch (const DomainError&) {
    }
  }
  throw ConvergenceError("branch continuation of omega(s) failed");
}

}  // namespace

double branch_tracking_residual(const TopTrajectory& t, Scalar omega0) {
  Scalar w = omega0;
  double worst = 0.0;
  for (std::size_t k = 0; k < t.path.size(); ++k) {
    w = k == 0 ? omega_on_branch(t.s(0), w) : continue_omega(t.s(k - 1), t.s(k), w);
    const auto b = branch_of(w);
    const auto y = t.path.y[k];
    for (Eigen::Index i = 0; i < 3; ++i) worst = std::max(worst, std::abs(y(i) * y(i) - b.omega_sq[i]));
  }
  return worst;
}

double painleve6_residual(Scalar x, double y_scale) {
  const auto c = curve_derivs(x, y_scale);
  const Scalar y = c.y, s = c.s, yp = c.dy;
  const Scalar rhs = 0.5 * (1.0 / y + 1.0 / (y - 1.0) + 1.0 / (y - s)) * yp * yp -
                     (1.0 / s + 1.0 / (s - 1.0) + 1.0 / (y - s)) * yp +
                     y * (y - 1.0) * (y - s) / (s * s * (s - 1.0) * (s - 1.0)) *
                         (0.125 - s / (8.0 * y * y) + (s - 1.0) / (8.0 * (y - 1.0) * (y - 1.0)) +
                          3.0 * s * (s - 1.0) / (8.0 * (y - s) * (y - s)));
  return std::abs(c.d2y - rhs);
}

HitchinRelations hitchin_relations(Scalar x) {
  const auto c = curve_derivs(x, 1.0);
  const Scalar y = c.y, s = c.s;
  HitchinRelations r;
  r.v = 0.5 * (c.dy * s * (s - 1.0) / (y * (y - 1.0) * (y - s)) + 1.0 / (2.0 * y) + 1.0 / (2.0 * (y - 1.0)) -
               1.0 / (2.0 * (y - s)));
  r.factors = {r.v - 1.0 / (2.0 * y), r.v - 1.0 / (2.0 * (y - 1.0)), r.v - 1.0 / (2.0 * (y - s))};
  const auto& [fy, f1, fs] = r.factors;
  r.omega_sq = {-(y - s) * y * y * (y - 1.0) / s * fs * f1, (y - s) * (y - s) * y * (y - 1.0) / (s * (1.0 - s)) * f1 * fy,
                -(y - s) * y * (y - 1.0) * (y - 1.0) / (1.0 - s) * fy * fs};
  const auto b = branch_of(omega_from_x(x));
  for (std::size_t k = 0; k < 3; ++k) r.residual = std::max(r.residual, std::abs(r.omega_sq[k] - b.omega_sq[k]));
  return r;
}

LameReport lame_ode_check(Scalar omega) {
  check_omega(omega);
  const Jet X = Jet::variable(0, x_from_omega(omega), 1, 1);
  const Jet W = 3.0 * (1.0 + X) / (1.0 - X);
  const auto b = branch_of(W);
  const Scalar s = b.s.value(), ds = b.s.partial(kD1);
  if (std::abs(ds) < 1e-12) throw DegenerateError("s'(x) vanishes: branch point of the curve");
  std::array<Scalar, 3> dh{};
  for (std::size_t i = 0; i < 3; ++i) dh[i] = b.h_sq[i].partial(kD1) / ds;
  LameReport r;
  r.lhs = {s * dh[0], (s - 1.0) * s * dh[1], (1.0 - s) * dh[2]};
  r.lhs_spread = std::max(std::abs(r.lhs[0] - r.lhs[1]), std::abs(r.lhs[0] - r.lhs[2]));
  // -2i R / sqrt(eta_11) h1 h2 h3 with R = 1/2, eta_11 = 1
  const std::array<Scalar, 3> h{principal_sqrt(b.h_sq[0].value()), principal_sqrt(b.h_sq[1].value()),
                                principal_sqrt(b.h_sq[2].value())};
  r.rhs_residual = std::numeric_limits<double>::infinity();
  for (int mask = 0; mask < 8; ++mask) {
    std::array<int, 3> sg{};
    Scalar prod = Scalar(0, -1);
    for (std::size_t i = 0; i < 3; ++i) {
      sg[i] = (mask >> i) & 1 ? -1 : 1;
      prod *= static_cast<double>(sg[i]) * h[i];
    }
    const double res = std::abs(r.lhs[0] - prod);
    if (res < r.rhs_residual) {
      r.rhs_residual = res;
      r.signs = sg;
    }
  }
  r.branch_found = r.rhs_residual < 1e-8 * std::max(1.0, std::abs(r.lhs[0]));
  for (std::size_t i = 0; i < 3; ++i) {
    r.omega_h_residual = std::max(r.omega_h_residual, std::abs(b.omega_sq[i].value() + 0.25 * b.h_sq[i].value()));
  }
  return r;
}

Scalar log_tau_n3(Scalar x2, Scalar x3) {
  const Jet j = log_tau_n3(Jet::variable(0, x2, 2, 0), Jet::variable(1, x3, 2, 0));
  return j.value();
}

Jet log_tau_n3(const Jet& x2, const Jet& x3) {
  const Jet q = x2 / cube(x3);
  try {
    return 0.25 * log(x3 * x3) + log(cube(q) * (27.0 * q - 4.0)) / 24.0;
  } catch (const DomainError& e) {
    throw DomainError(std::string("log tau: ") + e.what());
  }
}

double tau_euler_residual(Scalar x2, Scalar x3) {
  const Jet t = log_tau_n3(Jet::variable(0, x2, 2, 1), Jet::variable(1, x3, 2, 1));
  const Scalar e = 1.5 * x2 * t.partial(MultiIndex{1, 0}) + 0.5 * x3 * t.partial(MultiIndex{0, 1});
  return std::abs(e - 0.25);
}

double tau_x3_residual(Scalar x2, Scalar x3) {
  const Jet t = log_tau_n3(Jet::variable(0, x2, 2, 1), Jet::variable(1, x3, 2, 1));
  const Scalar q = x2 / cube(x3);
  return std::abs(x3 * t.partial(MultiIndex{0, 1}) - 0.125 / (1.0 - 6.75 * q));
}

double tau_branch_spread(std::span<const Scalar> omegas, Scalar x3) {
  std::vector<Scalar> ratios;
  for (auto w : omegas) {
    const auto p = hitchin_branch(w, x3);
    const Scalar lhs = std::pow(x3, 12) * cube(p.q) * (27.0 * p.q - 4.0);
    const Scalar rhs = std::pow(p.u_diff, 6) * std::pow(w - 1.0, 6) * std::pow(w + 1.0, 6) * std::pow(w - 3.0, 2) *
                       std::pow(w + 3.0, 2) * std::pow(w, -16);
    ratios.push_back(lhs / rhs);
  }
  if (ratios.empty()) return 0.0;
  double worst = 0.0;
  for (auto r : ratios) worst = std::max(worst, std::abs(r - ratios.front()) / std::abs(ratios.front()));
  return worst;
}

TauCrossCheck tau_cross_check(const CanonicalChart& chart) {
  if (chart.n != 1 || chart.m != 1) throw ShapeError("tau cross-check is for the n = m = 1 model");
  const Scalar x2 = chart.chart_point[1], x3 = chart.chart_point[2];
  const Jet t = log_tau_n3(Jet::variable(0, x2, 2, 1), Jet::variable(1, x3, 2, 1));
  const Scalar d2 = t.partial(MultiIndex{1, 0}), d3 = t.partial(MultiIndex{0, 1});
  TauCrossCheck r;
  double scale = 0.0;
  std::array<Scalar, 3> lhs{}, rhs{};
  for (std::size_t j = 0; j < 3; ++j) {
    lhs[j] = chart.dx_du(1, j) * d2 + chart.dx_du(2, j) * d3;
    for (std::size_t i = 0; i < 3; ++i) rhs[j] += chart.beta(i, j) * chart.beta(i, j) * (chart.u[i] - chart.u[j]);
    scale = std::max(scale, std::abs(rhs[j]));
    r.identity += lhs[j];
    r.euler += chart.u[j] * lhs[j];
  }
  for (std::size_t j = 0; j < 3; ++j) r.relative = std::max(r.relative, std::abs(lhs[j] - rhs[j]) / std::max(scale, 1e-300));
  return r;
}

}  // namespace wdvv
