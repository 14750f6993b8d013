#include "wdvv/n2_family.hpp"

#include <cmath>
#include <fmt/format.h>

#include "wdvv/errors.hpp"
#include "wdvv/numdiff.hpp"

namespace wdvv {

namespace {

constexpr double kResonance = 1e-9;
constexpr double kSnap = 1e-9;
constexpr double kNear = 1e-6;

double snapped(double R, SpecialR kind) {
  switch (kind) {
    case SpecialR::half: return 0.5;
    case SpecialR::minus_half: return -0.5;
    case SpecialR::minus_three_halves: return -1.5;
    case SpecialR::generic: break;
  }
  return R;
}

SpecialR resolve(double R, Diagnostics* diag) {
  const RClass c = classify_r(R);
  if (c.near_only && diag) {
    diag->warnings.push_back(
        fmt::format("R = {:.17g} is within 1e-6 of {}; using its closed form", R, to_string(c.kind)));
  }
  return c.kind;
}

Scalar real_power(Scalar base, double r, bool allow_complex) {
  if (r == std::round(r)) {
    if (base == Scalar{} && r < 0) throw DomainError("negative power of zero");
    return std::pow(base, static_cast<int>(r));
  }
  if (!allow_complex && (base.imag() != 0.0 || base.real() <= 0.0)) {
    throw DomainError("fractional power of a non-positive tau0 (complex mode is off)");
  }
  return std::pow(base, r);
}

}  // namespace

void N2Config::validate() const {
  if (tau0() == Scalar{}) throw DomainError("u1 = u2: tau0 vanishes");
  if (!std::isfinite(R)) throw DomainError("R must be finite");
  if (!allow_complex && (u1.imag() != 0.0 || u2.imag() != 0.0)) {
    throw DomainError("complex canonical coordinates need complex mode");
  }
}

RClass classify_r(double R) {
  for (auto [value, kind] : {std::pair{0.5, SpecialR::half}, std::pair{-0.5, SpecialR::minus_half},
                             std::pair{-1.5, SpecialR::minus_three_halves}}) {
    const double d = std::abs(R - value);
    if (d < kSnap) return {kind, false};
    if (d < kNear) return {kind, true};
  }
  return {};
}

std::string to_string(SpecialR s) {
  switch (s) {
    case SpecialR::half: return "R = 1/2";
    case SpecialR::minus_half: return "R = -1/2";
    case SpecialR::minus_three_halves: return "R = -3/2";
    case SpecialR::generic: break;
  }
  return "generic R";
}

CMatrix calU_n2(const N2Config& cfg) {
  cfg.validate();
  const Scalar t = cfg.tau0();
  const Scalar s = cfg.u1 + cfg.u2;
  CMatrix U(2, 2);
  U << 0.5 * s, 0.5 * real_power(t, 1 - 2 * cfg.R, cfg.allow_complex), 0.5 * real_power(t, 1 + 2 * cfg.R, cfg.allow_complex),
      0.5 * s;
  return U;
}

std::array<Scalar, 2> flat_coords_n2(const N2Config& cfg) {
  cfg.validate();
  const Scalar x1 = 0.5 * (cfg.u1 + cfg.u2);
  const Scalar t = cfg.tau0();
  if (classify_r(cfg.R).kind == SpecialR::minus_half && !classify_r(cfg.R).near_only) {
    if (!cfg.allow_complex && t.real() <= 0.0) throw DomainError("log of a non-positive tau0");
    return {x1, 0.5 * std::log(t)};
  }
  const double p = 1 + 2 * cfg.R;
  return {x1, real_power(t, p, cfg.allow_complex) / (2 * p)};
}

Expr f_generic_expr(double R) {
  if (classify_r(R).kind != SpecialR::generic && !classify_r(R).near_only) {
    throw DomainError(fmt::format("generic closed form has a pole at {}", to_string(classify_r(R).kind)));
  }
  const Expr x1 = Expr::var(0), x2 = Expr::var(1);
  return 0.5 * x1 * x1 * x2 +
         pow(2.0 * (1 + 2 * R) * x2, (3 + 2 * R) / (1 + 2 * R)) / (16 * (3 + 2 * R) * (1 - 2 * R));
}

Expr f_closed_expr(double R, Diagnostics* diag) {
  const Expr x1 = Expr::var(0), x2 = Expr::var(1);
  const Expr cubic = 0.5 * x1 * x1 * x2;
  switch (resolve(R, diag)) {
    case SpecialR::half: return cubic + x2 * x2 / 8.0 * (log(x2) - 1.5);
    case SpecialR::minus_half: return cubic + exp(4.0 * x2) / 64.0;
    case SpecialR::minus_three_halves: return cubic - log(x2) / 128.0;
    case SpecialR::generic: break;
  }
  return f_generic_expr(R);
}

Scalar f_closed(double R, Scalar x1, Scalar x2, Diagnostics* diag) {
  const std::vector<Scalar> x{x1, x2};
  return eval_scalar(f_closed_expr(R, diag), x);
}

EulerData n2_euler(double R) {
  const SpecialR kind = classify_r(R).kind;
  const double r = classify_r(R).near_only ? R : snapped(R, kind);
  EulerData e;
  e.d = {1.0, 1 + 2 * r};
  e.r = {0.0, kind == SpecialR::minus_half ? 0.5 : 0.0};
  e.d_F = kind == SpecialR::minus_half ? 2.0 : 3 + 2 * r;
  e.mu = std::vector<double>{r, -r};
  return e;
}

JetMatrix2 operator*(const JetMatrix2& a, const JetMatrix2& b) {
  JetMatrix2 c;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) c(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j);
  return c;
}

FlatCalU calU_flat(double R, Scalar x1, Scalar x2, std::size_t order) {
  FlatCalU d;
  d.x1 = Jet::variable(0, x1, 2, order);
  const Jet X2 = Jet::variable(1, x2, 2, order);
  const auto layout = d.x1.layout();
  d.calU(0, 0) = d.x1;
  d.calU(1, 1) = d.x1;
  if (classify_r(R).kind == SpecialR::minus_half && !classify_r(R).near_only) {
    d.calU(0, 1) = 0.5 * exp(4.0 * X2);
    d.calU(1, 0) = Jet::constant(0.5, layout);
    d.e2 = Jet::constant(0.5, layout);
    return d;
  }
  const double p = 1 + 2 * R;
  d.calU(0, 1) = 0.5 * pow(2.0 * p * X2, (1 - 2 * R) / p);
  d.calU(1, 0) = p * X2;
  d.e2 = p * X2;
  return d;
}

JetMatrix2 xi_step(std::size_t n, const JetMatrix2& prev, std::array<double, 2> mu, const FlatCalU& data,
                   std::array<bool, 2>& flagged, std::array<bool, 4>* flow_entries) {
  if (n == 0) throw ShapeError("recursion starts at n = 1");
  const JetMatrix2 rhs = data.calU * prev;
  const std::size_t K = data.x1.order();
  if (K == 0) throw ShapeError("recursion needs jets of order at least 1");
  JetMatrix2 X;
  std::array<bool, 2> newly{false, false};
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b) {
      const double den = static_cast<double>(n) - mu[a] + mu[b];
      const bool flow = std::abs(den) < kResonance || flagged[b];
      if (flow_entries) (*flow_entries)[2 * a + b] = flow;
      if (!flow) {
        X(a, b) = rhs(a, b) / Scalar(den);
        continue;
      }
      // I = d/dx1 lowers the level by one; E = x1 d/dx1 + e2 d/dx2 maps it to calU prev
      const std::array<Jet, 2> grad{prev(a, b).truncated(K - 1),
                                    ((rhs(a, b) - data.x1 * prev(a, b)) / data.e2).truncated(K - 1)};
      const double scale = 1.0 + std::max(grad[0].max_abs(), grad[1].max_abs());
      if (gradient_curl(grad) > 1e-8 * scale) {
        throw DegenerateError(fmt::format("resonant entry ({}, {}) at level {} has no consistent flow", a, b, n));
      }
      X(a, b) = from_gradient(grad, 0.0);
      newly[b] = true;
    }
  for (std::size_t b = 0; b < 2; ++b) flagged[b] = flagged[b] || newly[b];
  return X;
}

XiSeries xi_series(double R, Scalar x1, Scalar x2, std::size_t levels, std::size_t order) {
  const RClass c = classify_r(R);
  const double r = c.near_only ? R : snapped(R, c.kind);
  XiSeries xi;
  xi.R = r;
  xi.order = order;
  xi.mu = {r, -r};
  const FlatCalU data = calU_flat(r, x1, x2, order);
  xi.calU = data.calU;
  xi.x1 = data.x1;
  xi.x2 = Jet::variable(1, x2, 2, order);
  const auto layout = data.x1.layout();

  JetMatrix2 prev;
  prev(0, 0) = prev(1, 1) = Jet::constant(1.0, layout);
  prev(0, 1) = prev(1, 0) = Jet::constant(0.0, layout);
  std::array<bool, 2> flagged{false, false};
  for (std::size_t n = 1; n <= levels; ++n) {
    std::array<bool, 4> flow{};
    JetMatrix2 X = xi_step(n, prev, xi.mu, data, flagged, &flow);
    if (n == 1) {
      // the first column of Xi^(1) is the flat coordinate vector
      X(0, 0) = xi.x1;
      X(1, 0) = xi.x2;
    }
    xi.terms.push_back(X);
    xi.flow_entries.push_back(flow);
    prev = X;
  }
  return xi;
}

double xi_recursion_defect(const XiSeries& xi) {
  double worst = 0.0;
  const auto layout = xi.x1.layout();
  JetMatrix2 prev;
  prev(0, 0) = prev(1, 1) = Jet::constant(1.0, layout);
  prev(0, 1) = prev(1, 0) = Jet::constant(0.0, layout);
  for (std::size_t n = 1; n <= xi.terms.size(); ++n) {
    const JetMatrix2 rhs = xi.calU * prev;
    const JetMatrix2& X = xi.terms[n - 1];
    for (std::size_t a = 0; a < 2; ++a)
      for (std::size_t b = 0; b < 2; ++b) {
        if (xi.flow_entries[n - 1][2 * a + b]) continue;
        const double den = static_cast<double>(n) - xi.mu[a] + xi.mu[b];
        worst = std::max(worst, (Scalar(den) * X(a, b) - rhs(a, b)).max_abs());
      }
    prev = X;
  }
  return worst;
}

Jet prepotential_from_xi(const XiSeries& xi) {
  if (xi.terms.size() < 3) throw ShapeError("prepotential needs Xi up to level 3");
  const JetMatrix2& xi2 = xi.terms[1];
  const JetMatrix2& xi3 = xi.terms[2];
  return 0.5 * (xi.x1 * xi2(1, 0) + xi.x2 * xi2(1, 1) - xi3(1, 0));
}

double xi_closed_form_diff(double R, Scalar x1, Scalar x2) {
  const Jet F = prepotential_from_xi(xi_series(R, x1, x2, 3, 3));
  const std::vector<Scalar> p{x1, x2};
  return tensor_from_jet(F).max_diff(third_tensor(f_closed_expr(R), p));
}

VMatrices v_matrices_n2(const N2Config& cfg) {
  cfg.validate();
  CMatrix sigma2(2, 2);
  sigma2 << 0.0, Scalar(0, -1), Scalar(0, 1), 0.0;
  VMatrices v;
  v.V = cfg.R * sigma2;
  const CMatrix V1 = (cfg.R / cfg.tau0()) * sigma2;
  v.V_j = {V1, -V1};
  return v;
}

double tau_identity_residual(const N2Config& cfg) {
  const auto v = v_matrices_n2(cfg);
  const double h = 1e-4 * std::max(1.0, std::abs(cfg.tau0()));
  double worst = 0.0;
  for (std::size_t j = 0; j < 2; ++j) {
    const CMatrix d = central_derivative(
        [&](double t) {
          N2Config shifted = cfg;
          (j == 0 ? shifted.u1 : shifted.u2) += t;
          CMatrix out(1, 1);
          out(0, 0) = cfg.R * cfg.R * std::log(shifted.tau0());
          return out;
        },
        h);
    worst = std::max(worst, std::abs(d(0, 0) - 0.5 * (v.V_j[j] * v.V).trace()));
  }
  return worst;
}

}  // namespace wdvv
