#include "wdvv/schlesinger.hpp"

#include <cmath>
#include <fmt/format.h>

#include "wdvv/errors.hpp"
#include "wdvv/n2_family.hpp"
#include "wdvv/numdiff.hpp"

namespace wdvv {

namespace {

double max_abs(const CMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

double min_separation(std::span<const Scalar> u) {
  double sep = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = i + 1; j < u.size(); ++j) sep = std::min(sep, std::abs(u[i] - u[j]));
  return sep;
}

CMatrix sigma2() {
  CMatrix s(2, 2);
  s << 0.0, Scalar(0, -1), Scalar(0, 1), 0.0;
  return s;
}

OdeState flatten(const CMatrix& m) { return Eigen::Map<const OdeState>(m.data(), m.size()); }
CMatrix unflatten(const OdeState& v, Eigen::Index n) { return Eigen::Map<const CMatrix>(v.data(), n, n); }

}  // namespace

CMatrix SchlesingerSystem::s_infinity() const {
  CMatrix sum = CMatrix::Zero(M.rows(), M.cols());
  for (const auto& s : S) sum += s;
  return sum;
}

SchlesingerSystem make_system(std::vector<Scalar> u, const CMatrix& M, const CMatrix& V, std::vector<CMatrix> V_j,
                              double alpha) {
  const auto n = static_cast<Eigen::Index>(u.size());
  if (M.rows() != n || M.cols() != n || V.rows() != n) throw ShapeError("M and V must be N x N");
  if (min_separation(u) == 0.0) throw DegenerateError("coinciding canonical coordinates");
  Eigen::FullPivLU<CMatrix> lu(M);
  if (!lu.isInvertible()) throw DegenerateError("M is singular");
  const CMatrix Minv = lu.inverse();
  const CMatrix shifted = V - alpha * CMatrix::Identity(n, n);
  SchlesingerSystem sys;
  for (Eigen::Index i = 0; i < n; ++i) {
    CMatrix row = CMatrix::Zero(n, n);
    row.row(i) = shifted.row(i);
    sys.S.push_back(Minv * row * M);
  }
  sys.u = std::move(u);
  sys.alpha = alpha;
  sys.M = M;
  sys.V = V;
  sys.V_j = std::move(V_j);
  return sys;
}

SchlesingerSystem n2_system(double R, double alpha, std::array<Scalar, 2> u) {
  const Scalar tau0 = u[0] - u[1];
  if (tau0 == Scalar{}) throw DegenerateError("u1 = u2");
  // sigma2^2 = I, so the exponential is a hyperbolic rotation
  const Scalar theta = R * std::log(tau0);
  const CMatrix M0 = std::cosh(theta) * CMatrix::Identity(2, 2) + std::sinh(theta) * sigma2();
  CMatrix S(2, 2);
  S << -1.0, -1.0, Scalar(0, -1), Scalar(0, 1);
  S /= std::sqrt(2.0);
  N2Config cfg{R, u[0], u[1], true};
  auto v = v_matrices_n2(cfg);
  return make_system({u[0], u[1]}, M0 * S, v.V, v.V_j, alpha);
}

SchlesingerSystem system_from_chart(const CanonicalChart& chart, double alpha) {
  const auto v = v_matrices(chart);
  Eigen::ComplexEigenSolver<CMatrix> es(v.V, false);
  const auto ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    for (Eigen::Index j = i + 1; j < ev.size(); ++j)
      if (std::abs(ev(i) - ev(j)) < 1e-8) throw DegenerateError("V has colliding eigenvalues");
  return make_system(chart.u, chart.m_matrix(), v.V, v.V_j, alpha);
}

SystemFamily n2_family(double R, double alpha, std::array<Scalar, 2> u) {
  return [=](std::size_t j, double t) {
    auto shifted = u;
    shifted.at(j) += t;
    return n2_system(R, alpha, shifted);
  };
}

SystemFamily chart_family(const CanonicalChart& chart, double alpha) {
  return [chart, alpha](std::size_t j, double t) {
    if (t == 0.0) return system_from_chart(chart, alpha);
    std::vector<Scalar> target = chart.u;
    target.at(j) += t;
    return system_from_chart(chart_at_u(chart, target), alpha);
  };
}

double schlesinger_residual(const SystemFamily& family, const SchlesingerSystem& base, double h, bool richardson) {
  const std::size_t N = base.size();
  if (h > 0.05 * min_separation(base.u)) {
    throw DegenerateError(fmt::format("step {} too large for pole separation {}", h, min_separation(base.u)));
  }
  // dS[j][i] = d_j S_i
  std::vector<std::vector<CMatrix>> dS(N);
  for (std::size_t j = 0; j < N; ++j) {
    for (std::size_t i = 0; i < N; ++i) {
      dS[j].push_back(central_derivative([&](double t) { return t == 0.0 ? base.S[i] : family(j, t).S[i]; }, h,
                                         richardson));
    }
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    CMatrix diag = dS[i][i];
    for (std::size_t j = 0; j < N; ++j) {
      if (j == i) continue;
      const CMatrix comm = base.S[i] * base.S[j] - base.S[j] * base.S[i];
      worst = std::max(worst, max_abs(dS[j][i] - comm / (base.u[j] - base.u[i])));
      diag -= comm / (base.u[i] - base.u[j]);
    }
    worst = std::max(worst, max_abs(diag));
  }
  return worst;
}

double observed_order(const SystemFamily& family, const SchlesingerSystem& base, double h, bool richardson) {
  const double r1 = schlesinger_residual(family, base, h, richardson);
  const double r2 = schlesinger_residual(family, base, h / 2, richardson);
  return std::log2(r1 / r2);
}

IsoTau iso_tau(const SchlesingerSystem& sys) {
  const std::size_t N = sys.size();
  IsoTau r;
  for (std::size_t j = 0; j < N; ++j) {
    Scalar lhs{};
    for (std::size_t k = 0; k < N; ++k) {
      if (k == j) continue;
      if (sys.u[j] == sys.u[k]) throw DegenerateError("coinciding canonical coordinates");
      lhs += (sys.S[j] * sys.S[k]).trace() / (sys.u[j] - sys.u[k]);
    }
    const Scalar rhs = 0.5 * (sys.V_j[j] * sys.V).trace();
    r.from_s.push_back(lhs);
    r.from_v.push_back(rhs);
    r.residual = std::max(r.residual, std::abs(lhs - rhs));
  }
  return r;
}

double s_infinity_spread(std::span<const SchlesingerSystem> systems) {
  if (systems.empty()) return 0.0;
  const CMatrix ref = systems.front().s_infinity();
  double worst = 0.0;
  for (const auto& s : systems) worst = std::max(worst, max_abs(s.s_infinity() - ref));
  return worst;
}

CanonicalChart chart_at_u(const CanonicalChart& base, std::span<const Scalar> u_target) {
  if (u_target.size() != base.size()) throw ShapeError("target u has the wrong dimension");
  CanonicalChart c = base;
  CVector target(u_target.size());
  for (std::size_t i = 0; i < u_target.size(); ++i) target(i) = u_target[i];
  double scale = 1.0;
  for (auto v : u_target) scale = std::max(scale, std::abs(v));
  for (int it = 0; it < 30; ++it) {
    CVector u(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) u(i) = c.u[i];
    const CVector du = target - u;
    if (du.cwiseAbs().maxCoeff() < 1e-14 * scale) return c;
    const CVector dx = c.dx_du * du;
    std::vector<Scalar> x = c.chart_point;
    for (std::size_t a = 0; a < x.size(); ++a) x[a] += dx(static_cast<Eigen::Index>(a));
    c = build_chart(base.n, base.m, x, &c);
  }
  throw ConvergenceError("could not reach the requested canonical coordinates");
}

TransportCheck m_transport_check(const CanonicalChart& base, std::span<const Scalar> du, const OdeOptions& opts) {
  const std::size_t N = base.size();
  if (du.size() != N) throw ShapeError("displacement has the wrong dimension");
  const auto n = static_cast<Eigen::Index>(N);

  // dM/dt = sum_j w_j V_j(u(t)) M along u(t) = start + t w, continuing the chart
  auto transport = [&](const CanonicalChart& from, const CMatrix& M, const std::vector<Scalar>& w) {
    CanonicalChart current = from;
    auto rhs = [&](double t, const OdeState& y) {
      std::vector<Scalar> u = from.u;
      for (std::size_t i = 0; i < N; ++i) u[i] += t * w[i];
      current = chart_at_u(current, u);
      const auto v = v_matrices(current);
      CMatrix A = CMatrix::Zero(n, n);
      for (std::size_t j = 0; j < N; ++j) A += w[j] * v.V_j[j];
      return flatten(A * unflatten(y, n));
    };
    auto tr = integrate(rhs, 0.0, flatten(M), 1.0, opts);
    std::vector<Scalar> end = from.u;
    for (std::size_t i = 0; i < N; ++i) end[i] += w[i];
    return std::pair{unflatten(tr.back(), n), chart_at_u(current, end)};
  };

  const CMatrix M0 = base.m_matrix();
  const std::vector<Scalar> all(du.begin(), du.end());
  auto [straight, end_chart] = transport(base, M0, all);

  std::vector<Scalar> first(N, Scalar{}), rest = all;
  first[0] = all[0];
  rest[0] = 0.0;
  auto [mid_M, mid_chart] = transport(base, M0, first);
  auto [bent, bent_chart] = transport(mid_chart, mid_M, rest);

  TransportCheck r;
  r.path_difference = max_abs(straight - bent);
  r.chart_difference = max_abs(straight - end_chart.m_matrix());
  return r;
}

}  // namespace wdvv
