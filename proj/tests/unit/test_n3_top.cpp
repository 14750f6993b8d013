#include <cmath>
#include <sstream>

#include "doctest.h"
#include "wdvv/errors.hpp"
#include "wdvv/n3_top.hpp"

using namespace wdvv;
using C = std::complex<double>;

namespace {

// purely imaginary omega with |omega| in [0.2, 5], away from the excluded values
std::vector<C> imaginary_samples(std::size_t count) {
  std::vector<C> out;
  for (std::size_t k = 0; k < count; ++k) {
    const double t = 0.2 + 4.8 * (k + 0.5) / count;
    if (std::abs(t - 1.0) < 0.05 || std::abs(t - 3.0) < 0.05) continue;
    out.emplace_back(0.0, t);
  }
  return out;
}

// independent finite-difference dy/ds and d2y/ds2 along the curve
struct FdCurve {
  C y, s, dy, d2y;
};
FdCurve fd_curve(C x) {
  auto y = [](C t) { return t * t * (t + 2.0) / (t * t + t + 1.0); };
  auto s = [](C t) { return t * t * t * (t + 2.0) / (2.0 * t + 1.0); };
  const double h = 1e-3;
  auto d1 = [&](auto f) { return (f(x + h) - f(x - h)) / (2 * h) * 4.0 / 3.0 - (f(x + 2 * h) - f(x - 2 * h)) / (12 * h); };
  auto d2 = [&](auto f) {
    return (-f(x + 2 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2 * h)) / (12 * h * h);
  };
  const C y1 = d1(y), s1 = d1(s);
  return {y(x), s(x), y1 / s1, (d2(y) * s1 - y1 * d2(s)) / (s1 * s1 * s1)};
}

}  // namespace

TEST_CASE("Euler top right-hand side") {
  auto z = euler_top_rhs(2.0, {0.0, 0.0, 0.0});
  for (auto v : z) CHECK(v == C(0.0));
  auto r = euler_top_rhs(2.0, {0.0, 1.5, -0.5});
  CHECK(std::abs(r[0] - 1.5 * -0.5 / 2.0) < 1e-15);
  CHECK(r[1] == C(0.0));
  CHECK(r[2] == C(0.0));
  CHECK_THROWS_AS(euler_top_rhs(0.0, {1.0, 1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(euler_top_rhs(1.0, {1.0, 1.0, 1.0}), DomainError);
  // d(sum w^2)/ds = 0
  for (double s : {-1.3, 0.4, 2.5}) {
    Triple w{C(0.3, 0.2), C(-1.1, 0.0), C(0.7, -0.4)};
    auto d = euler_top_rhs(s, w);
    CHECK(std::abs(w[0] * d[0] + w[1] * d[1] + w[2] * d[2]) < 1e-14);
  }
}

TEST_CASE("Hitchin branch") {
  for (C w : {C(0, 0.8), C(0.3, 0.5), C(2.2, -0.4), C(0, 4.1)}) {
    auto p = hitchin_branch(w);
    for (auto a : p.a) CHECK(std::abs(a * (a - 1.0) * (a - 1.0) - p.q) < 1e-12);
    CHECK(std::abs(p.omega_sq[0] + p.omega_sq[1] + p.omega_sq[2] + 0.25) < 1e-12);
    auto m = hitchin_branch(-w);
    CHECK(m.a[0] == p.a[0]);
    CHECK(m.a[1] == p.a[2]);
    CHECK(m.a[2] == p.a[1]);
    CHECK(std::abs(omega_from_x(x_from_omega(w)) - w) < 1e-13);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(p.omega_sq[i] + 0.25 * p.h_sq[i]) < 1e-12);
  }
  for (double bad : {1.0, -1.0, 3.0, -3.0, 0.0}) CHECK_THROWS_AS(hitchin_branch(bad), DomainError);
}

TEST_CASE("Painleve VI on the Hitchin curve") {
  auto samples = imaginary_samples(22);
  REQUIRE(samples.size() >= 20);
  std::size_t checked = 0;
  for (auto w : samples) {
    const C x = x_from_omega(w);
    CHECK(painleve6_residual(x) < 1e-8);
    CHECK(painleve6_residual(x, 1.0 + 1e-3) > 1e-5);
    // the finite-difference recomputation also solves PVI
    auto fd = fd_curve(x);
    const C y = fd.y, s = fd.s, yp = fd.dy;
    const C rhs = 0.5 * (1.0 / y + 1.0 / (y - 1.0) + 1.0 / (y - s)) * yp * yp -
                  (1.0 / s + 1.0 / (s - 1.0) + 1.0 / (y - s)) * yp +
                  y * (y - 1.0) * (y - s) / (s * s * (s - 1.0) * (s - 1.0)) *
                      (0.125 - s / (8.0 * y * y) + (s - 1.0) / (8.0 * (y - 1.0) * (y - 1.0)) +
                       3.0 * s * (s - 1.0) / (8.0 * (y - s) * (y - s)));
    CHECK(std::abs(fd.d2y - rhs) < 1e-5 * std::max(1.0, std::abs(rhs)));
    // curve and omega parametrizations agree
    auto p = hitchin_branch(w);
    CHECK(std::abs(p.y - fd.y) < 1e-12);
    CHECK(std::abs(p.s - fd.s) < 1e-12);
    ++checked;
  }
  CHECK(checked >= 20);
}

TEST_CASE("omega relations through the auxiliary variable") {
  for (auto w : imaginary_samples(12)) {
    auto r = hitchin_relations(x_from_omega(w));
    CHECK(r.residual < 1e-8);
  }
  // where a factor vanishes along the real x axis, so do the two omega^2
  // containing it (here v - 1/(2(y - s)), at the point x = -1/2 where s runs off to infinity)
  auto f = [](double x) { return hitchin_relations(x).factors[2]; };
  double lo = 0.0, hi = 0.0;
  bool bracket = false;
  for (int k = 0; k < 40 && !bracket; ++k) {
    const double x = -1.0 + 0.05 * k + 0.013;
    if ((f(x).real() < 0) != (f(x + 0.05).real() < 0) && std::abs(f(x).imag()) < 1e-12) {
      lo = x;
      hi = x + 0.05;
      bracket = std::abs(f(lo)) < 10 && std::abs(f(hi)) < 10;
    }
  }
  REQUIRE(bracket);
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    ((f(lo).real() < 0) == (f(mid).real() < 0) ? lo : hi) = mid;
  }
  auto root = hitchin_relations(0.5 * (lo + hi));
  CHECK(std::abs(root.factors[2]) < 1e-8);
  CHECK(std::abs(root.omega_sq[0]) < 1e-6);
  CHECK(std::abs(root.omega_sq[2]) < 1e-6);
  CHECK(std::abs(root.omega_sq[1] + 0.25) < 1e-6);
}

TEST_CASE("Lame coefficient equations") {
  for (auto w : imaginary_samples(10)) {
    auto r = lame_ode_check(w);
    CHECK(r.lhs_spread < 1e-8);
    CHECK(r.omega_h_residual < 1e-12);
    CHECK(r.branch_found);
    CHECK(r.rhs_residual < 1e-8);
    // an odd number of flips from the principal roots
    CHECK(r.signs[0] * r.signs[1] * r.signs[2] == -1);
  }
}

TEST_CASE("Euler top along the branch") {
  const C w0 = omega_on_branch(2.0, 0.9);
  CHECK(std::abs(w0.imag()) < 1e-12);
  auto signs = euler_top_signs(w0);
  REQUIRE(signs.found);
  auto state = hitchin_top_state(w0, signs);
  auto top = integrate_top(2.0, state, 5.0);
  CHECK(top.casimir_drift < 10 * 1e-10);
  CHECK(std::abs(top.casimir0 + 0.25) < 1e-12);
  CHECK(branch_tracking_residual(top, w0) < 1e-6);

  auto zero = integrate_top(2.0, {0.0, 0.0, 0.0}, 5.0);
  for (std::size_t k = 0; k < zero.path.size(); ++k)
    for (auto v : zero.omega(k)) CHECK(v == C(0.0));

  CHECK_THROWS_AS(integrate_top(0.5, state, 1.5), DomainError);
  CHECK_THROWS_AS(integrate_top(-0.5, state, 0.5), DomainError);

  std::ostringstream csv;
  write_trajectory_csv(top, csv);
  const std::string text = csv.str();
  CHECK(text.rfind("s_re,s_im,w1_re,w1_im", 0) == 0);
  CHECK(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) == top.path.size() + 1);
}

TEST_CASE("Euler top off the real axis") {
  // imaginary omega puts s on the unit circle; integrate radially outwards
  for (double t : {0.6, 2.2}) {
    const C w0(0.0, t);
    const C s0 = hitchin_branch(w0).s;
    CHECK(std::abs(std::abs(s0) - 1.0) < 1e-12);
    auto signs = euler_top_signs(w0);
    REQUIRE(signs.found);
    auto top = integrate_top(s0, hitchin_top_state(w0, signs), 2.5 * s0);
    CHECK(std::abs(top.s(0) - s0) < 1e-15);
    CHECK(std::abs(top.s(top.path.size() - 1) - 2.5 * s0) < 1e-12);
    CHECK(top.casimir_drift < 1e-9);
    CHECK(std::abs(top.casimir0 + 0.25) < 1e-12);
    CHECK(branch_tracking_residual(top, w0) < 1e-6);
  }
  CHECK_THROWS_AS(integrate_top(C(-1.0, 1.0), {0.1, 0.1, 0.1}, C(1.0, -1.0)), DomainError);
}

TEST_CASE("tau function of the rational model") {
  for (auto [x2, x3] : {std::pair<C, C>{0.5, 1.0}, {0.4, -1.2}, {C(0.3, 0.2), 1.1}}) {
    CHECK(tau_euler_residual(x2, x3) < 1e-10);
    CHECK(tau_x3_residual(x2, x3) < 1e-10);
  }
  auto w = imaginary_samples(10);
  CHECK(tau_branch_spread(w, 1.0) < 1e-8);
  CHECK(tau_branch_spread(w, 1.7) < 1e-8);
  CHECK_THROWS_AS(log_tau_n3(0.0, 1.0), DomainError);
  // q = 2/27 < 4/27 puts q^3 (27q - 4) on the branch cut
  CHECK_THROWS_AS(log_tau_n3(2.0, 3.0), DomainError);
}

TEST_CASE("tau derivatives through the canonical chart") {
  for (auto x : {std::vector<C>{0.3, 0.5, 1.0}, std::vector<C>{0.7, 0.4, -1.2}}) {
    auto chart = build_chart(1, 1, x);
    auto r = tau_cross_check(chart);
    CHECK(r.relative < 1e-5);
    CHECK(std::abs(r.identity) < 1e-6);
    CHECK(std::abs(r.euler - 0.25) < 1e-6);
  }
}
