#include <cmath>

#include "doctest.h"
#include "wdvv/errors.hpp"
#include "wdvv/n3_top.hpp"
#include "wdvv/schlesinger.hpp"

using namespace wdvv;
using C = std::complex<double>;

namespace {

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

std::vector<C> sorted_eigenvalues(const CMatrix& m) {
  Eigen::ComplexEigenSolver<CMatrix> es(m, false);
  std::vector<C> ev(es.eigenvalues().data(), es.eigenvalues().data() + m.rows());
  std::sort(ev.begin(), ev.end(), [](C a, C b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); });
  return ev;
}

}  // namespace

TEST_CASE("two-dimensional system") {
  for (double alpha : {0.0, 0.7}) {
    const double R = 0.3;
    auto sys = n2_system(R, alpha, {2.0, 1.0});
    const CMatrix sinf = sys.s_infinity();
    CHECK(std::abs(sinf.trace() + 2 * alpha) < 1e-13);
    auto ev = sorted_eigenvalues(sinf);
    CHECK(std::abs(ev[0] - (-R - alpha)) < 1e-12);
    CHECK(std::abs(ev[1] - (R - alpha)) < 1e-12);
    // mu = R sigma3
    CHECK(std::abs(sinf(0, 0) - (R - alpha)) < 1e-12);
    CHECK(std::abs(sinf(0, 1)) < 1e-12);
  }
  auto sys0 = n2_system(0.3, 0.0, {2.0, 1.0});
  for (const auto& s : sys0.S) CHECK(std::abs(s.determinant()) < 1e-14);
  CHECK_THROWS_AS(n2_system(0.3, 0.0, {1.0, 1.0}), DegenerateError);
}

TEST_CASE("two-dimensional Schlesinger equations") {
  auto fam = n2_family(1.0, 0.0, {2.0, 1.0});
  auto base = fam(0, 0.0);
  CHECK(schlesinger_residual(fam, base, 1e-3) < 1e-7);
  CHECK(observed_order(fam, base, 0.04) >= 3.0);
  CHECK_THROWS_AS(schlesinger_residual(fam, base, 0.2), DegenerateError);

  // uniform shift leaves everything unchanged
  auto shifted = n2_system(1.0, 0.0, {5.5, 4.5});
  for (std::size_t i = 0; i < 2; ++i) CHECK(shifted.S[i] == base.S[i]);

  // a wrong system is caught
  auto broken = [&](std::size_t j, double t) {
    auto s = fam(j, t);
    s.S[0] *= (1.0 + 1e-3 * t);
    return s;
  };
  CHECK(schlesinger_residual(broken, base, 1e-3) > 1e-5);
}

TEST_CASE("commuting constant system") {
  SchlesingerSystem sys;
  sys.u = {0.0, 1.0, 3.0};
  for (int i = 0; i < 3; ++i) {
    CMatrix d = CMatrix::Zero(3, 3);
    d(i, i) = 0.5 + i;
    sys.S.push_back(d);
  }
  auto fam = [&](std::size_t j, double t) {
    auto s = sys;
    s.u[j] += t;
    return s;
  };
  CHECK(schlesinger_residual(fam, sys, 1e-3) == 0.0);
}

TEST_CASE("isomonodromic tau derivative") {
  auto a = iso_tau(n2_system(1.0, 0.0, {2.0, 1.0}));
  CHECK(std::abs(a.from_s[0] - 1.0) < 1e-12);
  CHECK(std::abs(a.from_v[0] - 1.0) < 1e-12);
  CHECK(a.residual < 1e-10);
  auto b = iso_tau(n2_system(1.0, 0.7, {2.0, 1.0}));
  CHECK(std::abs(a.residual - b.residual) < 1e-10);
  for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(a.from_s[j] - b.from_s[j]) < 1e-10);
  for (double R : {0.3, -0.7}) {
    auto t = iso_tau(n2_system(R, 0.0, {3.5, 0.25}));
    CHECK(std::abs(t.from_s[0] - R * R / 3.25) < 1e-10);
  }
}

TEST_CASE("systems from a three-dimensional chart") {
  auto chart = build_chart(1, 1, std::vector<C>{0.3, 0.5, 1.0});
  auto sys = system_from_chart(chart);
  auto fam = chart_family(chart);
  CHECK(schlesinger_residual(fam, sys, chart_step(chart, 1e-4)) < 1e-5);

  // S_infinity does not move
  std::vector<SchlesingerSystem> nearby{sys};
  for (std::size_t j = 0; j < 3; ++j) nearby.push_back(fam(j, 0.01 * (j + 1)));
  nearby.push_back(fam(0, -0.02));
  CHECK(s_infinity_spread(nearby) < 1e-5);

  auto ev = sorted_eigenvalues(sys.s_infinity());
  C half_sum{};
  for (auto e : ev) half_sum += 0.5 * e * e;
  CHECK(std::abs(half_sum - 0.25) < 1e-6);

  // the tau derivative agrees with the one from the flat-coordinate formula
  auto t = iso_tau(sys);
  CHECK(t.residual < 1e-9);
  const C x2 = chart.chart_point[1], x3 = chart.chart_point[2];
  const Jet lt = log_tau_n3(Jet::variable(0, x2, 2, 1), Jet::variable(1, x3, 2, 1));
  for (std::size_t j = 0; j < 3; ++j) {
    const C dj = chart.dx_du(1, j) * lt.partial(MultiIndex{1, 0}) + chart.dx_du(2, j) * lt.partial(MultiIndex{0, 1});
    CHECK(std::abs(t.from_s[j] - dj) < 1e-5 * std::max(1.0, std::abs(dj)));
  }

  // symmetric point x3 = 0
  auto sym = system_from_chart(build_chart(1, 1, std::vector<C>{0.2, 1.0, 0.0}));
  C s2{};
  for (auto e : sorted_eigenvalues(sym.s_infinity())) s2 += 0.5 * e * e;
  CHECK(std::abs(s2 - 0.25) < 1e-6);
}

TEST_CASE("transport of the m-matrix") {
  auto chart = build_chart(1, 1, std::vector<C>{0.3, 0.5, 1.0});
  const double sep = std::min({std::abs(chart.u[0] - chart.u[1]), std::abs(chart.u[1] - chart.u[2]),
                               std::abs(chart.u[0] - chart.u[2])});
  std::vector<C> du{0.05 * sep, -0.03 * sep, 0.02 * sep};
  auto r = m_transport_check(chart, du);
  CHECK(r.path_difference < 1e-6);
  CHECK(r.chart_difference < 1e-6);

  std::vector<C> target = chart.u;
  for (std::size_t i = 0; i < 3; ++i) target[i] += du[i];
  auto moved = chart_at_u(chart, target);
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(moved.u[i] - target[i]) < 1e-12);
}
