#include <cmath>

#include "doctest.h"
#include "wdvv/errors.hpp"
#include "wdvv/n2_family.hpp"

using namespace wdvv;
using C = std::complex<double>;

namespace {

// sample points inside each branch's domain
std::vector<std::array<double, 2>> points_for(double R) {
  if (R == -0.7) return {{0.4, -0.9}, {1.2, -0.3}, {-0.5, -1.6}};
  return {{0.4, 0.9}, {1.2, 0.3}, {-0.5, 1.6}};
}

const double kSampleR[] = {0.0, 0.3, 1.0, -0.7, 0.5, -0.5, -1.5};

}  // namespace

TEST_CASE("calU") {
  auto U = calU_n2({0.0, 2.0, 0.0});
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(std::abs(U(i, j) - 1.0) < 1e-15);
  for (double R : {0.3, -0.7, 1.0}) {
    auto V = calU_n2({R, 3.0, 1.25});
    CHECK(std::abs(V.trace() - 4.25) < 1e-14);
    CHECK(std::abs(V(1, 0) - 0.5 * std::pow(1.75, 1 + 2 * R)) < 1e-14);
  }
  CHECK_THROWS_AS(calU_n2({0.3, 1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(calU_n2({0.3, 1.0, 2.0}), DomainError);
  N2Config complex_mode{0.3, 1.0, 2.0, true};
  CHECK_NOTHROW(calU_n2(complex_mode));
}

TEST_CASE("flat coordinates") {
  auto a = flat_coords_n2({0.0, 2.0, 0.0});
  CHECK(std::abs(a[0] - 1.0) < 1e-15);
  CHECK(std::abs(a[1] - 1.0) < 1e-15);
  auto b = flat_coords_n2({0.5, 3.0, 1.0});
  CHECK(std::abs(b[0] - 2.0) < 1e-15);
  CHECK(std::abs(b[1] - 1.0) < 1e-15);
  auto c = flat_coords_n2({-0.5, 2.0, 1.0});
  CHECK(std::abs(c[0] - 1.5) < 1e-15);
  CHECK(std::abs(c[1]) < 1e-15);
  CHECK_THROWS_AS(flat_coords_n2({-0.5, 1.0, 2.0}), DomainError);
}

TEST_CASE("closed-form prepotentials") {
  CHECK(std::abs(f_closed(0.0, 1.0, 1.0) - 2.0 / 3.0) < 1e-15);
  CHECK(std::abs(2.0 * f_closed(-1.5, 1.0, 1.0) - 1.0) < 1e-15);
  CHECK(std::abs(2.0 * f_closed(-0.5, 1.0, 0.25) - (0.25 + std::exp(1.0) / 32)) < 1e-15);
  CHECK(std::abs(2.0 * f_closed(0.5, 1.0, 2.0) - (2.0 + (4.0 / 4) * (std::log(2.0) - 1.5))) < 1e-14);
  // hand evaluation at R = 0.3
  const double x1 = 0.8, x2 = 1.7, R = 0.3;
  const double expected = 0.5 * x1 * x1 * x2 + std::pow(2 * 1.6 * x2, 3.6 / 1.6) / (16 * 3.6 * 0.4);
  CHECK(std::abs(f_closed(R, x1, x2) - expected) < 1e-14);
  CHECK_THROWS_AS(f_closed(0.3, 1.0, -1.0), DomainError);
  CHECK_THROWS_AS(f_generic_expr(-1.5), DomainError);

  Diagnostics diag;
  f_closed(0.5 + 1e-7, 1.0, 1.0, &diag);
  CHECK(diag.warnings.size() == 1);
  Diagnostics quiet;
  f_closed(0.5 + 1e-12, 1.0, 1.0, &quiet);
  CHECK(quiet.warnings.empty());
}

TEST_CASE("closed forms satisfy the WDVV conditions") {
  const auto eta = FlatMetric::antidiagonal(2);
  for (double R : kSampleR) {
    const Expr F = f_closed_expr(R);
    const EulerData e = n2_euler(R);
    CHECK_NOTHROW(e.validate());
    for (auto p : points_for(R)) {
      auto c = third_tensor(F, std::span<const double>(p));
      CHECK(associativity_residual(c, eta).absolute < 1e-9);
      CHECK(normalization_residual(c, eta).absolute < 1e-9);
      CHECK(quasi_homogeneity_residual(F, e, std::span<const double>(p)).absolute < 1e-9);
    }
  }
  // wrong degree is caught
  EulerData wrong = n2_euler(0.3);
  wrong.d_F += 1e-3;
  std::array<double, 2> p{0.4, 0.9};
  CHECK(quasi_homogeneity_residual(f_closed_expr(0.3), wrong, std::span<const double>(p)).absolute > 1e-6);
}

TEST_CASE("Xi recursion") {
  auto xi = xi_series(0.0, 0.7, 1.3);
  REQUIRE(xi.terms.size() == 3);
  CHECK(std::abs(xi.terms[1](0, 0).value() - (0.5 * 0.49 + std::pow(2 * 1.3, 2) / 8)) < 1e-14);
  CHECK(std::abs(xi.terms[0](1, 0).value() - 1.3) < 1e-15);
  CHECK(xi_recursion_defect(xi) < 1e-12);

  auto generic = xi_series(0.3, 0.7, 1.3);
  const double tau0 = std::pow(2 * 1.6 * 1.3, 1 / 1.6);
  CHECK(std::abs(generic.terms[0](1, 0).value() - std::pow(tau0, 1.6) / (2 * 1.6)) < 1e-14);
  for (const auto& f : generic.flow_entries)
    for (bool b : f) CHECK_FALSE(b);

  // R = -3/2: entry (2,1) of Xi^(3) is resonant and picks up a logarithm
  auto log_case = xi_series(-1.5, 0.7, 1.3);
  CHECK(log_case.flow_entries[2][2]);
  CHECK(xi_recursion_defect(log_case) < 1e-12);
  const Expr expected = 0.5 * Expr::var(0) * Expr::var(0) * Expr::var(1) + log(Expr::var(1)) / 64.0;
  const std::vector<Scalar> p{0.7, 1.3};
  CHECK(tensor_from_jet(log_case.terms[2](1, 0)).max_diff(third_tensor(expected, p)) < 1e-12);

  CHECK(xi_series(1.0, 0.7, 1.3).flow_entries[1][1]);
  CHECK(xi_series(0.5, 0.7, 1.3).flow_entries[0][1]);
  CHECK(xi_series(-0.5, 0.7, 1.3).flow_entries[0][2]);

  XiSeries short_series = xi_series(0.3, 0.7, 1.3, 2);
  CHECK_THROWS_AS(prepotential_from_xi(short_series), ShapeError);
}

TEST_CASE("recursion reproduces the closed forms") {
  for (double R : kSampleR) {
    for (auto p : points_for(R)) {
      CAPTURE(R);
      CHECK(xi_closed_form_diff(R, p[0], p[1]) < 1e-9);
    }
  }
}

TEST_CASE("tau function identity") {
  for (double R : {0.0, 0.3, -0.7, 1.0, 0.5}) {
    N2Config cfg{R, 2.5, 0.75};
    CHECK(tau_identity_residual(cfg) < 1e-10);
    auto v = v_matrices_n2(cfg);
    CHECK(std::abs(0.5 * (v.V_j[0] * v.V).trace() - R * R / 1.75) < 1e-14);
    CHECK((v.V_j[0] + v.V_j[1]).norm() == 0.0);
  }
}
