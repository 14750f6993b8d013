#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "wdvv/errors.hpp"
#include "wdvv/jet.hpp"

using namespace wdvv;

namespace {

Jet one_plus_x(std::size_t order) { return Jet::variable(0, 0.0, 1, order) + Scalar(1.0); }

double rel_diff(const Jet& a, const Jet& b) {
  double scale = std::max(1.0, std::max(a.max_abs(), b.max_abs()));
  return (a - b).max_abs() / scale;
}

Jet random_jet(std::size_t nvars, std::size_t order, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  auto layout = JetLayout::get(nvars, order);
  std::vector<Scalar> c(layout->size());
  for (auto& v : c) v = {U(rng), U(rng)};
  return Jet(layout, c);
}

}  // namespace

TEST_CASE("coordinate jet") {
  Jet j = jet_var(0, 2.0, 2, 2);
  CHECK(j.coeff({0, 0}) == Scalar(2.0));
  CHECK(j.coeff({1, 0}) == Scalar(1.0));
  CHECK(j.coeff({0, 1}) == Scalar(0.0));
  CHECK(j.coeff({2, 0}) == Scalar(0.0));
  CHECK_THROWS_AS(jet_var(1, 0.0, 1, 2), ShapeError);

  Jet k = jet_var(0, -1.5, 3, 3);
  CHECK(k.value() == Scalar(-1.5));
  CHECK(k.coeff({1, 0, 0}) == Scalar(1.0));
  CHECK(k.coeff({0, 1, 0}) == Scalar(0.0));
}

TEST_CASE("layout enumeration") {
  auto L = JetLayout::get(3, 4);
  CHECK(L->size() == 35);
  for (std::size_t k = 0; k < L->size(); ++k) CHECK(L->index_of(L->monomial(k)) == k);
  CHECK(L->index_of(MultiIndex{5, 0, 0}) == JetLayout::npos);
  CHECK(JetLayout::get(3, 4) == L);
}

TEST_CASE("arithmetic small cases") {
  Jet a = one_plus_x(2);
  Jet sq = jet_arith(ArithOp::mul, a, a);
  CHECK(sq.coeff({0}) == Scalar(1.0));
  CHECK(sq.coeff({1}) == Scalar(2.0));
  CHECK(sq.coeff({2}) == Scalar(1.0));

  Jet q = jet_arith(ArithOp::div, Jet::constant(1.0, 1, 2), a);
  CHECK(std::abs(q.coeff({0}) - 1.0) < 1e-15);
  CHECK(std::abs(q.coeff({1}) + 1.0) < 1e-15);
  CHECK(std::abs(q.coeff({2}) - 1.0) < 1e-15);

  CHECK_THROWS_AS(jet_arith(ArithOp::div, a, Jet::variable(0, 0.0, 1, 2)), DomainError);
  CHECK_THROWS_AS(jet_arith(ArithOp::add, a, Jet::variable(0, 0.0, 2, 2)), ShapeError);
  CHECK_THROWS_AS(jet_arith(ArithOp::add, a, one_plus_x(3)), ShapeError);
}

TEST_CASE("product rule against finite differences of random cubics") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    auto f = oracle::random_poly(2, 3, rng);
    auto g = oracle::random_poly(2, 3, rng);
    std::vector<double> p{0.3 + 0.1 * trial, -0.7};
    auto layout = JetLayout::get(2, 3);
    std::vector<Scalar> cf(layout->size()), cg(layout->size());
    for (std::size_t k = 0; k < layout->size(); ++k) {
      cf[k] = f.taylor(p, layout->monomial(k).exponents());
      cg[k] = g.taylor(p, layout->monomial(k).exponents());
    }
    Jet fg = Jet(layout, cf) * Jet(layout, cg);
    auto prod = [&](const std::vector<oracle::C>& x) { return f.eval(x) * g.eval(x); };
    std::vector<oracle::C> x{p[0], p[1]};
    // coefficient of [1,1] is the mixed partial
    auto fd = oracle::richardson(prod, x, {0, 1}, 1e-2);
    CHECK(std::abs(fg.coeff({1, 1}) - fd) < 1e-9);
  }
}

TEST_CASE("polynomials are exact") {
  std::mt19937_64 rng(3);
  for (std::size_t nv = 1; nv <= 3; ++nv) {
    auto f = oracle::random_poly(nv, 2, rng);
    auto g = oracle::random_poly(nv, 2, rng);
    oracle::Poly fg;
    fg.nvars = nv;
    for (const auto& [e1, c1] : f.terms)
      for (const auto& [e2, c2] : g.terms) {
        auto e = e1;
        for (std::size_t i = 0; i < nv; ++i) e[i] += e2[i];
        fg.terms[e] += c1 * c2;
      }
    std::vector<double> p(nv);
    for (std::size_t i = 0; i < nv; ++i) p[i] = 0.4 - 0.3 * i;
    auto layout = JetLayout::get(nv, 4);
    std::vector<Scalar> cf(layout->size()), cg(layout->size());
    for (std::size_t k = 0; k < layout->size(); ++k) {
      cf[k] = f.taylor(p, layout->monomial(k).exponents());
      cg[k] = g.taylor(p, layout->monomial(k).exponents());
    }
    Jet prod = Jet(layout, cf) * Jet(layout, cg);
    double worst = 0;
    for (std::size_t k = 0; k < layout->size(); ++k) {
      worst = std::max(worst, std::abs(prod.coeffs()[k] - fg.taylor(p, layout->monomial(k).exponents())));
    }
    CHECK(worst < 1e-13);
  }
}

TEST_CASE("transcendental series") {
  Jet l = jet_unary(UnaryOp::log, one_plus_x(3));
  CHECK(std::abs(l.coeff({0})) < 1e-16);
  CHECK(std::abs(l.coeff({1}) - 1.0) < 1e-15);
  CHECK(std::abs(l.coeff({2}) + 0.5) < 1e-15);
  CHECK(std::abs(l.coeff({3}) - 1.0 / 3.0) < 1e-15);

  Jet a = one_plus_x(2);
  CHECK(rel_diff(jet_unary(UnaryOp::pow, a, 2.0), a * a) < 1e-15);

  CHECK_THROWS_AS(jet_unary(UnaryOp::log, Jet::variable(0, -1.0, 1, 2)), DomainError);
  CHECK_THROWS_AS(jet_unary(UnaryOp::pow, Jet::variable(0, 0.0, 1, 2), 0.5), DomainError);
  // within 1e-12 of the cut, on either side
  CHECK_THROWS_AS(log(Jet::variable(0, Scalar(-1.0, 1e-14), 1, 2)), DomainError);
  CHECK_NOTHROW(log(Jet::variable(0, Scalar(-1.0, 1e-6), 1, 2)));
  // integer powers accept negative bases
  Jet neg = Jet::variable(0, -2.0, 1, 3);
  CHECK(rel_diff(pow(neg, -2.0), reciprocal(neg * neg)) < 1e-15);
}

TEST_CASE("real power against Richardson finite differences") {
  // f = 1.3 + 0.4 x + 0.2 y + 0.3 x^2 - 0.1 xy + 0.25 y^2, positive near p
  // oracle in long double: third differences at h = 1e-3 lose ~1e-7 in double
  using LC = std::complex<long double>;
  auto q = [](const std::vector<LC>& x) {
    return 1.3L + 0.4L * x[0] + 0.2L * x[1] + 0.3L * x[0] * x[0] - 0.1L * x[0] * x[1] + 0.25L * x[1] * x[1];
  };
  const double r = 0.37;
  auto f = [&](const std::vector<LC>& x) { return std::pow(q(x), static_cast<long double>(r)); };
  std::vector<LC> p{0.2L, -0.4L};
  Jet X = Jet::variable(0, 0.2, 2, 3), Y = Jet::variable(1, -0.4, 2, 3);
  Jet Q = 1.3 + 0.4 * X + 0.2 * Y + 0.3 * X * X - 0.1 * X * Y + 0.25 * Y * Y;
  Jet P = jet_unary(UnaryOp::pow, Q, r);
  auto layout = P.layout();
  for (std::size_t k = 1; k < layout->size(); ++k) {
    const auto& m = layout->monomial(k);
    std::vector<std::size_t> vars;
    for (std::size_t v = 0; v < 2; ++v)
      for (unsigned e = 0; e < m[v]; ++e) vars.push_back(v);
    const auto fdl = oracle::richardson_t<long double>(f, p, vars, 1e-3L);
    const Scalar fd(static_cast<double>(fdl.real()), static_cast<double>(fdl.imag()));
    const auto exact = partial(P, m);
    CHECK(std::abs(exact - fd) <= 1e-7 * std::max(1.0, std::abs(exact)));
  }
}

TEST_CASE("round trips and algebraic laws") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 10; ++t) {
    Jet a = random_jet(3, 3, rng);
    a = a.with_value(Scalar(1.5, 0.3));
    Jet b = random_jet(3, 3, rng), c = random_jet(3, 3, rng);
    CHECK(rel_diff(exp(log(a)), a) < 1e-13);
    CHECK(rel_diff(pow(a, 1.0), a) < 1e-13);
    CHECK(rel_diff((a * b) * c, a * (b * c)) < 1e-13);
    CHECK(rel_diff(a * b, b * a) < 1e-13);
    CHECK(rel_diff((a / b.with_value(2.0)) * b.with_value(2.0), a) < 1e-13);
  }
}

TEST_CASE("partials") {
  Jet x = Jet::variable(0, 1.0, 1, 2);
  CHECK(partial(x * x, MultiIndex{2}) == Scalar(2.0));
  CHECK(partial(x * x, MultiIndex{0}) == Scalar(1.0));
  CHECK_THROWS_AS(partial(x, MultiIndex{3}), ShapeError);

  Jet X = Jet::variable(0, 1.0, 2, 4), Y = Jet::variable(1, 1.0, 2, 4);
  // d^3/dx^2 dy (x^3 y) = 6 x = 6
  CHECK(std::abs(partial(X * X * X * Y, MultiIndex{2, 1}) - 6.0) < 1e-14);
}

TEST_CASE("derivative and gradient reconstruction") {
  Jet X = Jet::variable(0, 0.7, 2, 4), Y = Jet::variable(1, 1.2, 2, 4);
  Jet f = exp(X) * log(Y) + X * X * Y;
  std::vector<Jet> grad{f.derivative(0).truncated(2), f.derivative(1).truncated(2)};
  Jet g = from_gradient(grad, f.value());
  CHECK((g - f.truncated(3)).max_abs() < 1e-14);
  CHECK(gradient_curl(grad) < 1e-14);
  std::vector<Jet> bad{Y.truncated(2), Jet::constant(0.0, 2, 2)};
  CHECK(gradient_curl(bad) > 0.5);
}
