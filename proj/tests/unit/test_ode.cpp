#include <cmath>

#include "doctest.h"
#include "wdvv/errors.hpp"
#include "wdvv/ode.hpp"

using namespace wdvv;
using C = std::complex<double>;

TEST_CASE("exponential growth") {
  OdeState y0(1);
  y0 << 1.0;
  auto tr = integrate([](double, const OdeState& y) { return OdeState(C(0.0, 1.0) * y); }, 0.0, y0, 3.0);
  CHECK(std::abs(tr.back()(0) - std::exp(C(0.0, 3.0))) < 1e-9);
  CHECK(std::abs(tr.at(1.234)(0) - std::exp(C(0.0, 1.234))) < 1e-7);
  CHECK(tr.s.back() == 3.0);
}

TEST_CASE("backwards and zero-length integration") {
  OdeState y0(2);
  y0 << 1.0, 0.0;
  // harmonic oscillator
  auto rhs = [](double, const OdeState& y) {
    OdeState d(2);
    d << y(1), -y(0);
    return d;
  };
  auto tr = integrate(rhs, 2.0, y0, -1.0);
  CHECK(std::abs(tr.back()(0) - std::cos(-3.0)) < 1e-9);
  CHECK(std::abs(tr.back()(1) + std::sin(-3.0)) < 1e-9);
  CHECK(std::abs(tr.at(0.5)(0) - std::cos(-1.5)) < 1e-7);
  CHECK(integrate(rhs, 1.0, y0, 1.0).size() == 1);
  CHECK_THROWS_AS(tr.at(5.0), DomainError);
}

TEST_CASE("blow-up is reported") {
  OdeState y0(1);
  y0 << 1.0;
  // y' = y^2 blows up at s = 1
  auto rhs = [](double, const OdeState& y) { return OdeState(y.cwiseProduct(y)); };
  CHECK_THROWS_AS(integrate(rhs, 0.0, y0, 2.0), ConvergenceError);
}

TEST_CASE("tolerance is respected") {
  OdeState y0(1);
  y0 << 1.0;
  OdeOptions loose;
  loose.rtol = 1e-5;
  loose.atol = 1e-8;
  auto f = [](double s, const OdeState& y) { return OdeState(-2.0 * s * y); };
  auto tight = integrate(f, 0.0, y0, 2.0);
  auto coarse = integrate(f, 0.0, y0, 2.0, loose);
  CHECK(coarse.size() < tight.size());
  CHECK(std::abs(tight.back()(0) - std::exp(-4.0)) < 1e-11);
  CHECK(std::abs(coarse.back()(0) - std::exp(-4.0)) < 1e-5);
}
