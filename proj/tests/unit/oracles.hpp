#pragma once

// Independent reference computations used by the unit tests. Nothing here
// touches the jet engine.

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <random>
#include <vector>

namespace oracle {

using C = std::complex<double>;
using ScalarFn = std::function<C(const std::vector<C>&)>;

/// Central difference of order |vars| along the given variables (repeated
/// entries allowed), step h. T is double or long double.
template <class T, class Fn>
std::complex<T> central(const Fn& f, std::vector<std::complex<T>> x, const std::vector<std::size_t>& vars, T h,
                        std::size_t k = 0) {
  if (k == vars.size()) return f(x);
  const std::size_t v = vars[k];
  const std::complex<T> x0 = x[v];
  x[v] = x0 + h;
  const auto fp = central<T>(f, x, vars, h, k + 1);
  x[v] = x0 - h;
  const auto fm = central<T>(f, x, vars, h, k + 1);
  return (fp - fm) / (T(2) * h);
}

/// Central differences at h, h/2, h/4 with two Richardson levels.
template <class T, class Fn>
std::complex<T> richardson_t(const Fn& f, const std::vector<std::complex<T>>& x, const std::vector<std::size_t>& vars,
                             T h) {
  const auto d1 = central<T>(f, x, vars, h);
  const auto d2 = central<T>(f, x, vars, h / 2);
  const auto d3 = central<T>(f, x, vars, h / 4);
  const auto r1 = (T(4) * d2 - d1) / T(3);
  const auto r2 = (T(4) * d3 - d2) / T(3);
  return (T(16) * r2 - r1) / T(15);
}

inline C richardson(const ScalarFn& f, const std::vector<C>& x, const std::vector<std::size_t>& vars, double h) {
  return richardson_t<double>(f, x, vars, h);
}

/// Polynomial as exponent-vector -> coefficient.
struct Poly {
  std::size_t nvars = 0;
  std::map<std::vector<unsigned>, double> terms;

  C eval(const std::vector<C>& x) const {
    C s = 0;
    for (const auto& [e, c] : terms) {
      C t = c;
      for (std::size_t i = 0; i < nvars; ++i) t *= std::pow(x[i], static_cast<int>(e[i]));
      s += t;
    }
    return s;
  }

  /// Taylor coefficient of (x-p)^k by binomial expansion of every term.
  double taylor(const std::vector<double>& p, const std::vector<unsigned>& k) const {
    double s = 0;
    for (const auto& [e, c] : terms) {
      double t = c;
      for (std::size_t i = 0; i < nvars; ++i) {
        if (k[i] > e[i]) {
          t = 0;
          break;
        }
        double binom = 1;
        for (unsigned j = 0; j < k[i]; ++j) binom = binom * (e[i] - j) / (j + 1);
        t *= binom * std::pow(p[i], static_cast<int>(e[i] - k[i]));
      }
      s += t;
    }
    return s;
  }
};

inline Poly random_poly(std::size_t nvars, unsigned degree, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Poly p;
  p.nvars = nvars;
  std::vector<unsigned> e(nvars, 0);
  std::function<void(std::size_t, unsigned)> rec = [&](std::size_t i, unsigned left) {
    if (i == nvars) {
      p.terms[e] = U(rng);
      return;
    }
    for (unsigned k = 0; k <= left; ++k) {
      e[i] = k;
      rec(i + 1, left - k);
    }
    e[i] = 0;
  };
  rec(0, degree);
  return p;
}

}  // namespace oracle
