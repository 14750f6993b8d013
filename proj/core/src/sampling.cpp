#include "wdvv/sampling.hpp"

#include <array>
#include <cmath>
#include <random>

#include "wdvv/errors.hpp"

namespace wdvv {

Box Box::cube(std::size_t n, double lo, double hi) {
  return Box{std::vector<double>(n, lo), std::vector<double>(n, hi)};
}

double radical_inverse(std::uint64_t i, unsigned base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

std::vector<std::vector<double>> halton_points(const Box& box, std::size_t count, std::uint64_t seed) {
  static constexpr std::array<unsigned, 8> primes{2, 3, 5, 7, 11, 13, 17, 19};
  const std::size_t n = box.dim();
  if (box.hi.size() != n) throw ShapeError("box bounds differ in dimension");
  if (n == 0 || n > primes.size()) throw ShapeError("halton sampling supports 1 to 8 dimensions");
  for (std::size_t k = 0; k < n; ++k) {
    if (!(box.lo[k] < box.hi[k])) throw ConfigError("box lower bound must be below upper bound");
  }

  // mt19937_64 output is fully specified by the standard; the 53-bit
  // mantissa conversion is done by hand so the shift is portable too.
  std::mt19937_64 rng(seed);
  std::vector<double> shift(n);
  for (auto& s : shift) s = static_cast<double>(rng() >> 11) * 0x1.0p-53;

  std::vector<std::vector<double>> pts(count, std::vector<double>(n));
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      double t = radical_inverse(i + 1, primes[k]) + shift[k];
      t -= std::floor(t);
      pts[i][k] = box.lo[k] + t * (box.hi[k] - box.lo[k]);
    }
  }
  return pts;
}

}  // namespace wdvv
