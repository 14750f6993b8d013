#pragma once

// Low-discrepancy sample points for the verification suites.

#include <cstddef>
#include <cstdint>
#include <vector>

namespace wdvv {

/// Axis-aligned box in R^n.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  static Box cube(std::size_t n, double lo, double hi);
  std::size_t dim() const { return lo.size(); }
};

/// Halton points in the box with a seeded Cranley-Patterson rotation, so
/// different seeds give different (but still low-discrepancy) point sets.
/// Deterministic for a given seed across platforms.
std::vector<std::vector<double>> halton_points(const Box& box, std::size_t count, std::uint64_t seed);

/// Radical inverse of i in the given prime base (the Halton coordinate).
double radical_inverse(std::uint64_t i, unsigned base);

}  // namespace wdvv
