#pragma once

// Adaptive Dormand-Prince 5(4) (Boost.Odeint) for complex-valued systems
// along a real independent variable. The accepted nodes are kept, with cubic
// Hermite interpolation between them.

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <vector>

namespace wdvv {

using OdeState = Eigen::VectorXcd;
using OdeRhs = std::function<OdeState(double s, const OdeState& y)>;

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  /// Initial step; 0 picks one from the first derivative.
  double initial_step = 0.0;
  double min_step = 1e-14;
  std::size_t max_steps = 1'000'000;
};

/// Accepted steps with states and derivatives at every node.
struct Trajectory {
  std::vector<double> s;
  std::vector<OdeState> y;
  std::vector<OdeState> dy;

  std::size_t size() const { return s.size(); }
  const OdeState& back() const { return y.back(); }
  /// Cubic Hermite interpolation between the bracketing nodes.
  OdeState at(double t) const;
};

/// Integrate from s0 to s_end (either direction). ConvergenceError when the
/// step falls below min_step or max_steps is exceeded. Exceptions thrown by
/// the right-hand side propagate.
Trajectory integrate(const OdeRhs& rhs, double s0, const OdeState& y0, double s_end, const OdeOptions& opts = {});

}  // namespace wdvv
