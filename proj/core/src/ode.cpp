#include "wdvv/ode.hpp"

#include <algorithm>
#include <cmath>
#include <boost/numeric/odeint.hpp>
#include <fmt/format.h>
#include <vector>

#include "wdvv/errors.hpp"

namespace wdvv {

namespace {

namespace odeint = boost::numeric::odeint;

// odeint's range algebra needs real components, so complex states travel as
// interleaved (re, im) pairs.
using Packed = std::vector<double>;

Packed pack(const OdeState& y) {
  Packed p(2 * static_cast<std::size_t>(y.size()));
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    p[2 * static_cast<std::size_t>(i)] = y(i).real();
    p[2 * static_cast<std::size_t>(i) + 1] = y(i).imag();
  }
  return p;
}

OdeState unpack(const Packed& p) {
  OdeState y(static_cast<Eigen::Index>(p.size() / 2));
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    y(i) = {p[2 * static_cast<std::size_t>(i)], p[2 * static_cast<std::size_t>(i) + 1]};
  }
  return y;
}

}  // namespace

OdeState Trajectory::at(double t) const {
  if (s.empty()) throw ShapeError("empty trajectory");
  const bool forward = s.back() >= s.front();
  const double lo = forward ? s.front() : s.back(), hi = forward ? s.back() : s.front();
  if (t < lo - 1e-12 * std::max(1.0, std::abs(lo)) || t > hi + 1e-12 * std::max(1.0, std::abs(hi))) {
    throw DomainError(fmt::format("s = {} outside the integrated range", t));
  }
  if (s.size() == 1) return y.front();
  std::size_t k = 0;
  if (forward) {
    k = static_cast<std::size_t>(std::upper_bound(s.begin(), s.end(), t) - s.begin());
  } else {
    k = static_cast<std::size_t>(std::upper_bound(s.begin(), s.end(), t, std::greater<>()) - s.begin());
  }
  k = std::clamp<std::size_t>(k, 1, s.size() - 1);
  const double h = s[k] - s[k - 1];
  const double th = (t - s[k - 1]) / h;
  const double h00 = (1 + 2 * th) * (1 - th) * (1 - th), h10 = th * (1 - th) * (1 - th);
  const double h01 = th * th * (3 - 2 * th), h11 = th * th * (th - 1);
  return h00 * y[k - 1] + (h10 * h) * dy[k - 1] + h01 * y[k] + (h11 * h) * dy[k];
}

Trajectory integrate(const OdeRhs& rhs, double s0, const OdeState& y0, double s_end, const OdeOptions& opts) {
  Trajectory tr;
  tr.s.push_back(s0);
  tr.y.push_back(y0);
  tr.dy.push_back(rhs(s0, y0));
  if (s_end == s0) return tr;

  const double dir = s_end > s0 ? 1.0 : -1.0;
  const double span = std::abs(s_end - s0);
  double h = opts.initial_step;
  if (h <= 0.0) {
    const double d0 = y0.size() ? y0.cwiseAbs().maxCoeff() : 0.0;
    const double d1 = tr.dy[0].size() ? tr.dy[0].cwiseAbs().maxCoeff() : 0.0;
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  }
  h = std::min(h, span);

  auto system = [&rhs](const Packed& x, Packed& dxdt, double t) { dxdt = pack(rhs(t, unpack(x))); };
  auto stepper = odeint::make_dense_output(opts.atol, opts.rtol, odeint::runge_kutta_dopri5<Packed>());
  stepper.initialize(pack(y0), s0, dir * h);

  std::size_t steps = 0;
  try {
    while (dir * (s_end - stepper.current_time()) > 0.0) {
      if (++steps > opts.max_steps) throw ConvergenceError("ODE integration exceeded the step budget");
      const double t = stepper.current_time();
      const double remaining = std::abs(s_end - t);
      const double step = std::abs(stepper.current_time_step());
      if (step < opts.min_step * std::max(1.0, std::abs(t))) {
        throw ConvergenceError(fmt::format("ODE step underflow at s = {:.17g}", t));
      }
      // land on s_end exactly instead of overshooting
      if (step > remaining) stepper.initialize(stepper.current_state(), t, dir * remaining);
      stepper.do_step(system);
      const bool last = dir * (s_end - stepper.current_time()) <= 1e-14 * std::max(1.0, std::abs(s_end));
      const double node = last ? s_end : stepper.current_time();
      OdeState y = unpack(stepper.current_state());
      if (!y.allFinite()) throw ConvergenceError(fmt::format("non-finite state near s = {:.17g}", node));
      tr.s.push_back(node);
      tr.dy.push_back(rhs(node, y));
      tr.y.push_back(std::move(y));
      if (last) break;
    }
  } catch (const odeint::odeint_error& e) {
    throw ConvergenceError(fmt::format("ODE integration failed near s = {:.17g}: {}", stepper.current_time(), e.what()));
  }
  return tr;
}

}  // namespace wdvv
