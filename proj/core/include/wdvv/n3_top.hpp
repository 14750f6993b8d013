#pragma once

// Three-dimensional case: the Euler top for omega_k = (u_j - u_i) beta_ij,
// the algebraic (Hitchin) branch parametrized by a complex omega, the
// Painleve VI curve it traces, the Lame coefficient ODEs and the tau function
// of the n = m = 1 rational model.
//
// Root labeling: h_i^2 = (A_i - 1)/(3 A_i - 1) with A = (a1, a3, a2), the
// order in which the roots of a(a-1)^2 = q pair with omega_i^2 = -h_i^2/4.

#include <array>
#include <iosfwd>
#include <span>

#include "wdvv/jet.hpp"
#include "wdvv/lg_model.hpp"
#include "wdvv/ode.hpp"

namespace wdvv {

using Triple = std::array<Scalar, 3>;

/// (w2 w3 / s, w1 w3 / (s (s-1)), w1 w2 / (1 - s)); DomainError at s in {0, 1}.
Triple euler_top_rhs(Scalar s, const Triple& w);

/// Solution along the segment s = origin + direction * t; path.s holds t.
/// Real runs have origin 0 and direction 1, so t is s itself.
struct TopTrajectory {
  Trajectory path;
  Scalar origin{0.0};
  Scalar direction{1.0};
  Scalar casimir0{};
  /// max over nodes of |sum w_k^2 - casimir0|
  double casimir_drift = 0.0;

  Scalar s(std::size_t node) const { return origin + direction * path.s[node]; }
  Triple omega(std::size_t node) const;
  /// Dense output at path parameter t.
  Triple omega_at(double t) const;
};

/// Along the real axis. DomainError when [s0, s_end] passes within 1e-6 of 0 or 1.
TopTrajectory integrate_top(double s0, const Triple& w0, double s_end, const OdeOptions& opts = {});
/// Along the straight segment from s0 to s_end in the complex plane,
/// parametrized by arc length.
TopTrajectory integrate_top(Scalar s0, const Triple& w0, Scalar s_end, const OdeOptions& opts = {});

/// Columns s_re, s_im, re/im of w1..w3, re/im of the Casimir; one row per node.
void write_trajectory_csv(const TopTrajectory& t, std::ostream& out);

struct HitchinPoint {
  Scalar omega{}, x{}, s{}, y{}, q{};
  std::array<Scalar, 3> a{};         // a1, a2, a3
  std::array<Scalar, 3> omega_sq{};  // omega_1^2 .. omega_3^2
  std::array<Scalar, 3> h_sq{};      // from the labeled roots (a1, a3, a2)
  Scalar u_diff{};                   // u2 - u3 = 8 x3^2 omega^3 / (omega^2 + 3)^2
};

/// DomainError within 1e-9 of omega in {0, +-1, +-3}.
HitchinPoint hitchin_branch(Scalar omega, Scalar x3 = 1.0);
Scalar omega_from_x(Scalar x);
Scalar x_from_omega(Scalar omega);

/// Newton on s(omega) = s starting from guess.
Scalar omega_on_branch(Scalar s, Scalar guess);

/// Sign choice for omega_k = sign_k sqrt(omega_k^2) solving the Euler top at
/// the branch point; residual is the best |d omega/ds - rhs| found.
struct SignChoice {
  std::array<int, 3> signs{1, 1, 1};
  double residual = 0.0;
  bool found = false;
};
SignChoice euler_top_signs(Scalar omega);
Triple hitchin_top_state(Scalar omega, const SignChoice& signs);

/// max_k |w_k(s)^2 - omega_k^2(omega(s))| along the trajectory, omega(s)
/// continued node to node from omega0.
double branch_tracking_residual(const TopTrajectory& t, Scalar omega0);

/// |PVI(y, y', y'', s)| on the curve y(x), s(x); y_scale multiplies y(x)
/// (1 for the actual curve).
double painleve6_residual(Scalar x, double y_scale = 1.0);

struct HitchinRelations {
  Scalar v{};
  std::array<Scalar, 3> factors{};  // v - 1/(2y), v - 1/(2(y-1)), v - 1/(2(y-s))
  std::array<Scalar, 3> omega_sq{};
  double residual = 0.0;  // against the omega parametrization
};
HitchinRelations hitchin_relations(Scalar x);

struct LameReport {
  std::array<Scalar, 3> lhs{};  // s h1'^2, (s-1) s h2'^2, (1-s) h3'^2 (prime = d/ds)
  double lhs_spread = 0.0;
  std::array<int, 3> signs{1, 1, 1};
  double rhs_residual = 0.0;  // best over the eight sign choices
  bool branch_found = false;
  double omega_h_residual = 0.0;  // max |omega_i^2 + h_i^2 / 4|
};
LameReport lame_ode_check(Scalar omega);

/// log tau = 1/4 log x3^2 + 1/24 log(q^3 (27 q - 4)), q = x2 / x3^3.
Scalar log_tau_n3(Scalar x2, Scalar x3);
Jet log_tau_n3(const Jet& x2, const Jet& x3);
/// |(3/2 x2 d2 + 1/2 x3 d3) log tau - 1/4|
double tau_euler_residual(Scalar x2, Scalar x3);
/// |x3 d3 log tau - 1/8 / (1 - 27q/4)|
double tau_x3_residual(Scalar x2, Scalar x3);
/// Relative spread over omegas of x3^12 q^3 (27q - 4) divided by
/// (u2-u3)^6 (w-1)^6 (w+1)^6 (w-3)^2 (w+3)^2 w^-16 along the branch.
double tau_branch_spread(std::span<const Scalar> omegas, Scalar x3);

struct TauCrossCheck {
  double relative = 0.0;  // max_j |d_j log tau - sum_i beta_ij^2 (u_i - u_j)| / scale
  Scalar identity{};      // I(log tau)
  Scalar euler{};         // E(log tau)
};
TauCrossCheck tau_cross_check(const CanonicalChart& chart);

}  // namespace wdvv
