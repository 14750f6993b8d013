#pragma once

// Schlesinger systems S_i = M^{-1} E_ii (V - alpha I) M built from dressing
// data: in closed form for N = 2 and from a canonical chart otherwise.

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "wdvv/lg_model.hpp"
#include "wdvv/ode.hpp"

namespace wdvv {

struct SchlesingerSystem {
  std::vector<Scalar> u;
  std::vector<CMatrix> S;
  double alpha = 0.0;
  CMatrix M;
  CMatrix V;
  std::vector<CMatrix> V_j;

  std::size_t size() const { return u.size(); }
  /// sum_i S_i, which should not depend on u.
  CMatrix s_infinity() const;
};

/// Build S_i from M, V and the shift alpha.
SchlesingerSystem make_system(std::vector<Scalar> u, const CMatrix& M, const CMatrix& V, std::vector<CMatrix> V_j,
                              double alpha);

/// M = exp(R log(u1 - u2) sigma2) S with S = [[-1, -1], [-i, i]] / sqrt(2).
SchlesingerSystem n2_system(double R, double alpha, std::array<Scalar, 2> u);

/// From the chart's m-matrix, after checking V has distinct eigenvalues.
SchlesingerSystem system_from_chart(const CanonicalChart& chart, double alpha = 0.0);

/// System displaced by t along u_j.
using SystemFamily = std::function<SchlesingerSystem(std::size_t j, double t)>;
SystemFamily n2_family(double R, double alpha, std::array<Scalar, 2> u);
SystemFamily chart_family(const CanonicalChart& chart, double alpha = 0.0);

/// max of |d_j S_i - [S_i, S_j]/(u_j - u_i)| (i != j) and
/// |d_i S_i - sum_{j != i} [S_i, S_j]/(u_i - u_j)|. DegenerateError when h
/// exceeds 0.05 min |u_i - u_j|.
double schlesinger_residual(const SystemFamily& family, const SchlesingerSystem& base, double h,
                            bool richardson = true);

/// log2 of the residual ratio between steps h and h/2.
double observed_order(const SystemFamily& family, const SchlesingerSystem& base, double h, bool richardson = true);

/// Per j: sum_{k != j} tr(S_j S_k)/(u_j - u_k) and 1/2 tr(V_j V).
struct IsoTau {
  std::vector<Scalar> from_s;
  std::vector<Scalar> from_v;
  double residual = 0.0;
};
IsoTau iso_tau(const SchlesingerSystem& sys);

/// Entrywise spread of S_infinity over a set of systems.
double s_infinity_spread(std::span<const SchlesingerSystem> systems);

/// Chart at prescribed canonical coordinates, by Newton in chart
/// coordinates starting from base (roots and branches matched to it).
CanonicalChart chart_at_u(const CanonicalChart& base, std::span<const Scalar> u_target);

/// Transport of M by dM/dt = sum_j du_j V_j M from base to base.u + du, along
/// the straight path and along the path that moves u_1 first.
struct TransportCheck {
  double path_difference = 0.0;   // between the two transported matrices
  double chart_difference = 0.0;  // straight path vs the chart's own M at the end
};
TransportCheck m_transport_check(const CanonicalChart& base, std::span<const Scalar> du, const OdeOptions& opts = {});

}  // namespace wdvv
