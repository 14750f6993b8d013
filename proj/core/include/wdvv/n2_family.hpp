#pragma once

// Two-dimensional Frobenius manifolds from the dressing construction with
// mu = diag(R, -R), tau = (u1 - u2)^{R^2}.
//
// The recursion runs on jets in the flat coordinates (x1, x2), so the
// prepotential it produces can be compared with the closed forms at the
// level of third derivatives, where the additive constants of the recursion
// drop out.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "wdvv/expr.hpp"
#include "wdvv/jet.hpp"
#include "wdvv/lg_model.hpp"
#include "wdvv/wdvv_core.hpp"

namespace wdvv {

struct N2Config {
  double R = 0.0;
  Scalar u1{1.0};
  Scalar u2{0.0};
  /// Accept complex tau0 (principal branches). Off by default.
  bool allow_complex = false;

  Scalar tau0() const { return u1 - u2; }
  void validate() const;
};

/// Where R sits relative to the values with their own closed form.
enum class SpecialR { generic, half, minus_half, minus_three_halves };

struct RClass {
  SpecialR kind = SpecialR::generic;
  /// R is within 1e-6 but not 1e-9 of a special value.
  bool near_only = false;
};
RClass classify_r(double R);
std::string to_string(SpecialR s);

/// Collects warnings (near-special R dispatch and the like).
struct Diagnostics {
  std::vector<std::string> warnings;
};

/// 1/2 [[u1+u2, tau0^{1-2R}], [tau0^{1+2R}, u1+u2]].
CMatrix calU_n2(const N2Config& cfg);

/// (x1, x2) = (1/2 (u1+u2), tau0^{1+2R} / (2(1+2R))); x2 = 1/2 log tau0 at R = -1/2.
std::array<Scalar, 2> flat_coords_n2(const N2Config& cfg);

/// Closed-form prepotential, dispatching to the special branches within
/// 1e-9 of R in {1/2, -1/2, -3/2} (within 1e-6 with a warning).
Scalar f_closed(double R, Scalar x1, Scalar x2, Diagnostics* diag = nullptr);
Expr f_closed_expr(double R, Diagnostics* diag = nullptr);
/// Generic formula only; DomainError at the special values.
Expr f_generic_expr(double R);

/// Euler field of the closed form: d = (1, 1+2R), d_F = 3+2R; at R = -1/2
/// the x2 direction is a translation (d2 = 0, r2 = 1/2, d_F = 2).
EulerData n2_euler(double R);

/// 2x2 matrix of jets, row major.
struct JetMatrix2 {
  std::array<Jet, 4> e;
  Jet& operator()(std::size_t a, std::size_t b) { return e[2 * a + b]; }
  const Jet& operator()(std::size_t a, std::size_t b) const { return e[2 * a + b]; }
};

JetMatrix2 operator*(const JetMatrix2& a, const JetMatrix2& b);

/// calU as jets in (x1, x2) at a flat point, and the coefficient e2 of the
/// Euler field E = x1 d/dx1 + e2 d/dx2.
struct FlatCalU {
  JetMatrix2 calU;
  Jet e2;
  Jet x1;
};
FlatCalU calU_flat(double R, Scalar x1, Scalar x2, std::size_t order);

struct XiSeries {
  double R = 0.0;
  std::size_t order = 0;          // jet order
  std::array<double, 2> mu{};     // diagonal of mu
  std::vector<JetMatrix2> terms;  // Xi^(1) .. Xi^(levels)
  JetMatrix2 calU;
  Jet x1, x2;
  /// resonant[n-1][2a+b]: entry solved by the flow rather than algebraically.
  std::vector<std::array<bool, 4>> flow_entries;
};

/// One step of (n - mu_a + mu_b) X_ab = (calU prev)_ab. Entries that are
/// resonant (|n - mu_a + mu_b| < 1e-9) or in a column already obtained from
/// the flow are integrated from dX/dx1 = prev, E(X) = calU prev instead, and
/// their column is added to flagged. DegenerateError if the flow is not
/// integrable (gradient curl above tolerance).
JetMatrix2 xi_step(std::size_t n, const JetMatrix2& prev, std::array<double, 2> mu, const FlatCalU& data,
                   std::array<bool, 2>& flagged, std::array<bool, 4>* flow_entries = nullptr);

/// Xi^(1..levels) at the flat point. Xi^(1) has first column (x1, x2).
XiSeries xi_series(double R, Scalar x1, Scalar x2, std::size_t levels = 3, std::size_t order = 3);

/// Largest |(n - ad mu) Xi^(n) - calU Xi^(n-1)| over non-resonant entries,
/// read from the jet values.
double xi_recursion_defect(const XiSeries& xi);

/// F = 1/2 (-Xi3_21 + x1 Xi2_21 + x2 Xi2_22) as a jet; ShapeError when the
/// series has fewer than three terms.
Jet prepotential_from_xi(const XiSeries& xi);

/// Max third-derivative difference between the recursion and the closed form.
double xi_closed_form_diff(double R, Scalar x1, Scalar x2);

/// V = R sigma2 and V_j = d_j(R log tau0) sigma2 at the configuration.
VMatrices v_matrices_n2(const N2Config& cfg);
/// max_j |d_j log tau - 1/2 tr(V_j V)| with d_j log tau from central
/// differences of R^2 log tau0.
double tau_identity_residual(const N2Config& cfg);

}  // namespace wdvv
