#pragma once

// Rational Landau-Ginzburg potentials
//
//   W(z) = z^{n+1}/(n+1) + a_{n-1} z^{n-1} + ... + a_0
//          + v_1/(z - v_{m+1}) + v_2/(2 (z - v_{m+1})^2) + ... + v_m/(m (z - v_{m+1})^m)
//
// and the Darboux-Egoroff data they carry: critical points, canonical
// coordinates u_i = W(alpha_i), Lame coefficients h_i^2 and rotation
// coefficients beta_ij.
//
// Chart coordinates are (a_{n-1}, ..., a_0, x_1, ..., x_{m+1}) where the x are
// the flat coordinates of the pole part. For m = 0 the pole part is absent.

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "wdvv/expr.hpp"
#include "wdvv/jet.hpp"
#include "wdvv/wdvv_core.hpp"

namespace wdvv {

using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Pole-part coefficients v_1..v_{m+1} from flat coordinates x_1..x_{m+1}:
/// v_k = sum over ordered (a_1..a_k) in {1..m}^k with a_1+..+a_k = (k-1)m + k
/// of x_{a_1}...x_{a_k}, and v_{m+1} = x_{m+1}.
std::vector<Scalar> flat_to_v(std::span<const Scalar> x);
std::vector<Jet> flat_to_v(std::span<const Jet> x);

struct RationalPotential {
  std::size_t n = 1;
  std::size_t m = 1;
  std::vector<Scalar> a;  // a_0 .. a_{n-1}
  std::vector<Scalar> v;  // v_1 .. v_{m+1}; empty when m == 0
  /// The chart point the coefficients were built from (the pole part is
  /// nonlinear in the flat coordinates, so they are kept alongside).
  std::vector<Scalar> chart;

  /// Potential at a chart point (a_{n-1}..a_0, x_1..x_{m+1}).
  static RationalPotential from_chart_point(std::size_t n, std::size_t m, std::span<const Scalar> x);

  std::size_t chart_dim() const { return m == 0 ? n : n + m + 1; }
  std::size_t critical_count() const { return m == 0 ? n : n + m + 1; }
  bool has_pole() const { return m > 0; }
  Scalar pole() const { return v.back(); }

  void validate() const;
};

/// W(z). Throws DomainError at the pole.
Scalar eval_W(const RationalPotential& p, Scalar z);
Jet eval_W(const RationalPotential& p, const Jet& z);
/// W'(z) and W''(z).
Scalar eval_dW(const RationalPotential& p, Scalar z);
Scalar eval_d2W(const RationalPotential& p, Scalar z);

/// Coefficients (constant term first) of the monic polynomial
/// W'(z) (z - v_{m+1})^{m+1} whose roots are the critical points.
std::vector<Scalar> critical_polynomial(const RationalPotential& p);

struct CriticalPointOptions {
  double discriminant_threshold = 1e-10;
  double residual_threshold = 1e-9;
  int newton_steps = 4;
};

/// Roots of W' in lexicographic order (real part, then imaginary part).
/// Throws DegenerateError for (near) multiple roots and ConvergenceError when
/// a polished root leaves |W'| above the residual threshold.
std::vector<Scalar> critical_points(const RationalPotential& p, const CriticalPointOptions& opts = {});

/// Normalized discriminant prod_{i<j} (alpha_i - alpha_j)^2 / scale^{N(N-1)}.
double normalized_discriminant(std::span<const Scalar> roots);

/// u_i = W(alpha_i) in the critical_points order.
std::vector<Scalar> canonical_coords(const RationalPotential& p, const CriticalPointOptions& opts = {});

/// Tangent vectors dW/dx_alpha as expressions in z (variable 0), one per chart
/// coordinate.
std::vector<Expr> tangent_frame(const RationalPotential& p);

/// g(t1, t2) = sum_i t1(alpha_i) t2(alpha_i) / W''(alpha_i).
Scalar residue_pairing(const RationalPotential& p, const Expr& t1, const Expr& t2,
                       const CriticalPointOptions& opts = {});
/// Full Gram matrix of the tangent frame.
CMatrix residue_metric(const RationalPotential& p, const CriticalPointOptions& opts = {});

/// c(a,b,c) = sum_i (d_aW d_bW d_cW / W'')(alpha_i) over the tangent frame.
StructureTensor structure_tensor_lg(const RationalPotential& p, const CriticalPointOptions& opts = {});

struct ChartOptions {
  CriticalPointOptions roots{};
  /// Relative threshold under which |W''(alpha_i)| counts as degenerate.
  double degenerate_threshold = 1e-10;
};

/// Canonical chart at one chart point.
struct CanonicalChart {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<Scalar> chart_point;
  std::vector<Scalar> alpha;
  std::vector<Scalar> u;
  std::vector<Scalar> h_sq;
  /// Chosen square roots of h_sq; branch_signs[i] = +1 when h[i] is the
  /// principal root, -1 otherwise.
  std::vector<Scalar> h;
  std::vector<int> branch_signs;
  CMatrix du_dx;    // (i, alpha)
  CMatrix dx_du;    // (alpha, i)
  CMatrix dhsq_dx;  // (i, alpha)
  CMatrix beta;     // symmetric, zero diagonal

  std::size_t size() const { return alpha.size(); }
  /// Metric of the chart coordinates, du_dx^T diag(h_sq) du_dx.
  CMatrix eta() const;
  /// m_{i alpha} = (dx_alpha/du_i) / h_i.
  CMatrix m_matrix() const;
  RationalPotential potential() const { return RationalPotential::from_chart_point(n, m, chart_point); }
};

/// Build the chart. When reference is given the critical points are matched
/// to it by nearest neighbour and the square-root branches of h are continued
/// from it; otherwise the lexicographic order and principal roots are used.
CanonicalChart build_chart(std::size_t n, std::size_t m, std::span<const Scalar> chart_point,
                           const CanonicalChart* reference = nullptr, const ChartOptions& opts = {});

/// Chart at the point displaced by t along u_k (straight line in chart
/// coordinates along the column dx/du_k), matched to base.
CanonicalChart chart_along_u(const CanonicalChart& base, std::size_t k, double t, const ChartOptions& opts = {});

/// h_i^2 = (alpha_i - v_{m+1})^{m+1} / prod_{j != i} (alpha_i - alpha_j).
std::vector<Scalar> lame_coeffs(const RationalPotential& p, std::span<const Scalar> alpha);

/// beta_ij = d_j h_i^2 / (2 h_i h_j) with d_j = sum_alpha (dx_alpha/du_j) d_alpha.
CMatrix rotation_coeffs(const CanonicalChart& chart);

// Closed forms for the n = m = 1 model W = z^2/2 + x1 + x2/(z - x3).
namespace model111 {
/// F = x2 x3^3/6 + x1^3/6 + x1 x2 x3 + x2^2 (log x2 - 3/2)/2 in (x1, x2, x3).
Expr prepotential();
/// Flat metric of the chart coordinates (x1 paired with itself, x2 with x3).
FlatMetric metric();
/// Weights (1, 3/2, 1/2), no shifts, d_F = 3.
EulerData euler();
std::vector<Scalar> h_sq(const CanonicalChart& c);
/// beta_ij from the explicit formula, up to the sign of the square root.
CMatrix beta(const CanonicalChart& c);
/// beta_ij^2 = -(alpha_i - alpha_j)^{-2} (4 x3 - 3 alpha_k)^{-2} dx1/du_k.
CMatrix beta_sq(const CanonicalChart& c);
/// dx_alpha/du_i from the explicit inversion.
CMatrix dx_du(const CanonicalChart& c);
}  // namespace model111

/// Family of beta matrices displaced by t along u_k.
using UFamily = std::function<CMatrix(std::size_t k, double t)>;

struct DarbouxEgoroffResidual {
  double rotation = 0.0;     // d_k beta_ij - beta_ik beta_kj
  double translation = 0.0;  // sum_k d_k beta_ij
  double scaling = 0.0;      // sum_k u_k d_k beta_ij + beta_ij
  double max() const;
};

DarbouxEgoroffResidual darboux_egoroff_residual(const UFamily& beta, std::span<const Scalar> u, double h,
                                                bool richardson = true);
/// beta along u for a chart; step scaled by max(1, max|u_i|) and checked
/// against the minimal separation of canonical coordinates.
UFamily chart_beta_family(const CanonicalChart& base, const ChartOptions& opts = {});
DarbouxEgoroffResidual darboux_egoroff_residual(const CanonicalChart& chart, double step = 1e-4,
                                                bool richardson = true);
/// Step actually used for the chart-based finite differences.
double chart_step(const CanonicalChart& chart, double step);

struct VMatrices {
  std::vector<CMatrix> V_j;
  CMatrix V;
};

/// (V_j)_{kl} = (delta_lj - delta_kj) beta_kl and V_ij = (u_j - u_i) beta_ij.
VMatrices v_matrices(const CMatrix& beta, std::span<const Scalar> u);
VMatrices v_matrices(const CanonicalChart& chart);

/// max |d_j V - [V_j, V]| over j, finite differences along u.
double v_flow_residual(const CanonicalChart& chart, double step = 1e-4);

struct IdempotentReport {
  double idempotent = 0.0;   // max |C_i C_j - delta_ij C_i|
  double partition = 0.0;    // |sum C_i - Id|
  double tensor_diff = 0.0;  // m-matrix structure tensor vs residue tensor
  double orthogonality = 0.0;  // |M^T M - eta^{-1}|
};

/// C_j = M^{-1} E_jj M and the structure tensor from the m-matrix,
/// c = sum_j m_ja m_jb m_jc / m_j1 (upper chart indices), lowered with eta
/// before comparison with structure_tensor_lg.
IdempotentReport idempotent_check(const CanonicalChart& chart, const CMatrix& eta);

/// Diagonal of M^{-1} V M (the exponents mu_alpha) and its off-diagonal size.
struct MuReport {
  std::vector<Scalar> mu;
  double off_diagonal = 0.0;
};
MuReport mu_from_chart(const CanonicalChart& chart);

/// E(x_alpha) = sum_i u_i dx_alpha/du_i and I(x_alpha) = sum_i dx_alpha/du_i.
std::vector<Scalar> euler_action(const CanonicalChart& chart);
std::vector<Scalar> identity_action(const CanonicalChart& chart);

/// JSON object {n, m, flat_point, alpha, u, h_sq, beta, branch_signs};
/// complex numbers as [re, im].
std::string chart_to_json(const CanonicalChart& chart);

}  // namespace wdvv
