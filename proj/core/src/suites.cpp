#include "wdvv/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <fmt/format.h>
#include <fstream>
#include <functional>
#include <future>

#include "wdvv/errors.hpp"
#include "wdvv/lg_model.hpp"
#include "wdvv/n2_family.hpp"
#include "wdvv/n3_top.hpp"
#include "wdvv/sampling.hpp"
#include "wdvv/schlesinger.hpp"
#include "wdvv/version.hpp"
#include "wdvv/wdvv_core.hpp"

namespace wdvv {

namespace {

struct Outcome {
  double residual = 0.0;
  std::string notes;
};

class Suite {
 public:
  explicit Suite(const RunConfig& cfg) : cfg(cfg) {}

  template <class F>
  void check(std::string name, std::string anchor, double tol, F&& f) {
    try {
      Outcome o = f();
      records.push_back(make_check(std::move(name), std::move(anchor), o.residual, tol, std::move(o.notes)));
    } catch (const std::exception& e) {
      records.push_back(failed_check(std::move(name), std::move(anchor), tol, e.what()));
    }
  }

  const RunConfig& cfg;
  std::vector<CheckRecord> records;
};

double max_abs(const CMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

std::vector<Scalar> complexify(std::span<const double> x) { return {x.begin(), x.end()}; }

// ---------------------------------------------------------------- prepotential

void prepotential_suite(Suite& s) {
  const auto& c = s.cfg;
  const Expr F = (1.0 + c.perturbation) * model111::prepotential();
  const FlatMetric eta = model111::metric();
  const EulerData euler = model111::euler();
  const auto pts = halton_points(Box::cube(3, c.prepotential_box[0], c.prepotential_box[1]), c.prepotential_samples,
                                 c.seed);
  const std::string where = fmt::format("{} quasi-random points", pts.size());
  auto over_points = [&](auto&& per_point) {
    double worst = 0.0;
    for (const auto& p : pts) worst = std::max(worst, per_point(std::span<const double>(p)));
    return Outcome{worst, where};
  };
  s.check("prepotential.associativity", "wdvv-associativity", c.tol.identity, [&] {
    return over_points([&](auto p) { return associativity_residual(third_tensor(F, p), eta).absolute; });
  });
  s.check("prepotential.normalization", "flat-metric-normalization", c.tol.identity, [&] {
    return over_points([&](auto p) { return normalization_residual(third_tensor(F, p), eta).absolute; });
  });
  s.check("prepotential.quasi_homogeneity", "quasi-homogeneity", c.tol.identity, [&] {
    return over_points([&](auto p) { return quasi_homogeneity_residual(F, euler, p).absolute; });
  });
}

// ---------------------------------------------------------------------- lg

// Chart points in the box; for the tau checks only those with q = x2/x3^3
// clear of the branch interval [0, 4/27] are kept.
std::vector<std::vector<double>> chart_points(const RunConfig& c, bool tau_domain) {
  const Box box = Box::cube(3, c.chart_box[0], c.chart_box[1]);
  std::vector<std::vector<double>> out;
  for (const auto& p : halton_points(box, 8 * c.chart_samples, c.seed + 1)) {
    if (out.size() == c.chart_samples) break;
    const double q = p[1] / (p[2] * p[2] * p[2]);
    if (tau_domain && q > 0.0 && q < 4.0 / 27.0 + 0.05) continue;
    out.push_back(p);
  }
  return out;
}

void lg_suite(Suite& s) {
  const auto& c = s.cfg;
  const std::vector<Scalar> point = complexify(c.lg_point);
  const double factor = 1.0 + c.perturbation;

  s.check("lg.structure_tensor", "residue-structure-tensor", c.tol.identity, [&] {
    const auto lg = structure_tensor_lg(RationalPotential::from_chart_point(1, 1, point)).scaled(factor);
    const auto ref = third_tensor(model111::prepotential(), point);
    return Outcome{lg.max_diff(ref), "residue sum vs third derivatives of the prepotential"};
  });
  s.check("lg.listed_values", "residue-structure-tensor", c.tol.identity, [&] {
    const auto t = structure_tensor_lg(RationalPotential::from_chart_point(1, 1, point)).scaled(factor);
    const Scalar x2 = point[1], x3 = point[2];
    const double r = std::max({std::abs(t(0, 0, 0) - 1.0), std::abs(t(0, 1, 2) - 1.0), std::abs(t(1, 1, 1) - 1.0 / x2),
                               std::abs(t(1, 2, 2) - x3), std::abs(t(2, 2, 2) - x2)});
    return Outcome{r, "c111 = 1, c123 = 1, c222 = 1/x2, c233 = x3, c333 = x2"};
  });

  const auto pts = chart_points(c, false);
  s.check("lg.residue_metric", "residue-metric", c.tol.metric, [&] {
    const CMatrix eta = model111::metric().eta().cast<Scalar>();
    double worst = 0.0;
    for (const auto& p : pts) {
      worst = std::max(worst, max_abs(residue_metric(RationalPotential::from_chart_point(1, 1, complexify(p))) - eta));
    }
    return Outcome{worst, ""};
  });
  s.check("lg.darboux_egoroff", "darboux-egoroff", c.tol.finite_difference, [&] {
    double worst = 0.0;
    for (const auto& p : pts) worst = std::max(worst, darboux_egoroff_residual(build_chart(1, 1, complexify(p))).max());
    return Outcome{worst, fmt::format("{} chart points, Richardson differences", pts.size())};
  });
  s.check("lg.rotation_closed_form", "rotation-coefficients", c.tol.metric, [&] {
    double worst = 0.0;
    for (const auto& p : pts) {
      const auto chart = build_chart(1, 1, complexify(p));
      const CMatrix& b = chart.beta;
      worst = std::max({worst, max_abs(b - b.transpose()),
                        max_abs(b.cwiseProduct(b) - model111::beta_sq(chart)) / std::max(1.0, max_abs(b))});
    }
    return Outcome{worst, "symmetry and the explicit squared formula"};
  });
  s.check("lg.idempotents", "canonical-idempotents", c.tol.metric, [&] {
    const CMatrix eta = model111::metric().eta().cast<Scalar>();
    double worst = 0.0;
    for (const auto& p : pts) {
      const auto r = idempotent_check(build_chart(1, 1, complexify(p)), eta);
      worst = std::max({worst, r.idempotent, r.partition, r.orthogonality, r.tensor_diff});
    }
    return Outcome{worst, ""};
  });

  const auto tau_pts = chart_points(c, true);
  const std::string tau_where = fmt::format("{} points with q outside [0, 4/27]", tau_pts.size());
  s.check("tau.euler_jets", "tau-euler", c.tol.identity, [&] {
    double worst = 0.0;
    for (const auto& p : tau_pts) worst = std::max(worst, tau_euler_residual(p[1], p[2]));
    return Outcome{worst, tau_where};
  });
  s.check("tau.x3_derivative", "tau-x3-derivative", c.tol.identity, [&] {
    double worst = 0.0;
    for (const auto& p : tau_pts) worst = std::max(worst, tau_x3_residual(p[1], p[2]));
    return Outcome{worst, tau_where};
  });
  s.check("tau.chart_cross_check", "tau-canonical-derivatives", c.tol.finite_difference, [&] {
    double worst = 0.0;
    for (const auto& p : tau_pts) {
      const auto r = tau_cross_check(build_chart(1, 1, complexify(p)));
      worst = std::max({worst, r.relative, std::abs(r.identity), std::abs(r.euler - 0.25)});
    }
    return Outcome{worst, "also I(log tau) = 0 and E(log tau) = 1/4 through the chart"};
  });
  s.check("tau.branch_spread", "tau-branch", c.tol.tau_spread, [&] {
    std::vector<Scalar> w;
    for (double t : c.omega_imag) w.emplace_back(0.0, t);
    return Outcome{tau_branch_spread(w, c.x3), fmt::format("{} branch points, x3 = {:g}", w.size(), c.x3)};
  });
}

// ---------------------------------------------------------------------- n2

std::string r_label(double R) { return fmt::format("R={:g}", R); }

void n2_suite(Suite& s) {
  const auto& c = s.cfg;
  const FlatMetric eta = FlatMetric::antidiagonal(2);
  for (double R : c.n2_R) {
    const std::string tag = "n2." + r_label(R);
    // the generic form is real for 2(1+2R) x2 > 0; the special branches
    // carry log x2 and need x2 > 0
    const RClass cls = classify_r(R);
    const double side = cls.kind == SpecialR::generic && 1.0 + 2.0 * R < 0.0 ? -1.0 : 1.0;
    auto pts = halton_points(Box{{-c.n2_box[1], c.n2_box[0]}, {c.n2_box[1], c.n2_box[1]}}, c.n2_samples, c.seed + 2);
    for (auto& p : pts) p[1] *= side;
    std::string note = cls.kind == SpecialR::generic ? "generic closed form" : "special branch " + to_string(cls.kind);
    if (cls.near_only) note += "; near a special value, generic form used";

    auto closed = [&](auto&& per_point) {
      Diagnostics diag;
      const Expr F = f_closed_expr(R, &diag);
      double worst = 0.0;
      for (const auto& p : pts) worst = std::max(worst, per_point(F, std::span<const double>(p)));
      std::string n = note;
      for (const auto& w : diag.warnings) n += "; " + w;
      return Outcome{worst, n};
    };
    s.check(tag + ".associativity", "wdvv-associativity", c.tol.n2,
            [&] { return closed([&](const Expr& F, auto p) { return associativity_residual(third_tensor(F, p), eta).absolute; }); });
    s.check(tag + ".normalization", "flat-metric-normalization", c.tol.n2,
            [&] { return closed([&](const Expr& F, auto p) { return normalization_residual(third_tensor(F, p), eta).absolute; }); });
    s.check(tag + ".quasi_homogeneity", "quasi-homogeneity", c.tol.n2, [&] {
      const EulerData e = n2_euler(R);
      return closed([&](const Expr& F, auto p) { return quasi_homogeneity_residual(F, e, p).absolute; });
    });
    s.check(tag + ".recursion_vs_closed_form", "n2-recursion", c.tol.n2, [&] {
      double worst = 0.0;
      for (const auto& p : pts) worst = std::max(worst, xi_closed_form_diff(R, p[0], p[1]));
      return Outcome{worst, note + "; compared at the third-derivative level"};
    });
    s.check(tag + ".tau_identity", "n2-tau", c.tol.identity, [&] {
      return Outcome{tau_identity_residual(N2Config{R, c.n2_u[0], c.n2_u[1]}), ""};
    });
  }
}

// ---------------------------------------------------------------- euler-top

void euler_top_suite(Suite& s) {
  const auto& c = s.cfg;
  const double s0 = c.top_interval[0], s1 = c.top_interval[1];
  std::optional<TopTrajectory> top;
  Scalar w0{};
  s.check("euler_top.casimir_drift", "euler-top-casimir", c.tol.casimir, [&] {
    w0 = omega_on_branch(s0, c.top_omega_guess);
    const auto signs = euler_top_signs(w0);
    if (!signs.found) throw ConvergenceError("no sign choice solves the top at the start point");
    top = integrate_top(s0, hitchin_top_state(w0, signs), s1);
    if (c.trajectory_path) {
      std::ofstream out(*c.trajectory_path);
      if (!out) throw Error("cannot write trajectory to " + *c.trajectory_path);
      write_trajectory_csv(*top, out);
    }
    return Outcome{top->casimir_drift,
                   fmt::format("s in [{:g}, {:g}], {} steps, omega = {:.6g}", s0, s1, top->path.size(), w0.real())};
  });
  s.check("euler_top.branch_tracking", "euler-top-branch", c.tol.branch, [&] {
    if (!top) throw Error("no trajectory");
    return Outcome{branch_tracking_residual(*top, w0), "squared components against the parametric branch"};
  });
  s.check("euler_top.imaginary_omega", "euler-top-branch", c.tol.branch, [&] {
    // s(omega) lies on the unit circle; integrate radially out to 2.5 s0
    double worst = 0.0;
    for (double t : c.omega_imag) {
      const Scalar w(0.0, t);
      const auto signs = euler_top_signs(w);
      if (!signs.found) throw ConvergenceError(fmt::format("no sign choice at omega = {:g}i", t));
      const Scalar s_start = hitchin_branch(w).s;
      const auto run = integrate_top(s_start, hitchin_top_state(w, signs), 2.5 * s_start);
      worst = std::max({worst, run.casimir_drift, branch_tracking_residual(run, w)});
    }
    return Outcome{worst, fmt::format("{} complex segments, Casimir drift and branch match", c.omega_imag.size())};
  });
  s.check("euler_top.sum_rule", "omega-sum-rule", c.tol.sum_rule, [&] {
    std::vector<Scalar> ws{w0};
    for (double t : c.omega_imag) ws.emplace_back(0.0, t);
    double worst = 0.0;
    Scalar unsquared{};
    for (const auto& w : ws) {
      const auto p = hitchin_branch(w, c.x3);
      worst = std::max(worst, std::abs(p.omega_sq[0] + p.omega_sq[1] + p.omega_sq[2] + 0.25));
    }
    if (top) {
      const Triple st = top->omega(0);
      unsquared = st[0] + st[1] + st[2];
    }
    return Outcome{worst,
                   fmt::format("asserted: sum of omega_k^2 = -1/4; the unsquared sum of omega_k is not constant "
                               "(at s = {:g} it is {:.17g}) and is not asserted",
                               s0, unsquared.real())};
  });
  s.check("euler_top.lame", "lame-equations", c.tol.painleve, [&] {
    double worst = 0.0;
    for (double t : c.omega_imag) {
      const auto r = lame_ode_check(Scalar(0.0, t));
      if (!r.branch_found) throw ConvergenceError(fmt::format("no sign choice at omega = {:g}i", t));
      worst = std::max({worst, r.lhs_spread, r.rhs_residual, r.omega_h_residual});
    }
    return Outcome{worst, ""};
  });
}

// ---------------------------------------------------------------- painleve

void painleve_suite(Suite& s) {
  const auto& c = s.cfg;
  const double y_scale = 1.0 + c.perturbation;
  const std::string where = fmt::format("{} imaginary omega samples", c.omega_imag.size());
  s.check("painleve.pvi", "painleve-vi", c.tol.painleve, [&] {
    double worst = 0.0;
    for (double t : c.omega_imag) worst = std::max(worst, painleve6_residual(x_from_omega(Scalar(0.0, t)), y_scale));
    return Outcome{worst, where};
  });
  s.check("painleve.hitchin_relations", "hitchin-relations", c.tol.painleve, [&] {
    double worst = 0.0;
    for (double t : c.omega_imag) worst = std::max(worst, hitchin_relations(x_from_omega(Scalar(0.0, t))).residual);
    return Outcome{worst, where};
  });
}

// ------------------------------------------------------------- schlesinger

void schlesinger_suite(Suite& s) {
  const auto& c = s.cfg;
  const double R = c.schlesinger_R;
  const std::array<Scalar, 2> u{c.schlesinger_u[0], c.schlesinger_u[1]};
  const double sep2 = std::abs(c.schlesinger_u[0] - c.schlesinger_u[1]);

  s.check("schlesinger.n2_residual", "schlesinger-equations", c.tol.schlesinger, [&] {
    auto fam = n2_family(R, c.alphas.front(), u);
    return Outcome{schlesinger_residual(fam, fam(0, 0.0), 1e-3 * sep2), ""};
  });
  s.check("schlesinger.n2_s_infinity", "s-infinity", c.tol.finite_difference, [&] {
    auto fam = n2_family(R, c.alphas.front(), u);
    std::vector<SchlesingerSystem> systems{fam(0, 0.0), fam(0, 0.1 * sep2), fam(1, -0.2 * sep2), fam(1, 0.3 * sep2)};
    return Outcome{s_infinity_spread(systems), ""};
  });
  s.check("schlesinger.n2_iso_tau", "isomonodromic-tau", c.tol.identity, [&] {
    double worst = 0.0;
    for (double a : c.alphas) worst = std::max(worst, iso_tau(n2_system(R, a, u)).residual);
    return Outcome{worst, "closed-form system"};
  });

  const auto chart = build_chart(1, 1, complexify(c.schlesinger_point));
  s.check("schlesinger.n3_residual", "schlesinger-equations", c.tol.finite_difference, [&] {
    return Outcome{schlesinger_residual(chart_family(chart), system_from_chart(chart), chart_step(chart, 1e-4)),
                   "chart system, Richardson differences"};
  });
  s.check("schlesinger.n3_s_infinity", "s-infinity", c.tol.finite_difference, [&] {
    auto fam = chart_family(chart);
    std::vector<SchlesingerSystem> systems{system_from_chart(chart)};
    for (std::size_t j = 0; j < 3; ++j) systems.push_back(fam(j, 0.01 * static_cast<double>(j + 1)));
    systems.push_back(fam(0, -0.02));
    return Outcome{s_infinity_spread(systems), ""};
  });
  s.check("schlesinger.n3_iso_tau", "isomonodromic-tau", c.tol.finite_difference, [&] {
    double worst = 0.0;
    for (double a : c.alphas) worst = std::max(worst, iso_tau(system_from_chart(chart, a)).residual);
    return Outcome{worst, "chart system"};
  });
  s.check("schlesinger.alpha_independence", "alpha-independence", c.tol.identity, [&] {
    const auto ref2 = iso_tau(n2_system(R, c.alphas.front(), u));
    const auto ref3 = iso_tau(system_from_chart(chart, c.alphas.front()));
    double worst = 0.0;
    for (double a : c.alphas) {
      const auto t2 = iso_tau(n2_system(R, a, u));
      const auto t3 = iso_tau(system_from_chart(chart, a));
      worst = std::max({worst, std::abs(t2.residual - ref2.residual), std::abs(t3.residual - ref3.residual)});
      for (std::size_t j = 0; j < 2; ++j) worst = std::max(worst, std::abs(t2.from_s[j] - ref2.from_s[j]));
      for (std::size_t j = 0; j < 3; ++j) worst = std::max(worst, std::abs(t3.from_s[j] - ref3.from_s[j]));
    }
    return Outcome{worst, fmt::format("{} values of alpha", c.alphas.size())};
  });
  s.check("schlesinger.m_transport", "m-transport", c.tol.transport, [&] {
    double sep = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = i + 1; j < 3; ++j) sep = std::min(sep, std::abs(chart.u[i] - chart.u[j]));
    const std::vector<Scalar> du{0.05 * sep, -0.03 * sep, 0.02 * sep};
    const auto r = m_transport_check(chart, du);
    return Outcome{std::max(r.path_difference, r.chart_difference), "two homotopic paths and the chart's own M"};
  });
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::vector<CheckRecord> run_suite(const std::string& name, const RunConfig& cfg) {
  static const std::vector<std::pair<std::string, void (*)(Suite&)>> table{
      {"prepotential", prepotential_suite}, {"lg", lg_suite},           {"n2", n2_suite},
      {"euler-top", euler_top_suite},       {"painleve", painleve_suite}, {"schlesinger", schlesinger_suite}};
  const auto it = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == name; });
  if (it == table.end()) throw ConfigError("unknown suite '" + name + "'");
  Suite s(cfg);
  try {
    it->second(s);
  } catch (const std::exception& e) {
    // set-up shared by several checks failed before they could run
    s.records.push_back(failed_check(name + ".setup", "suite-setup", 0.0, e.what()));
  }
  return s.records;
}

Report run(const RunConfig& cfg) {
  cfg.validate();
  Report r;
  r.version = kVersion;
  r.seed = cfg.seed;
  r.config_json = config_to_json(cfg);
  r.generated_at = utc_now();
  const auto names = cfg.expanded_suites();
  std::vector<std::vector<CheckRecord>> parts(names.size());
  if (cfg.parallel) {
    std::vector<std::future<std::vector<CheckRecord>>> jobs;
    for (const auto& n : names) jobs.push_back(std::async(std::launch::async, [&cfg, n] { return run_suite(n, cfg); }));
    for (std::size_t i = 0; i < jobs.size(); ++i) parts[i] = jobs[i].get();
  } else {
    for (std::size_t i = 0; i < names.size(); ++i) parts[i] = run_suite(names[i], cfg);
  }
  for (auto& p : parts) r.checks.insert(r.checks.end(), p.begin(), p.end());
  return r;
}

}  // namespace wdvv
