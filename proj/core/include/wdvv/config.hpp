#pragma once

// Run configuration for the verification suites. The on-disk form is a JSON
// document; unknown keys are rejected so that a misspelled tolerance cannot
// silently fall back to its default.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace wdvv {

/// Environment variable naming the default configuration file.
inline constexpr const char* kConfigEnv = "WDVV_CONFIG";

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"prepotential", "lg", "n2", "euler-top", "painleve", "schlesinger"};
  return names;
}

struct Tolerances {
  double identity = 1e-10;           // closed-form and jet identities
  double n2 = 1e-9;                  // recursion vs closed forms
  double finite_difference = 1e-5;   // anything differentiated numerically
  double metric = 1e-9;              // constancy of the residue metric
  double casimir = 1e-9;
  double branch = 1e-6;              // integrated top vs parametric branch
  double sum_rule = 1e-12;
  double painleve = 1e-8;
  double tau_spread = 1e-8;
  double schlesinger = 1e-7;
  double transport = 1e-6;

  bool operator==(const Tolerances&) const = default;
};

struct RunConfig {
  std::vector<std::string> suites{"all"};
  std::uint64_t seed = 20240601;
  /// Run suites on separate threads; the report order does not change.
  bool parallel = false;
  /// Multiplicative perturbation of the tested objects (negative controls).
  double perturbation = 0.0;

  // prepotential
  std::size_t prepotential_samples = 20;
  std::array<double, 2> prepotential_box{0.5, 2.0};

  // lg
  std::vector<double> lg_point{1.0, 2.0, 3.0};
  std::size_t chart_samples = 5;
  std::array<double, 2> chart_box{0.5, 2.0};
  double x3 = 1.0;

  // n2
  std::vector<double> n2_R{0.0, 0.3, 1.0, -0.7, 0.5, -0.5, -1.5};
  std::size_t n2_samples = 3;
  std::array<double, 2> n2_box{0.3, 1.7};
  std::array<double, 2> n2_u{2.5, 0.75};

  // euler-top
  std::array<double, 2> top_interval{2.0, 5.0};
  double top_omega_guess = 0.9;

  // painleve: imaginary parts of the omega samples
  std::vector<double> omega_imag;

  // schlesinger
  double schlesinger_R = 1.0;
  std::vector<double> alphas{0.0, 0.7};
  std::array<double, 2> schlesinger_u{2.0, 1.0};
  std::vector<double> schlesinger_point{0.3, 0.5, 1.0};

  Tolerances tol;

  std::optional<std::string> report_path;
  std::optional<std::string> trajectory_path;

  RunConfig();
  /// Throws ConfigError naming the offending field.
  void validate() const;
  /// Selected suites in canonical order with "all" expanded.
  std::vector<std::string> expanded_suites() const;

  bool operator==(const RunConfig&) const = default;
};

/// Evenly spaced imaginary parts in [0.2, 5], skipping the points within 0.05
/// of the branch singularities 1 and 3.
std::vector<double> default_omega_samples(std::size_t count = 22);

/// Throws ConfigError with line/column for syntax errors and the JSON path for
/// unknown keys or bad values. The result is validated.
RunConfig parse_config(const std::string& json);
RunConfig load_config(const std::filesystem::path& path);
/// Compact JSON with every field, in a fixed key order.
std::string config_to_json(const RunConfig& cfg);

}  // namespace wdvv
