#pragma once

// Check records and the run report, with JSON and text emitters.

#include <cstdint>
#include <string>
#include <vector>

namespace wdvv {

struct CheckRecord {
  std::string name;
  /// Topic of the identity being checked; never empty.
  std::string anchor;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string notes;

  bool operator==(const CheckRecord&) const = default;
};

/// pass = residual finite and below tolerance.
CheckRecord make_check(std::string name, std::string anchor, double residual, double tolerance,
                       std::string notes = {});
/// Failed record for a check that threw.
CheckRecord failed_check(std::string name, std::string anchor, double tolerance, const std::string& error);

struct Report {
  std::string version;
  std::uint64_t seed = 0;
  /// Compact JSON of the effective configuration.
  std::string config_json;
  std::vector<CheckRecord> checks;
  /// UTC time of the run; excluded from comparisons.
  std::string generated_at;

  bool pass() const;
  bool operator==(const Report& o) const {
    return version == o.version && seed == o.seed && config_json == o.config_json && checks == o.checks;
  }
};

/// Stable key order; numbers with 17 significant digits; non-finite
/// residuals as null.
std::string emit_json(const Report& r, bool include_timestamp = true);
/// Aligned table followed by the overall verdict.
std::string emit_text(const Report& r);
Report parse_report(const std::string& json);

}  // namespace wdvv
