#include "wdvv/report.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <json.hpp>
#include <limits>

#include "wdvv/errors.hpp"

namespace wdvv {

namespace {

std::string number(double v) { return std::isfinite(v) ? fmt::format("{:.17g}", v) : "null"; }

std::string quoted(const std::string& s) { return nlohmann::json(s).dump(); }

}  // namespace

CheckRecord make_check(std::string name, std::string anchor, double residual, double tolerance, std::string notes) {
  CheckRecord c{std::move(name), std::move(anchor), residual, tolerance, false, std::move(notes)};
  c.pass = std::isfinite(residual) && residual < tolerance;
  return c;
}

CheckRecord failed_check(std::string name, std::string anchor, double tolerance, const std::string& error) {
  return {std::move(name), std::move(anchor), std::numeric_limits<double>::infinity(), tolerance, false,
          "error: " + error};
}

bool Report::pass() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.pass; });
}

std::string emit_json(const Report& r, bool include_timestamp) {
  std::string out = "{\n";
  out += fmt::format("  \"version\": {},\n", quoted(r.version));
  if (include_timestamp) out += fmt::format("  \"generated_at\": {},\n", quoted(r.generated_at));
  out += fmt::format("  \"seed\": {},\n", r.seed);
  out += fmt::format("  \"config\": {},\n", r.config_json.empty() ? "{}" : r.config_json);
  out += "  \"checks\": [";
  for (std::size_t i = 0; i < r.checks.size(); ++i) {
    const auto& c = r.checks[i];
    out += i ? ",\n    {" : "\n    {";
    out += fmt::format("\"name\": {}, \"anchor\": {}, \"max_residual\": {}, \"tolerance\": {}, \"pass\": {}, "
                       "\"notes\": {}}}",
                       quoted(c.name), quoted(c.anchor), number(c.max_residual), number(c.tolerance),
                       c.pass ? "true" : "false", quoted(c.notes));
  }
  out += r.checks.empty() ? "],\n" : "\n  ],\n";
  out += fmt::format("  \"pass\": {}\n}}\n", r.pass() ? "true" : "false");
  return out;
}

std::string emit_text(const Report& r) {
  std::size_t width = 5;
  for (const auto& c : r.checks) width = std::max(width, c.name.size());
  std::string out = fmt::format("wdvv toolkit {}  seed {}\n", r.version, r.seed);
  out += fmt::format("{:<{}}  {:>24}  {:>10}  {}\n", "check", width, "max residual", "tolerance", "result");
  for (const auto& c : r.checks) {
    out += fmt::format("{:<{}}  {:>24}  {:>10.3g}  {}\n", c.name, width,
                       std::isfinite(c.max_residual) ? fmt::format("{:.6e}", c.max_residual) : "-", c.tolerance,
                       c.pass ? "pass" : "FAIL");
    if (!c.notes.empty()) out += fmt::format("{:<{}}    note: {}\n", "", width, c.notes);
  }
  out += fmt::format("overall: {}\n", r.pass() ? "PASS" : "FAIL");
  return out;
}

Report parse_report(const std::string& text) {
  try {
    const auto j = nlohmann::ordered_json::parse(text);
    Report r;
    r.version = j.at("version").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.config_json = j.at("config").dump();
    if (j.contains("generated_at")) r.generated_at = j.at("generated_at").get<std::string>();
    for (const auto& c : j.at("checks")) {
      CheckRecord rec;
      rec.name = c.at("name").get<std::string>();
      rec.anchor = c.at("anchor").get<std::string>();
      rec.max_residual =
          c.at("max_residual").is_null() ? std::numeric_limits<double>::infinity() : c.at("max_residual").get<double>();
      rec.tolerance = c.at("tolerance").get<double>();
      rec.pass = c.at("pass").get<bool>();
      rec.notes = c.at("notes").get<std::string>();
      r.checks.push_back(std::move(rec));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed report: ") + e.what());
  }
}

}  // namespace wdvv
