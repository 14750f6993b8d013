#include "wdvv/config.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "wdvv/errors.hpp"

namespace wdvv {

namespace {

using Json = nlohmann::ordered_json;

// Walks one JSON object, remembering which keys were consumed so that the
// leftovers can be reported as unknown.
class Fields {
 public:
  Fields(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(fmt::format("{}: expected an object", where()));
  }

  template <class T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).template get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError(fmt::format("{}/{}: wrong type ({})", where(), key, j_.at(key).type_name()));
    }
  }

  std::optional<Fields> child(const char* key) {
    seen_.insert(key);
    if (!j_.contains(key)) return std::nullopt;
    return Fields(j_.at(key), path_ + "/" + key);
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) throw ConfigError(fmt::format("{}/{}: unknown key", where(), k));
    }
  }

 private:
  std::string where() const { return path_.empty() ? "config" : "config" + path_; }

  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(fmt::format("config/{}: {}", field, what));
}

void require_box(const std::array<double, 2>& b, const std::string& field) {
  require(std::isfinite(b[0]) && std::isfinite(b[1]) && b[0] < b[1], field, "box needs lo < hi");
}

std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

std::vector<double> default_omega_samples(std::size_t count) {
  std::vector<double> out;
  for (std::size_t k = 0; k < count; ++k) {
    const double t = 0.2 + 4.8 * (static_cast<double>(k) + 0.5) / static_cast<double>(count);
    if (std::abs(t - 1.0) < 0.05 || std::abs(t - 3.0) < 0.05) continue;
    out.push_back(t);
  }
  return out;
}

RunConfig::RunConfig() : omega_imag(default_omega_samples()) {}

std::vector<std::string> RunConfig::expanded_suites() const {
  const bool all = std::find(suites.begin(), suites.end(), "all") != suites.end();
  std::vector<std::string> out;
  for (const auto& name : suite_names()) {
    if (all || std::find(suites.begin(), suites.end(), name) != suites.end()) out.push_back(name);
  }
  return out;
}

void RunConfig::validate() const {
  require(!suites.empty(), "suites", "at least one suite is required");
  for (const auto& s : suites) {
    require(s == "all" || std::find(suite_names().begin(), suite_names().end(), s) != suite_names().end(), "suites",
            fmt::format("unknown suite '{}'", s));
  }
  require(std::isfinite(perturbation) && perturbation >= 0.0, "perturbation", "must be finite and non-negative");
  require(prepotential_samples > 0, "prepotential/samples", "must be positive");
  require_box(prepotential_box, "prepotential/box");
  require(lg_point.size() == 3, "lg/point", "needs three coordinates");
  require(chart_samples > 0, "lg/chart_samples", "must be positive");
  require_box(chart_box, "lg/chart_box");
  require(std::isfinite(x3) && x3 != 0.0, "lg/x3", "must be finite and non-zero");
  require(!n2_R.empty(), "n2/R", "needs at least one value");
  for (double r : n2_R) require(std::isfinite(r), "n2/R", "values must be finite");
  require(n2_samples > 0, "n2/samples", "must be positive");
  require_box(n2_box, "n2/box");
  require(n2_u[0] != n2_u[1], "n2/u", "canonical coordinates must differ");
  require(top_interval[0] < top_interval[1], "euler_top/interval", "needs start < end");
  require(omega_imag.size() >= 2, "painleve/omega_imag", "needs at least two samples");
  for (double w : omega_imag) require(std::isfinite(w) && w != 0.0, "painleve/omega_imag", "values must be non-zero");
  require(!alphas.empty(), "schlesinger/alpha", "needs at least one value");
  require(schlesinger_u[0] != schlesinger_u[1], "schlesinger/u", "canonical coordinates must differ");
  require(schlesinger_point.size() == 3, "schlesinger/point", "needs three coordinates");
  const std::pair<const char*, double> tols[] = {
      {"identity", tol.identity},   {"n2", tol.n2},           {"finite_difference", tol.finite_difference},
      {"metric", tol.metric},       {"casimir", tol.casimir}, {"branch", tol.branch},
      {"sum_rule", tol.sum_rule},   {"painleve", tol.painleve}, {"tau_spread", tol.tau_spread},
      {"schlesinger", tol.schlesinger}, {"transport", tol.transport}};
  for (const auto& [name, value] : tols) {
    require(std::isfinite(value) && value > 0.0, std::string("tolerances/") + name, "must be positive");
  }
}

RunConfig parse_config(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte);
    throw ConfigError(fmt::format("config: syntax error at line {}, column {}: {}", line, col, e.what()));
  }
  RunConfig c;
  Fields top(j, "");
  top.read("suites", c.suites);
  top.read("seed", c.seed);
  top.read("parallel", c.parallel);
  top.read("perturbation", c.perturbation);
  if (auto f = top.child("prepotential")) {
    f->read("samples", c.prepotential_samples);
    f->read("box", c.prepotential_box);
    f->finish();
  }
  if (auto f = top.child("lg")) {
    f->read("point", c.lg_point);
    f->read("chart_samples", c.chart_samples);
    f->read("chart_box", c.chart_box);
    f->read("x3", c.x3);
    f->finish();
  }
  if (auto f = top.child("n2")) {
    f->read("R", c.n2_R);
    f->read("samples", c.n2_samples);
    f->read("box", c.n2_box);
    f->read("u", c.n2_u);
    f->finish();
  }
  if (auto f = top.child("euler_top")) {
    f->read("interval", c.top_interval);
    f->read("omega_guess", c.top_omega_guess);
    f->finish();
  }
  if (auto f = top.child("painleve")) {
    f->read("omega_imag", c.omega_imag);
    f->finish();
  }
  if (auto f = top.child("schlesinger")) {
    f->read("R", c.schlesinger_R);
    f->read("alpha", c.alphas);
    f->read("u", c.schlesinger_u);
    f->read("point", c.schlesinger_point);
    f->finish();
  }
  if (auto f = top.child("tolerances")) {
    auto& t = c.tol;
    f->read("identity", t.identity);
    f->read("n2", t.n2);
    f->read("finite_difference", t.finite_difference);
    f->read("metric", t.metric);
    f->read("casimir", t.casimir);
    f->read("branch", t.branch);
    f->read("sum_rule", t.sum_rule);
    f->read("painleve", t.painleve);
    f->read("tau_spread", t.tau_spread);
    f->read("schlesinger", t.schlesinger);
    f->read("transport", t.transport);
    f->finish();
  }
  if (auto f = top.child("output")) {
    std::string report, trajectory;
    f->read("report", report);
    f->read("trajectory", trajectory);
    if (!report.empty()) c.report_path = report;
    if (!trajectory.empty()) c.trajectory_path = trajectory;
    f->finish();
  }
  top.finish();
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config file '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::string config_to_json(const RunConfig& c) {
  Json j;
  j["suites"] = c.suites;
  j["seed"] = c.seed;
  j["parallel"] = c.parallel;
  j["perturbation"] = c.perturbation;
  j["prepotential"] = {{"samples", c.prepotential_samples}, {"box", c.prepotential_box}};
  j["lg"] = {{"point", c.lg_point}, {"chart_samples", c.chart_samples}, {"chart_box", c.chart_box}, {"x3", c.x3}};
  j["n2"] = {{"R", c.n2_R}, {"samples", c.n2_samples}, {"box", c.n2_box}, {"u", c.n2_u}};
  j["euler_top"] = {{"interval", c.top_interval}, {"omega_guess", c.top_omega_guess}};
  j["painleve"] = {{"omega_imag", c.omega_imag}};
  j["schlesinger"] = {
      {"R", c.schlesinger_R}, {"alpha", c.alphas}, {"u", c.schlesinger_u}, {"point", c.schlesinger_point}};
  const auto& t = c.tol;
  j["tolerances"] = {{"identity", t.identity},
                     {"n2", t.n2},
                     {"finite_difference", t.finite_difference},
                     {"metric", t.metric},
                     {"casimir", t.casimir},
                     {"branch", t.branch},
                     {"sum_rule", t.sum_rule},
                     {"painleve", t.painleve},
                     {"tau_spread", t.tau_spread},
                     {"schlesinger", t.schlesinger},
                     {"transport", t.transport}};
  Json out = Json::object();
  if (c.report_path) out["report"] = *c.report_path;
  if (c.trajectory_path) out["trajectory"] = *c.trajectory_path;
  j["output"] = out;
  return j.dump();
}

}  // namespace wdvv
