// wdvvcheck: run the verification suites and dump Euler-top trajectories.
//
// Exit codes: 0 all checks pass, 1 some check failed, 2 configuration or
// runtime error.

#include <CLI11.hpp>
#include <cstdlib>
#include <fmt/format.h>
#include <fstream>
#include <iostream>

#include "wdvv/config.hpp"
#include "wdvv/errors.hpp"
#include "wdvv/n3_top.hpp"
#include "wdvv/suites.hpp"
#include "wdvv/version.hpp"

namespace {

constexpr int kPass = 0;
constexpr int kCheckFailed = 1;
constexpr int kError = 2;

wdvv::RunConfig resolve_config(const std::string& path) {
  if (!path.empty()) return wdvv::load_config(path);
  if (const char* env = std::getenv(wdvv::kConfigEnv); env && *env) return wdvv::load_config(env);
  return {};
}

void write_output(const std::string& text, const std::optional<std::string>& path) {
  if (!path) {
    std::cout << text;
    return;
  }
  std::ofstream out(*path);
  if (!out) throw wdvv::Error("cannot open output file '" + *path + "'");
  out << text;
  if (!out) throw wdvv::Error("write to '" + *path + "' failed");
}

int run_check(const std::string& config_path, const std::string& out_path, const std::string& format,
              const std::vector<std::string>& suites) {
  wdvv::RunConfig cfg = resolve_config(config_path);
  if (!suites.empty()) cfg.suites = suites;
  if (!out_path.empty()) cfg.report_path = out_path;
  cfg.validate();
  const wdvv::Report report = wdvv::run(cfg);
  write_output(format == "text" ? wdvv::emit_text(report) : wdvv::emit_json(report), cfg.report_path);
  if (cfg.report_path) std::cerr << (report.pass() ? "overall: PASS\n" : "overall: FAIL\n");
  return report.pass() ? kPass : kCheckFailed;
}

int run_dump(double omega_imag, double omega_real, double scale, const std::string& out_path) {
  const wdvv::Scalar omega(omega_real, omega_imag);
  const auto signs = wdvv::euler_top_signs(omega);
  if (!signs.found) throw wdvv::ConvergenceError("no sign choice of the omega_k solves the Euler top here");
  const wdvv::Scalar s0 = wdvv::hitchin_branch(omega).s;
  const auto top = wdvv::integrate_top(s0, wdvv::hitchin_top_state(omega, signs), scale * s0);
  std::ofstream out(out_path);
  if (!out) throw wdvv::Error("cannot open output file '" + out_path + "'");
  wdvv::write_trajectory_csv(top, out);
  if (!out) throw wdvv::Error("write to '" + out_path + "' failed");
  std::cerr << fmt::format("{} nodes from s = {:.6g}{:+.6g}i, Casimir drift {:.3e}, branch match {:.3e}\n",
                           top.path.size(), s0.real(), s0.imag(), top.casimir_drift,
                           wdvv::branch_tracking_residual(top, omega));
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification of WDVV solutions, Darboux-Egoroff data and isomonodromic systems", "wdvvcheck"};
  app.require_subcommand(1);

  std::string config_path, out_path, format = "json";
  std::vector<std::string> suites;
  auto* check = app.add_subcommand("check", "Run verification suites and emit a report");
  check->add_option("--config", config_path, fmt::format("JSON configuration (default: ${} or built-in)", wdvv::kConfigEnv));
  check->add_option("--out", out_path, "Report file (default: stdout)");
  check->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "text"}));
  check->add_option("--suite", suites, "Suite to run; repeatable; overrides the configuration")
      ->check(CLI::IsMember({"prepotential", "lg", "n2", "euler-top", "painleve", "schlesinger", "all"}));

  double omega_imag = 0.0, omega_real = 0.0, scale = 2.5;
  std::string csv_path;
  auto* dump = app.add_subcommand("dump-trajectory", "Integrate the Euler top from a branch point and write CSV");
  dump->add_option("--omega", omega_imag, "Imaginary part of omega")->required();
  dump->add_option("--omega-real", omega_real, "Real part of omega");
  dump->add_option("--scale", scale, "Integrate along the ray from s0 to scale * s0");
  dump->add_option("--out", csv_path, "CSV file")->required();

  auto* version = app.add_subcommand("version", "Print the toolkit version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kError;
  }

  try {
    if (*version) {
      std::cout << wdvv::kVersion << '\n';
      return kPass;
    }
    if (*check) return run_check(config_path, out_path, format, suites);
    if (*dump) return run_dump(omega_imag, omega_real, scale, csv_path);
  } catch (const std::exception& e) {
    std::cerr << "wdvvcheck: " << e.what() << '\n';
    return kError;
  }
  return kError;
}
