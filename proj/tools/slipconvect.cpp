// slipconvect: run, sweep, certify and check 2D Rayleigh-Benard runs with Navier-slip walls.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "slipconvect/errors.hpp"
#include "slipconvect/harness.hpp"

using namespace slipconvect;

namespace {

int do_sweep(const std::string& plan_path) {
  SweepPlan plan;
  try {
    plan = load_sweep_plan(plan_path);
  } catch (const std::exception& e) {
    std::cerr << "plan error: " << e.what() << '\n';
    return exit_config;
  }
  const SweepResult res = run_sweep(plan, &std::cerr);
  std::filesystem::create_directories(plan.out_dir);
  const std::string csv = sweep_csv(res);
  std::ofstream(plan.out_dir / "sweep.csv") << csv;
  std::ofstream(plan.out_dir / "sweep.json") << to_json(res).dump(2) << '\n';
  std::cout << csv;
  if (res.fit)
    std::cout << "beta " << res.fit->beta << " prefactor " << res.fit->prefactor << " r2 " << res.fit->r_squared
              << (res.fit_fallback ? " (fallback: includes subcritical rows)" : "") << '\n';
  for (const auto& row : res.rows)
    if (!row.ok) return exit_solver;
  return exit_ok;
}

int do_certify(const std::string& dir, const CertifyOptions& opts) {
  try {
    std::cout << certify_run_dir(dir, opts).dump(2) << '\n';
    return exit_ok;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_config;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_config;
  }
}

int do_check(const std::string& config, bool inject) {
  std::optional<RunConfig> cfg;
  if (!config.empty()) {
    try {
      cfg = load_config(config);
    } catch (const std::exception& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return exit_config;
    }
  }
  CheckOptions opts;
  opts.inject_wall_sign_error = inject;
  const nlohmann::json report = run_checks(cfg, opts);
  std::cout << report.dump(2) << '\n';
  return report["pass"].get<bool>() ? exit_ok : exit_checks;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2D Rayleigh-Benard convection with Navier-slip walls"};
  app.require_subcommand(1);

  std::string run_config;
  auto* run_cmd = app.add_subcommand("run", "integrate a single configuration");
  run_cmd->add_option("config", run_config, "config file")->required();

  std::string plan_path;
  auto* sweep_cmd = app.add_subcommand("sweep", "run a Ra sweep and fit Nu ~ Ra^beta");
  sweep_cmd->add_option("plan", plan_path, "sweep plan")->required();

  std::string run_dir;
  CertifyOptions copts;
  double c0 = 0.0, c2 = 0.0;
  auto* cert_cmd = app.add_subcommand("certify", "certify the averages of a finished run");
  cert_cmd->add_option("run-dir", run_dir, "run output directory")->required();
  cert_cmd->add_option("--b", copts.b, "background weight b in (0,1)")->check(CLI::Range(0.0, 1.0));
  auto* c0_opt = cert_cmd->add_option("--c0", c0, "override calibrated c0");
  auto* c2_opt = cert_cmd->add_option("--c2", c2, "override calibrated c2");
  cert_cmd->add_option("--u0", copts.u0_w1r, "W^{1,r} norm of the initial velocity");

  std::string check_config;
  bool inject = false;
  auto* check_cmd = app.add_subcommand("check", "run the verification suites");
  check_cmd->add_option("config", check_config, "optional config file");
  check_cmd->add_flag("--inject-wall-sign-error", inject, "mutation hook for the balance suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? exit_ok : exit_config;
  }

  try {
    if (*run_cmd) return run_single(run_config, std::cout, std::cerr);
    if (*sweep_cmd) return do_sweep(plan_path);
    if (*cert_cmd) {
      if (*c0_opt) copts.c0 = c0;
      if (*c2_opt) copts.c2 = c2;
      return do_certify(run_dir, copts);
    }
    if (*check_cmd) return do_check(check_config, inject);
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return exit_solver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_solver;
  }
  return exit_ok;
}
