#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "slipconvect/boundcert.hpp"
#include "slipconvect/config.hpp"
#include "slipconvect/run.hpp"

namespace slipconvect {

enum ExitCode : int { exit_ok = 0, exit_solver = 1, exit_config = 2, exit_checks = 3 };

/// Ls = value (possibly inf), or Ls = c_s Ra^alpha.
struct LsPolicy {
  enum class Kind { fixed, power };
  Kind kind = Kind::fixed;
  ExtendedReal value = ExtendedReal::infinite();
  double c_s = 1.0;
  double alpha = 0.0;

  ExtendedReal ls_for(double ra) const;
  std::string describe() const;
};

struct SweepPlan {
  std::vector<double> ra_values;
  LsPolicy ls_policy;
  RunConfig base;
  int workers = 1;
  std::filesystem::path out_dir = "sweep";
  double b = 0.5;
  double u0_w1r = 0.0;
  // Optional per-row overrides (empty, or one entry per Ra value).
  std::vector<int> n1, n2;
  std::vector<double> t_end, t_transient, dt_max;
};

/// `key = value` lines: ra_values, ls_policy (fixed:<v|inf> | power:<c_s>:<alpha>),
/// template (config path, relative to base_dir), workers, out_dir, b, u0_w1r,
/// and per-row lists n1, n2, t_end, t_transient, dt_max.
SweepPlan parse_sweep_plan(const std::string& text, const std::filesystem::path& base_dir = ".");
SweepPlan load_sweep_plan(const std::filesystem::path& path);

struct FitResult {
  double beta = 0.0;
  double prefactor = 0.0;
  double r_squared = 0.0;
  int n_points = 0;
};

/// Least squares of log nu against log ra. Throws std::invalid_argument for
/// fewer than two points or non-positive data.
FitResult fit_power_law(std::span<const double> ra, std::span<const double> nu);

struct CertifyOptions {
  double b = 0.5;
  std::optional<double> c0;
  std::optional<double> c2;
  double u0_w1r = 0.0;
};

struct CertificationOutcome {
  Calibration calibration;
  CertificateReport report;
  DcBoundReport dc;
  RegimeReport regime;
  bool delta_clamped = false;
  double delta_formula = 0.0;
  std::string data_hash;
};

/// Calibrates the constants on the samples plus their average, chooses the
/// parameters, and certifies the average. Pr = inf goes through lemma part (b).
CertificationOutcome certify_samples(const RunConfig& cfg, std::span<const DiagnosticsRecord> samples,
                                     const DiagnosticsRecord& averages, const CertifyOptions& opts = {});

nlohmann::json to_json(const CertificationOutcome& c);

/// Rebuilds the dt-weighted averages from emitted records.
RunningAverages averages_from_samples(std::span<const DiagnosticsRecord> samples, double t_transient);

struct SweepRow {
  double ra = 0.0;
  ExtendedReal ls = ExtendedReal::infinite();
  bool ok = false;
  std::string error;
  double nu = 0.0;
  double nu_bound_implied = 0.0;
  double nu_bound_asymptotic = 0.0;
  bool steady = false;
  double beta_running = 0.0;  // NaN until two rows qualify
  bool regime_ok = false;
  std::optional<double> exponent;  // p(alpha) for the power policy
  bool below_implied = false;
  bool certified = false;
  double seconds = 0.0;
  nlohmann::json certificate;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::optional<FitResult> fit;
  bool fit_fallback = false;  // fewer than two rows with Nu >= 1.05
};

SweepResult run_sweep(const SweepPlan& plan, std::ostream* log = nullptr);
std::string sweep_csv(const SweepResult& r);
nlohmann::json to_json(const SweepResult& r);

/// Runs a config and prints the final Nusselt triple and residuals.
int run_single(const std::filesystem::path& config, std::ostream& out, std::ostream& err);

/// Certifies a finished run directory (config.txt + samples.json).
nlohmann::json certify_run_dir(const std::filesystem::path& dir, const CertifyOptions& opts);

struct CheckOptions {
  /// Mutation hook: flips the wall-vorticity sign in the balance suite.
  bool inject_wall_sign_error = false;
};

/// Manufactured-solution, identity, balance-refinement and determinism suites.
/// Returns {"pass": bool, "suites": [...]}.
nlohmann::json run_checks(const std::optional<RunConfig>& cfg, const CheckOptions& opts = {});

}  // namespace slipconvect
