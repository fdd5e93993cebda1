#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <json.hpp>

#include "slipconvect/config.hpp"
#include "slipconvect/diagnostics.hpp"
#include "slipconvect/dynamics.hpp"

namespace slipconvect {

struct RunOptions {
  StepperOptions stepper;
  /// Write timeseries.csv, summary.json, samples.json and snapshots to out_dir.
  bool write_outputs = true;
  /// Appendix identities are checked on every n-th diagnostic emission.
  long appendix_every = 100;
  /// Largest allowed growth of dt between consecutive steps.
  double dt_growth = 1.25;
  /// Start from this state instead of the configured initializer.
  std::optional<SimState> initial;
  /// Stop after this many steps (negative: run to t_end).
  long max_steps = -1;
  /// Called after every accepted step.
  std::function<void(const SimState&)> on_step;
};

struct RunResult {
  SimState final_state;
  std::vector<DiagnosticsRecord> records;
  /// Records emitted at t >= t_transient (inputs to calibration).
  std::vector<DiagnosticsRecord> samples;
  RunningAverages averages;
  std::optional<AveragedBalanceReport> balances;
  Monitors monitors;
  bool steady = false;
  double steady_change = 0.0;  // relative change of windowed Nu between half-windows
  long steps = 0;
  double wall_seconds = 0.0;
  double max_energy_residual = 0.0;
  double max_enstrophy_residual = 0.0;
  double quasi_static_residual = 0.0;  // Pr = inf only
};

/// Integrates from the configured initial state to t_end with CFL-adapted
/// steps. SolverError propagates after an "abort.bin" state dump (when
/// outputs are on).
RunResult run(const RunConfig& cfg, const RunOptions& opts = {});

/// Relative change of mean nu_flux between the two halves of the averaging window.
double windowed_change(std::span<const DiagnosticsRecord> samples, double t_start, double t_end);

nlohmann::json summary_json(const RunConfig& cfg, const RunResult& r);

}  // namespace slipconvect
