#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

#include "slipconvect/config.hpp"
#include "slipconvect/elliptic.hpp"
#include "slipconvect/field.hpp"

namespace slipconvect {

/// Explicit terms and step size from the previous step, needed by the
/// variable-step Adams-Bashforth combination.
struct MultistepHistory {
  bool valid = false;
  double dt = 0.0;
  ScalarField omega_nl;
  ScalarField temp_nl;
  std::vector<double> mean_nl;
};

/// Evolving vorticity/temperature pair plus the mean tangential flow.
///
/// The k = 0 vorticity is slaved to mean_flow (omega_bar = -d2 u1_bar); the
/// mean flow itself is advanced with Navier-slip Robin walls. vel is always
/// consistent with omega and mean_flow.
struct SimState {
  ScalarField omega;
  ScalarField temperature;
  std::vector<double> mean_flow;
  VelocityPair vel;
  double time = 0.0;
  long step = 0;
  MultistepHistory prev;
  /// max{1, ||T0||_inf}: the maximum-principle ceiling.
  double temp_bound = 1.0;
  /// ||u0||_{L2} (unnormalized), for the kinetic-energy bound.
  double u0_l2 = 0.0;
  /// ||omega0||_p for p = 2, 4 (normalized), for the vorticity-bound monitor.
  double omega0_l2 = 0.0;
  double omega0_l4 = 0.0;
  /// Set when the perturbed initializer produced ||T0||_inf > 1.
  bool exceeds_unit_bound = false;
};

enum class InitKind { conduction, perturbed, snapshot };

struct InitRequest {
  InitKind kind = InitKind::conduction;
  double amplitude = 0.0;
  std::uint64_t seed = 1;
  std::filesystem::path snapshot;
};

InitRequest init_request(const RunConfig& cfg);

/// conduction: T = 1 - x2, omega = 0. perturbed: conduction plus a random
/// low-mode theta (vanishing on the walls) of sup-norm at most `amplitude`.
/// snapshot: restores a full state including multistep history.
SimState init_state(const PhysicalParams& params, const Grid& grid, const InitRequest& req);

Snapshot to_snapshot(const SimState& s);
SimState from_snapshot(const Snapshot& snap, const PhysicalParams& params, const Grid& grid);

struct StepperOptions {
  bool advection = true;
  bool buoyancy = true;
  /// Test hook: -1 flips the sign of the Navier-slip wall vorticity.
  double wall_vorticity_sign = 1.0;
  /// Hard advective limit checked on entry to a step.
  double cfl_limit = 1.0;
  int max_wall_iterations = 50;
  double wall_tolerance = 1e-10;
  /// Abort when ||u||_2 exceeds the kinetic-energy bound by this factor.
  double energy_margin = 0.1;
  /// Finite Pr: impose the Navier-slip wall vorticity at the new time level
  /// (influence matrix) instead of lagging it by one step.
  bool implicit_wall = true;
};

class Integrator {
 public:
  Integrator(const PhysicalParams& params, const Grid& grid, StepperOptions opts = {});

  const PhysicalParams& params() const { return params_; }
  const Grid& grid() const { return grid_; }
  const StepperOptions& options() const { return opts_; }
  Transform& transform() { return *tr_; }

  /// cfl * min(h1/max|u1|, h2/max|u2|); +inf for a fluid at rest.
  double advective_dt(const SimState& s, double cfl) const;

  /// Dispatches to the finite- or infinite-Prandtl step.
  void step(SimState& s, double dt);

  /// One IMEX step: AB2 (Euler on the first step) for advection and buoyancy,
  /// Crank-Nicolson for diffusion; Navier-slip wall vorticity at the new
  /// time level (or lagged, with implicit_wall = false).
  void step_finite_pr(SimState& s, double dt);

  /// T by IMEX, then -lap omega = Ra d1 T per mode with the wall coupling
  /// iterated to convergence.
  void step_infinite_pr(SimState& s, double dt);

  /// Solves the quasi-static vorticity for the current temperature (Pr = inf)
  /// and refreshes the velocity. Returns the number of wall iterations used.
  int solve_quasi_static(SimState& s);

  /// max over modes of the relative residual of -lap omega = Ra d1 T.
  double quasi_static_residual(const SimState& s) const;

  /// Largest |omega_wall -/+ u1/Ls| over modes and walls.
  double wall_vorticity_residual(const SimState& s) const;

  /// Rebuilds vel from omega and mean_flow.
  void refresh_velocity(SimState& s) const;

  /// max(max|u1|/h1, max|u2|/h2).
  double max_velocity_rate(const SimState& s) const;

 private:
  struct Explicit;
  Explicit explicit_terms(const SimState& s);
  void check_state(SimState& s);
  void advance_temperature(SimState& s, const ScalarField& nl_star, double dt) const;
  void update_history(SimState& s, Explicit&& ex, double dt) const;

  // Pr = inf: per-mode response of the wall u1 to unit wall vorticity.
  struct WallInfluence {
    double g[2][2] = {{0, 0}, {0, 0}};
  };
  std::vector<WallInfluence> influence_;

  // Finite Pr: unit-wall-data Helmholtz responses for the current sigma.
  struct SlipResponse {
    std::vector<Complex> phi[2];
    WallInfluence w;
  };
  double slip_sigma_ = -1.0;
  std::vector<SlipResponse> slip_;
  void build_slip_responses(double sigma);

  PhysicalParams params_;
  Grid grid_;
  StepperOptions opts_;
  std::unique_ptr<Transform> tr_;
};

}  // namespace slipconvect
