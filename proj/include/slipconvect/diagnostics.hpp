#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "slipconvect/dynamics.hpp"
#include "slipconvect/elliptic.hpp"
#include "slipconvect/field.hpp"

namespace slipconvect {

/// Instantaneous functionals of one state. All averages <.> are normalized by
/// the domain area gamma; wall terms are x1-means of the wall traces.
struct DiagnosticsRecord {
  double time = 0.0;
  double nu_flux = 0.0;             // <u2 T - d2 T>
  double nu_grad = 0.0;             // <|grad T|^2>
  double nu_wall = 0.0;             // -mean d2 T at x2 = 0
  double kinetic_energy = 0.0;      // 1/2 <|u|^2>
  double enstrophy = 0.0;           // 1/2 <omega^2>
  double grad_omega_sq = 0.0;       // <|grad omega|^2>
  double wall_u1_sq_bottom = 0.0;
  double wall_u1_sq_top = 0.0;
  double wall_p_du1_bottom = 0.0;   // mean p d1 u1 at x2 = 0
  double wall_p_du1_top = 0.0;
  double buoyancy_flux = 0.0;       // Ra <u2 T>
  double omega_dT1 = 0.0;           // <omega d1 T>
  double lp_omega_2 = 0.0;
  double lp_omega_4 = 0.0;
  double max_T = 0.0;
  double energy_residual = 0.0;
  double enstrophy_residual = 0.0;

  // Further quadratic functionals used by the identities and the certifier.
  double grad_u_sq = 0.0;           // <|grad u|^2>
  double lap_u_sq = 0.0;            // <|lap u|^2>
  double omega_sq = 0.0;            // <omega^2>
  double d1_omega_sq = 0.0;         // <(d1 omega)^2>
  double d11_omega_sq = 0.0;        // <(d1^2 omega)^2>
  double lap_omega_sq = 0.0;        // <(lap omega)^2>
  double dT1_sq = 0.0;
  double dT2_sq = 0.0;
  double temp_sq = 0.0;             // <T^2>
  double pressure_h1_sq = 0.0;      // <p^2> + <|grad p|^2>
  double pressure_projection = 0.0;

  // x2 profiles of x1-means.
  std::vector<double> u2T_profile;
  std::vector<double> dT2_profile;
  std::vector<double> dT2_sq_profile;
};

struct NusseltTriple {
  double flux = 0.0;
  double grad = 0.0;
  double wall = 0.0;
};

NusseltTriple nusselt_all(const SimState& s);

/// Every functional except the balance residuals (which need neighbours in time).
DiagnosticsRecord evaluate(Transform& tr, const SimState& s, const PhysicalParams& params,
                           const ScalarField& pressure, double projection = 0.0);
/// Same, solving for the pressure first.
DiagnosticsRecord evaluate(Transform& tr, const SimState& s, const PhysicalParams& params);

/// The time-differentiated quantities of the two balances at one instant.
struct BalanceSample {
  double time = 0.0;
  double kinetic_energy = 0.0;
  double enstrophy = 0.0;
  double wall_u1_sq = 0.0;  // bottom + top
};

BalanceSample balance_sample(const SimState& s);

/// |LHS - RHS| / max(|RHS|, 1) of
///   (1/Pr) dE/dt + <|grad u|^2> + (1/Ls)(u1^2 walls) = Ra <u2 T>
/// with a difference quotient between prev and next.
double energy_balance_residual(const DiagnosticsRecord& now, const BalanceSample& prev,
                               const BalanceSample& next, const PhysicalParams& params);

/// Same normalization for
///   (1/Pr) dZ/dt + (1/(2 Ls Pr)) d/dt(u1^2 walls) + <|grad omega|^2>
///     = (1/Ls)(p d1 u1 walls) + Ra <omega d1 T>.
double enstrophy_balance_residual(const DiagnosticsRecord& now, const BalanceSample& prev,
                                  const BalanceSample& next, const PhysicalParams& params);

/// dt-weighted running means of every record entry (profiles included).
class RunningAverages {
 public:
  void add(const DiagnosticsRecord& r, double weight);
  double window() const { return window_; }
  std::size_t samples() const { return samples_; }
  const DiagnosticsRecord& mean() const { return mean_; }

 private:
  DiagnosticsRecord mean_;
  double window_ = 0.0;
  std::size_t samples_ = 0;
};

struct AveragedBalanceReport {
  double window = 0.0;
  double nu = 0.0;                  // averaged nu_flux
  double energy_residual = 0.0;
  double enstrophy_residual = 0.0;
  double nu_spread = 0.0;           // max |nu_i - nu_j| / nu
};

/// Throws std::invalid_argument for an empty window.
AveragedBalanceReport averaged_balances(const RunningAverages& avg, const PhysicalParams& params);

struct AppendixReport {
  double grad_u = 0.0, omega = 0.0;          // ||grad u||, ||omega||
  double lap_u = 0.0, grad_omega = 0.0;      // ||lap u||, ||grad omega||
  double ratio_grad = 1.0;                   // ||grad u|| / ||omega||
  double ratio_lap = 1.0;                    // ||lap u|| / ||grad omega||
  double d1_omega_sq = 0.0;                  // ||d1 omega||^2
  double interp_rhs = 0.0;                   // ||omega|| ||d1^2 omega||
  bool interpolation_holds = true;
  double d1_over_lap = 0.0;                  // ||d1 omega|| / ||lap omega||
  double d11_over_lap_sq = 0.0;              // ||d1^2 omega||^2 / ||lap omega||^2
  /// Equalities within 1 +- tol (tol = 5 h2) and the interpolation inequality.
  bool passes(double tol) const;
};

AppendixReport appendix_identity_checks(const SimState& s);
AppendixReport appendix_identity_checks(const DiagnosticsRecord& r);

/// ||p||_H1 / ((1/Ls)||d1 omega|| + Ra ||T|| + (1/Pr)||omega||_2 ||omega||_4).
double pressure_bound_ratio(const DiagnosticsRecord& r, const PhysicalParams& params);

/// Running monitors of the uniform bounds along one run.
struct Monitors {
  double max_omega_l2 = 0.0;
  double max_omega_l4 = 0.0;
  double max_u_l2 = 0.0;               // unnormalized ||u||_2
  double max_T = 0.0;
  double omega_scale_2 = 0.0;          // ||omega0||_2 + ||u0||/Ls + Ra
  double omega_scale_4 = 0.0;
  double kinetic_bound = 0.0;          // ||u0|| + 3 gamma max(1, Ls) Ra; inf for Ls = inf
  long kinetic_violations = 0;
  double pressure_ratio = 0.0;         // fitted C of the pressure bound
  double d11_over_lap_sq = 0.0;        // max ||d1^2 omega||^2 / ||lap omega||^2
  double d1_over_lap = 0.0;
  long appendix_checks = 0;
  double appendix_max_deviation = 0.0;  // max |ratio - 1|
  long appendix_failures = 0;
  long interpolation_violations = 0;

  void init(const SimState& s0, const PhysicalParams& params);
  void update(const DiagnosticsRecord& r, const PhysicalParams& params);
  void check_appendix(const DiagnosticsRecord& r, double h2);
  double fitted_c2() const { return omega_scale_2 > 0 ? max_omega_l2 / omega_scale_2 : 0.0; }
  double fitted_c4() const { return omega_scale_4 > 0 ? max_omega_l4 / omega_scale_4 : 0.0; }
};

std::string csv_header();
std::string csv_row(const DiagnosticsRecord& r);

nlohmann::json to_json(const DiagnosticsRecord& r);
DiagnosticsRecord record_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AveragedBalanceReport& r);
nlohmann::json to_json(const Monitors& m);

}  // namespace slipconvect
