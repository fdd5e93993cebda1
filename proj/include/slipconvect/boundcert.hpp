#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "slipconvect/config.hpp"
#include "slipconvect/diagnostics.hpp"
#include "slipconvect/field.hpp"

namespace slipconvect {

/// p(alpha) = 5/12 for alpha >= 1/24, else 1/2 - 2 alpha.
/// Throws std::invalid_argument for alpha < 0 or NaN.
double exponent(double alpha);

/// Piecewise-linear tau: 1 - x/(2 delta) near the bottom, 1/2 in the bulk,
/// (1 - x)/(2 delta) near the top. delta is rounded to the grid.
struct BackgroundProfile {
  double delta = 0.0;
  double requested_delta = 0.0;
  int layer_points = 0;  // delta / h2
  std::vector<double> tau;
  std::vector<double> dtau;  // -1/(2 delta) on the closed layers, 0 in the bulk
};

/// Throws std::invalid_argument unless 0 < delta < 1/2 after rounding
/// (a delta below h2 is raised to h2).
BackgroundProfile make_profile(double delta, const Grid& g);

/// Integral of tau' * f over the two layers, each by its own trapezoid sum.
double layer_integral(const Grid& g, const BackgroundProfile& prof, std::span<const double> f);

/// theta = T - tau; throws ValidationError when a wall row of theta exceeds 1e-12.
ScalarField theta_of(const ScalarField& T, const BackgroundProfile& prof);

struct BoundParams {
  double a = 0.0;
  double b = 0.5;
  double m = 0.0;
  double delta = 0.0;
  double eps = 0.0;
  double c0 = 1.0;
  double c2 = 1.0;
  double u0_w1r = 0.0;
};

struct QBreakdown {
  double m_ra2 = 0.0;
  double grad1_theta = 0.0;
  double grad2_theta = 0.0;
  double cross = 0.0;            // 2 <tau' u2 theta>
  double b_enstrophy = 0.0;
  double b_wall = 0.0;
  double a_grad_omega = 0.0;
  double a_wall_pressure = 0.0;
  double a_cross = 0.0;          // -a Ra <omega d1 theta>
  double total = 0.0;
};

/// Q from time-averaged (or instantaneous) functionals.
QBreakdown q_functional(const DiagnosticsRecord& data, const BackgroundProfile& prof,
                        const BoundParams& bp, const PhysicalParams& params);

/// Q from instantaneous fields: T = theta + tau is reassembled and reduced to
/// the same functionals, so both entry points share one definition.
QBreakdown q_functional(Transform& tr, const ScalarField& theta, const VelocityPair& vel,
                        const ScalarField& omega, const ScalarField& p, const BackgroundProfile& prof,
                        const BoundParams& bp, const PhysicalParams& params);

/// <|d2 theta|^2> and 2<tau' u2 theta> from the x2 profiles.
double grad2_theta_sq(const DiagnosticsRecord& data, const BackgroundProfile& prof);
double cross_term(const DiagnosticsRecord& data, const BackgroundProfile& prof);

struct ParameterChoice {
  BoundParams bp;
  BackgroundProfile profile;
  double a0 = 0.0;
  double delta_formula = 0.0;  // before clamping/rounding
  bool delta_clamped = false;
  double nu_bound_asymptotic = 0.0;
};

/// a0 = b/(100 c2^2) min(1, Ra^2/u0^2), a = a0 Ra^{-3/2},
/// delta = (a0 b / (4 c0))^{1/6} Ra^{-5/12}, M = a c2^2/(2 Ls^2), eps = a.
/// With strict set, throws ValidationError outside Ls^2 Pr^2 >= Ra^{3/2}.
ParameterChoice choose_parameters(const PhysicalParams& params, double b, double c0, double c2,
                                  double u0_w1r, const Grid& grid, bool strict = true);

double asymptotic_bound(const PhysicalParams& params, double a0, double b, double c0, double c2);

struct Calibration {
  double c0_a = 0.0;
  double c0_b = 0.0;
  double c2 = 0.0;
  double c2_pressure = 0.0;   // pressure-bound monitor part
  double c2_wall = 0.0;       // wall-term part (finite Ls)
  double c_lap = 0.0;         // max <|d1^2 omega|^2> / <|lap omega|^2>
  std::size_t used = 0;       // data with <omega^2> > 0
  bool degenerate = false;
  /// Where each maximum was attained.
  double c0_a_delta = 0.0, c0_a_eps = 0.0;
  double c0_b_delta = 0.0, c0_b_eps = 0.0;
};

/// Smallest constants making the key-lemma inequalities hold on every datum,
/// for every delta in `deltas` and eps in `eps_grid`. Throws
/// std::invalid_argument on an empty data set.
Calibration calibrate_constants(std::span<const DiagnosticsRecord> data, const Grid& grid,
                                const PhysicalParams& params, std::span<const double> deltas,
                                std::span<const double> eps_grid, double u0_w1r = 0.0);

/// Part (a) / part (b) right-hand sides with a given C0, for checks.
double lemma_a_slack(const DiagnosticsRecord& d, const BackgroundProfile& prof, double c0, double eps);
double lemma_b_slack(const DiagnosticsRecord& d, const BackgroundProfile& prof, double c0, double eps);

/// Grid-aligned deltas h2, 2 h2, ... below 1/2.
std::vector<double> aligned_deltas(const Grid& g);

struct CertificateReport {
  BoundParams bp;
  QBreakdown q;
  double coeff_a = 0.0;           // A
  double coeff_grad_omega = 0.0;  // a (1/4 - c2/Ls^2)
  double nu = 0.0;                // measured (averaged nu_grad)
  double nu_flux = 0.0;
  /// (1/(2 delta) + M Ra^2 - Q_obs - b) / (1 - b): equals Nu up to the closure defect.
  double nu_identity = 0.0;
  /// (1/(2 delta) + M Ra^2 - b) / (1 - b): the bound implied by Q >= 0.
  double nu_bound_implied = 0.0;
  double nu_bound_asymptotic = 0.0;
  double closure_defect = 0.0;    // (1-b) nu_grad + b - [1/(2 delta) + M Ra^2 - Q]
  bool q_nonnegative = false;
  bool coefficients_positive = false;
  bool below_implied = false;
  bool below_asymptotic = false;
  bool certified = false;
  /// Most negative contributing term when Q < 0 or a coefficient is negative.
  std::string violating_term;
  double ls_threshold = 0.0;      // smallest Ls with a positive grad-omega coefficient
  double delta_formula = 0.0;     // Pr = inf path: delta before grid rounding
  bool delta_clamped = false;     // Pr = inf path: formula above the widest layer
  std::string label = "empirical certificate at finite horizon";
};

CertificateReport certify(const DiagnosticsRecord& averages, const BoundParams& bp,
                          const BackgroundProfile& prof, const PhysicalParams& params,
                          double nu_bound_asymptotic = 0.0);

/// Pr = inf path through lemma part (b): eps = C^{-1/2} Ra^{-1} with
/// C = c_lap, delta = (b eps^{2/3} / (2 c0_b Ra))^{1/4}, M = 0.
CertificateReport certify_infinite_pr(const DiagnosticsRecord& averages, const PhysicalParams& params,
                                      const Grid& grid, double b, double c0_b, double c_lap);

struct DcBoundReport {
  double nu = 0.0;
  double delta = 0.0;
  double rhs = 0.0;
  double delta_star = 0.0;
  double rhs_star = 0.0;
  bool holds = false;
  bool holds_star = false;
};

/// Nu <= 1/(2 delta) + 2 delta sqrt(Nu) sqrt((Nu - 1) Ra), at delta and at
/// delta* = Nu^{-1/2} Ra^{-1/4} / 2.
DcBoundReport dc_bound_check(const DiagnosticsRecord& averages, double delta, const PhysicalParams& params);

nlohmann::json to_json(const QBreakdown& q);
nlohmann::json to_json(const BoundParams& b);
nlohmann::json to_json(const Calibration& c);
nlohmann::json to_json(const CertificateReport& r);
nlohmann::json to_json(const DcBoundReport& r);

}  // namespace slipconvect
