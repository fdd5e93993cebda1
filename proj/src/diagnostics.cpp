#include "slipconvect/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace slipconvect {

namespace {

using Member = double DiagnosticsRecord::*;
struct NamedMember {
  const char* name;
  Member ptr;
};

constexpr NamedMember scalar_members[] = {
    {"time", &DiagnosticsRecord::time},
    {"nu_flux", &DiagnosticsRecord::nu_flux},
    {"nu_grad", &DiagnosticsRecord::nu_grad},
    {"nu_wall", &DiagnosticsRecord::nu_wall},
    {"kinetic_energy", &DiagnosticsRecord::kinetic_energy},
    {"enstrophy", &DiagnosticsRecord::enstrophy},
    {"grad_omega_sq", &DiagnosticsRecord::grad_omega_sq},
    {"wall_u1_sq_bottom", &DiagnosticsRecord::wall_u1_sq_bottom},
    {"wall_u1_sq_top", &DiagnosticsRecord::wall_u1_sq_top},
    {"wall_p_du1_bottom", &DiagnosticsRecord::wall_p_du1_bottom},
    {"wall_p_du1_top", &DiagnosticsRecord::wall_p_du1_top},
    {"buoyancy_flux", &DiagnosticsRecord::buoyancy_flux},
    {"omega_dT1", &DiagnosticsRecord::omega_dT1},
    {"lp_omega_2", &DiagnosticsRecord::lp_omega_2},
    {"lp_omega_4", &DiagnosticsRecord::lp_omega_4},
    {"max_T", &DiagnosticsRecord::max_T},
    {"energy_residual", &DiagnosticsRecord::energy_residual},
    {"enstrophy_residual", &DiagnosticsRecord::enstrophy_residual},
    {"grad_u_sq", &DiagnosticsRecord::grad_u_sq},
    {"lap_u_sq", &DiagnosticsRecord::lap_u_sq},
    {"omega_sq", &DiagnosticsRecord::omega_sq},
    {"d1_omega_sq", &DiagnosticsRecord::d1_omega_sq},
    {"d11_omega_sq", &DiagnosticsRecord::d11_omega_sq},
    {"lap_omega_sq", &DiagnosticsRecord::lap_omega_sq},
    {"dT1_sq", &DiagnosticsRecord::dT1_sq},
    {"dT2_sq", &DiagnosticsRecord::dT2_sq},
    {"temp_sq", &DiagnosticsRecord::temp_sq},
    {"pressure_h1_sq", &DiagnosticsRecord::pressure_h1_sq},
    {"pressure_projection", &DiagnosticsRecord::pressure_projection},
};

using ProfileMember = std::vector<double> DiagnosticsRecord::*;
struct NamedProfile {
  const char* name;
  ProfileMember ptr;
};

constexpr NamedProfile profile_members[] = {
    {"u2T_profile", &DiagnosticsRecord::u2T_profile},
    {"dT2_profile", &DiagnosticsRecord::dT2_profile},
    {"dT2_sq_profile", &DiagnosticsRecord::dT2_sq_profile},
};

/// The velocity/vorticity quadratic functionals, all spectral.
void kinematic_functionals(const SimState& s, DiagnosticsRecord& r) {
  const ScalarField& u1 = s.vel.u1;
  const ScalarField& u2 = s.vel.u2;
  r.kinetic_energy = 0.5 * (l2_norm_sq(u1) + l2_norm_sq(u2));
  r.grad_u_sq = l2_norm_sq(ddx1(u1)) + l2_norm_sq(ddx2(u1)) + l2_norm_sq(ddx1(u2)) +
                l2_norm_sq(ddx2(u2));
  r.lap_u_sq = l2_norm_sq(laplacian(u1)) + l2_norm_sq(laplacian(u2));

  const ScalarField w1 = ddx1(s.omega);
  r.omega_sq = l2_norm_sq(s.omega);
  r.enstrophy = 0.5 * r.omega_sq;
  r.d1_omega_sq = l2_norm_sq(w1);
  r.grad_omega_sq = r.d1_omega_sq + l2_norm_sq(ddx2(s.omega));
  r.d11_omega_sq = l2_norm_sq(ddx1(w1));
  r.lap_omega_sq = l2_norm_sq(laplacian(s.omega));
}

double relative(double lhs, double rhs) { return std::abs(lhs - rhs) / std::max(std::abs(rhs), 1.0); }

}  // namespace

namespace {

// -d2 T at x2 = 0. The wall row of T is constant in x1 and fixed in time, so
// the mean-mode curvature T'' vanishes there and the two-point difference is
// second-order accurate (error h^2 T'''/6, half that of the three-point form).
double wall_nusselt(const ScalarField& T) {
  return (T(0, 0).real() - T(0, 1).real()) / T.grid().h2();
}

}  // namespace

NusseltTriple nusselt_all(const SimState& s) {
  const ScalarField t2 = ddx2(s.temperature);
  NusseltTriple n;
  n.flux = inner(s.vel.u2, s.temperature) - integral(t2);
  n.grad = l2_norm_sq(ddx1(s.temperature)) + l2_norm_sq(t2);
  n.wall = wall_nusselt(s.temperature);
  return n;
}

DiagnosticsRecord evaluate(Transform& tr, const SimState& s, const PhysicalParams& params,
                           const ScalarField& p, double projection) {
  const Grid& g = s.omega.grid();
  DiagnosticsRecord r;
  r.time = s.time;
  kinematic_functionals(s, r);

  const ScalarField& T = s.temperature;
  const ScalarField t1 = ddx1(T);
  const ScalarField t2 = ddx2(T);
  r.dT1_sq = l2_norm_sq(t1);
  r.dT2_sq = l2_norm_sq(t2);
  r.nu_grad = r.dT1_sq + r.dT2_sq;
  const double u2t = inner(s.vel.u2, T);
  r.nu_flux = u2t - integral(t2);
  r.nu_wall = wall_nusselt(T);
  r.buoyancy_flux = params.ra * u2t;
  r.omega_dT1 = inner(s.omega, t1);
  r.temp_sq = l2_norm_sq(T);

  const WallTrace u1b = wall_trace(s.vel.u1, Wall::bottom);
  const WallTrace u1t = wall_trace(s.vel.u1, Wall::top);
  r.wall_u1_sq_bottom = trace_inner(u1b, u1b);
  r.wall_u1_sq_top = trace_inner(u1t, u1t);
  const ScalarField du1 = ddx1(s.vel.u1);
  r.wall_p_du1_bottom = trace_inner(wall_trace(p, Wall::bottom), wall_trace(du1, Wall::bottom));
  r.wall_p_du1_top = trace_inner(wall_trace(p, Wall::top), wall_trace(du1, Wall::top));
  r.pressure_h1_sq = l2_norm_sq(p) + l2_norm_sq(ddx1(p)) + l2_norm_sq(ddx2(p));
  r.pressure_projection = projection;

  const PhysicalField w = tr.to_physical(s.omega);
  r.lp_omega_2 = lp_norm(w, 2.0);
  r.lp_omega_4 = lp_norm(w, 4.0);
  r.max_T = max_abs(tr.to_physical(T));

  r.u2T_profile = inner_profile(s.vel.u2, T);
  r.dT2_profile = mean_profile(t2);
  r.dT2_sq_profile = inner_profile(t2, t2);
  (void)g;
  return r;
}

DiagnosticsRecord evaluate(Transform& tr, const SimState& s, const PhysicalParams& params) {
  const PressureSolution p = solve_pressure(tr, s.vel, s.temperature, params);
  return evaluate(tr, s, params, p.p, p.projection);
}

BalanceSample balance_sample(const SimState& s) {
  BalanceSample b;
  b.time = s.time;
  b.kinetic_energy = 0.5 * (l2_norm_sq(s.vel.u1) + l2_norm_sq(s.vel.u2));
  b.enstrophy = 0.5 * l2_norm_sq(s.omega);
  const WallTrace u1b = wall_trace(s.vel.u1, Wall::bottom);
  const WallTrace u1t = wall_trace(s.vel.u1, Wall::top);
  b.wall_u1_sq = trace_inner(u1b, u1b) + trace_inner(u1t, u1t);
  return b;
}

double energy_balance_residual(const DiagnosticsRecord& now, const BalanceSample& prev,
                               const BalanceSample& next, const PhysicalParams& params) {
  const double span = next.time - prev.time;
  const double dedt = span > 0.0 ? (next.kinetic_energy - prev.kinetic_energy) / span : 0.0;
  const double lhs = params.pr.reciprocal() * dedt + now.grad_u_sq +
                     params.ls.reciprocal() * (now.wall_u1_sq_bottom + now.wall_u1_sq_top);
  return relative(lhs, now.buoyancy_flux);
}

double enstrophy_balance_residual(const DiagnosticsRecord& now, const BalanceSample& prev,
                                  const BalanceSample& next, const PhysicalParams& params) {
  const double span = next.time - prev.time;
  const double inv_pr = params.pr.reciprocal();
  const double inv_ls = params.ls.reciprocal();
  double rate = 0.0;
  if (span > 0.0)
    rate = inv_pr * (next.enstrophy - prev.enstrophy) / span +
           0.5 * inv_ls * inv_pr * (next.wall_u1_sq - prev.wall_u1_sq) / span;
  const double lhs = rate + now.grad_omega_sq;
  const double rhs = inv_ls * (now.wall_p_du1_bottom + now.wall_p_du1_top) + params.ra * now.omega_dT1;
  return relative(lhs, rhs);
}

void RunningAverages::add(const DiagnosticsRecord& r, double weight) {
  if (!(weight > 0.0)) return;
  if (samples_ == 0) {
    mean_ = r;
    window_ = weight;
    samples_ = 1;
    return;
  }
  window_ += weight;
  ++samples_;
  const double f = weight / window_;
  for (const auto& m : scalar_members) mean_.*m.ptr += f * (r.*m.ptr - mean_.*m.ptr);
  for (const auto& m : profile_members) {
    auto& acc = mean_.*m.ptr;
    const auto& x = r.*m.ptr;
    for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += f * (x[j] - acc[j]);
  }
}

AveragedBalanceReport averaged_balances(const RunningAverages& avg, const PhysicalParams& params) {
  if (!(avg.window() > 0.0)) throw std::invalid_argument("averaged_balances: empty averaging window");
  const DiagnosticsRecord& m = avg.mean();
  const double inv_ls = params.ls.reciprocal();
  AveragedBalanceReport rep;
  rep.window = avg.window();
  rep.nu = m.nu_flux;
  rep.energy_residual =
      relative(m.grad_u_sq + inv_ls * (m.wall_u1_sq_bottom + m.wall_u1_sq_top), m.buoyancy_flux);
  rep.enstrophy_residual =
      relative(m.grad_omega_sq, inv_ls * (m.wall_p_du1_bottom + m.wall_p_du1_top) + params.ra * m.omega_dT1);
  const double hi = std::max({m.nu_flux, m.nu_grad, m.nu_wall});
  const double lo = std::min({m.nu_flux, m.nu_grad, m.nu_wall});
  rep.nu_spread = (hi - lo) / std::abs(m.nu_flux);
  return rep;
}

// ---------------------------------------------------------------------------

bool AppendixReport::passes(double tol) const {
  return std::abs(ratio_grad - 1.0) <= tol && std::abs(ratio_lap - 1.0) <= tol && interpolation_holds;
}

AppendixReport appendix_identity_checks(const DiagnosticsRecord& r) {
  AppendixReport a;
  a.grad_u = std::sqrt(r.grad_u_sq);
  a.omega = std::sqrt(r.omega_sq);
  a.lap_u = std::sqrt(r.lap_u_sq);
  a.grad_omega = std::sqrt(r.grad_omega_sq);
  a.ratio_grad = a.omega > 0.0 ? a.grad_u / a.omega : (a.grad_u > 0.0 ? 0.0 : 1.0);
  a.ratio_lap = a.grad_omega > 0.0 ? a.lap_u / a.grad_omega : (a.lap_u > 0.0 ? 0.0 : 1.0);
  a.d1_omega_sq = r.d1_omega_sq;
  a.interp_rhs = a.omega * std::sqrt(r.d11_omega_sq);
  // Cauchy-Schwarz in x1 holds exactly for the discrete sums; allow rounding.
  a.interpolation_holds = a.d1_omega_sq <= a.interp_rhs * (1.0 + 1e-12) + 1e-300;
  if (r.lap_omega_sq > 0.0) {
    a.d1_over_lap = std::sqrt(r.d1_omega_sq / r.lap_omega_sq);
    a.d11_over_lap_sq = r.d11_omega_sq / r.lap_omega_sq;
  }
  return a;
}

AppendixReport appendix_identity_checks(const SimState& s) {
  DiagnosticsRecord r;
  kinematic_functionals(s, r);
  return appendix_identity_checks(r);
}

double pressure_bound_ratio(const DiagnosticsRecord& r, const PhysicalParams& params) {
  const double scale = params.ls.reciprocal() * std::sqrt(r.d1_omega_sq) + params.ra * std::sqrt(r.temp_sq) +
                       params.pr.reciprocal() * r.lp_omega_2 * r.lp_omega_4;
  return scale > 0.0 ? std::sqrt(r.pressure_h1_sq) / scale : 0.0;
}

void Monitors::init(const SimState& s0, const PhysicalParams& params) {
  const double inv_ls = params.ls.reciprocal();
  omega_scale_2 = s0.omega0_l2 + s0.u0_l2 * inv_ls + params.ra;
  omega_scale_4 = s0.omega0_l4 + s0.u0_l2 * inv_ls + params.ra;
  kinetic_bound = params.ls.is_infinite()
                      ? std::numeric_limits<double>::infinity()
                      : s0.u0_l2 + 3.0 * params.gamma * std::max(1.0, params.ls.value()) * params.ra;
}

void Monitors::update(const DiagnosticsRecord& r, const PhysicalParams& params) {
  max_omega_l2 = std::max(max_omega_l2, r.lp_omega_2);
  max_omega_l4 = std::max(max_omega_l4, r.lp_omega_4);
  const double u = std::sqrt(params.gamma * 2.0 * r.kinetic_energy);
  max_u_l2 = std::max(max_u_l2, u);
  if (u > kinetic_bound) ++kinetic_violations;
  max_T = std::max(max_T, r.max_T);
  pressure_ratio = std::max(pressure_ratio, pressure_bound_ratio(r, params));
  if (r.lap_omega_sq > 0.0) {
    d11_over_lap_sq = std::max(d11_over_lap_sq, r.d11_omega_sq / r.lap_omega_sq);
    d1_over_lap = std::max(d1_over_lap, std::sqrt(r.d1_omega_sq / r.lap_omega_sq));
  }
}

void Monitors::check_appendix(const DiagnosticsRecord& r, double h2) {
  const AppendixReport a = appendix_identity_checks(r);
  ++appendix_checks;
  appendix_max_deviation =
      std::max({appendix_max_deviation, std::abs(a.ratio_grad - 1.0), std::abs(a.ratio_lap - 1.0)});
  if (!a.passes(5.0 * h2)) ++appendix_failures;
  if (!a.interpolation_holds) ++interpolation_violations;
}

// ---------------------------------------------------------------------------

std::string csv_header() {
  return "time,nu_flux,nu_grad,nu_wall,E,Z,gZ,wu1b,wu1t,wpdb,wpdt,buoy,omdT,lp2,lp4,maxT,res_e,res_z";
}

std::string csv_row(const DiagnosticsRecord& r) {
  const double v[] = {r.time,
                      r.nu_flux,
                      r.nu_grad,
                      r.nu_wall,
                      r.kinetic_energy,
                      r.enstrophy,
                      r.grad_omega_sq,
                      r.wall_u1_sq_bottom,
                      r.wall_u1_sq_top,
                      r.wall_p_du1_bottom,
                      r.wall_p_du1_top,
                      r.buoyancy_flux,
                      r.omega_dT1,
                      r.lp_omega_2,
                      r.lp_omega_4,
                      r.max_T,
                      r.energy_residual,
                      r.enstrophy_residual};
  std::string out;
  char buf[32];
  for (std::size_t i = 0; i < std::size(v); ++i) {
    if (i) out += ',';
    std::snprintf(buf, sizeof buf, "%.17g", v[i]);
    out += buf;
  }
  return out;
}

nlohmann::json to_json(const DiagnosticsRecord& r) {
  nlohmann::json j;
  for (const auto& m : scalar_members) j[m.name] = r.*m.ptr;
  for (const auto& m : profile_members) j[m.name] = r.*m.ptr;
  return j;
}

DiagnosticsRecord record_from_json(const nlohmann::json& j) {
  DiagnosticsRecord r;
  for (const auto& m : scalar_members)
    if (j.contains(m.name) && j[m.name].is_number()) r.*m.ptr = j[m.name].get<double>();
  for (const auto& m : profile_members)
    if (j.contains(m.name)) r.*m.ptr = j[m.name].get<std::vector<double>>();
  return r;
}

nlohmann::json to_json(const AveragedBalanceReport& r) {
  return {{"window", r.window},
          {"nu", r.nu},
          {"energy_residual", r.energy_residual},
          {"enstrophy_residual", r.enstrophy_residual},
          {"nu_spread", r.nu_spread}};
}

nlohmann::json to_json(const Monitors& m) {
  const auto finite_or_null = [](double v) -> nlohmann::json {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
  };
  return {{"max_omega_l2", m.max_omega_l2},
          {"max_omega_l4", m.max_omega_l4},
          {"omega_scale_2", m.omega_scale_2},
          {"omega_scale_4", m.omega_scale_4},
          {"fitted_c_omega_2", m.fitted_c2()},
          {"fitted_c_omega_4", m.fitted_c4()},
          {"max_u_l2", m.max_u_l2},
          {"kinetic_bound", finite_or_null(m.kinetic_bound)},
          {"kinetic_violations", m.kinetic_violations},
          {"max_T", m.max_T},
          {"pressure_bound_c", m.pressure_ratio},
          {"d11_over_lap_sq", m.d11_over_lap_sq},
          {"d1_over_lap", m.d1_over_lap},
          {"appendix_checks", m.appendix_checks},
          {"appendix_max_deviation", m.appendix_max_deviation},
          {"appendix_failures", m.appendix_failures},
          {"interpolation_violations", m.interpolation_violations}};
}

}  // namespace slipconvect
