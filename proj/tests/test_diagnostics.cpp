#include <algorithm>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "slipconvect/diagnostics.hpp"

using namespace slipconvect;
using std::numbers::pi;

namespace {

PhysicalParams params(double ra, double pr, double ls) {
  PhysicalParams p;
  p.ra = ra;
  p.pr = ExtendedReal::finite(pr);
  p.ls = std::isinf(ls) ? ExtendedReal::infinite() : ExtendedReal::finite(ls);
  return p;
}

/// T = 1 - y + eps sin(pi y) cos(2 pi x / gamma), at rest.
SimState single_mode(const Grid& g, double eps) {
  SimState s = init_state(params(1e3, 1, 1), g, {});
  for (int j = 0; j < g.points(); ++j) s.temperature(1, j) = 0.5 * eps * std::sin(pi * g.x2(j));
  return s;
}

}  // namespace

// Hand evaluation: x1-means kill the cross terms, so nu_flux = nu_wall = 1 and
// nu_grad = 1 + eps^2 (pi^2 + (2 pi/gamma)^2) / 4.
TEST(Nusselt, SingleModeTemperatureAtRest) {
  const double eps = 0.1;
  const auto spread = [&](int n) {
    const Grid g(16, n, 2.0);
    const NusseltTriple nu = nusselt_all(single_mode(g, eps));
    EXPECT_NEAR(nu.flux, 1.0, 1e-13);
    EXPECT_NEAR(nu.wall, 1.0, 1e-13);
    return std::abs(nu.grad - (1.0 + eps * eps * (pi * pi + pi * pi) / 4.0));
  };
  EXPECT_LT(spread(64), 1e-4);
  EXPECT_GT(spread(32) / spread(64), 3.5);  // second order
}

TEST(Nusselt, GradientPartIsQuadraticInTheAmplitude) {
  const Grid g(16, 32, 2.0);
  const double a = nusselt_all(single_mode(g, 0.05)).grad - 1.0;
  const double b = nusselt_all(single_mode(g, 0.10)).grad - 1.0;
  EXPECT_NEAR(b / a, 4.0, 1e-9);
}

TEST(Evaluate, ConductionRecord) {
  const Grid g(16, 16, 2.0);
  Transform tr(g);
  const PhysicalParams p = params(1e4, 1, 0.5);
  const SimState s = init_state(p, g, {});
  const DiagnosticsRecord r = evaluate(tr, s, p);
  EXPECT_NEAR(r.nu_flux, 1.0, 1e-14);
  EXPECT_NEAR(r.nu_grad, 1.0, 1e-14);
  EXPECT_NEAR(r.nu_wall, 1.0, 1e-14);
  EXPECT_EQ(r.kinetic_energy, 0.0);
  EXPECT_EQ(r.max_T, 1.0);
  const BalanceSample b = balance_sample(s);
  EXPECT_EQ(energy_balance_residual(r, b, b, p), 0.0);
  EXPECT_EQ(enstrophy_balance_residual(r, b, b, p), 0.0);
  ASSERT_EQ(r.u2T_profile.size(), std::size_t(g.points()));
}

// (1/Pr) dE/dt + <|grad u|^2> + (1/Ls) walls = Ra <u2 T>, built by hand.
TEST(Balances, ResidualFormulas) {
  const PhysicalParams p = params(10.0, 2.0, 4.0);
  DiagnosticsRecord now;
  now.grad_u_sq = 3.0;
  now.wall_u1_sq_bottom = 2.0;
  now.wall_u1_sq_top = 2.0;
  now.buoyancy_flux = 10.0;
  BalanceSample prev{0.0, 1.0, 0.0, 0.0}, next{2.0, 17.0, 0.0, 0.0};
  // dE/dt = 8 -> 4 + 3 + 1 = 8 vs 10.
  EXPECT_NEAR(energy_balance_residual(now, prev, next, p), 0.2, 1e-15);
  next.kinetic_energy = 9.0;  // dE/dt = 4 -> 2 + 3 + 1 = 6
  EXPECT_NEAR(energy_balance_residual(now, prev, next, p), 0.4, 1e-15);

  DiagnosticsRecord z;
  z.grad_omega_sq = 1.0;
  z.wall_p_du1_bottom = 2.0;
  z.wall_p_du1_top = 2.0;  // (1/Ls) * 4 = 1
  z.omega_dT1 = 0.1;       // Ra * 0.1 = 1
  BalanceSample zp{0.0, 0.0, 1.0, 0.0}, zn{1.0, 0.0, 3.0, 8.0};
  // (1/2) * 2 + (1/(2*4*2)) * 8 + 1 = 1 + 0.5 + 1 = 2.5 vs 2.
  EXPECT_NEAR(enstrophy_balance_residual(z, zp, zn, p), 0.25, 1e-15);
  // Small right-hand sides are measured absolutely.
  z.omega_dT1 = 0.0;
  z.wall_p_du1_bottom = z.wall_p_du1_top = 0.0;
  EXPECT_NEAR(enstrophy_balance_residual(z, zp, zp, p), 1.0, 1e-15);
}

TEST(Averages, WeightedMeanOfScalarsAndProfiles) {
  DiagnosticsRecord a, b;
  a.nu_flux = 1.0;
  b.nu_flux = 4.0;
  a.u2T_profile = {0.0, 2.0};
  b.u2T_profile = {3.0, 2.0};
  RunningAverages avg;
  avg.add(a, 1.0);
  avg.add(b, 2.0);
  avg.add(b, 0.0);   // ignored
  avg.add(b, -1.0);  // ignored
  EXPECT_DOUBLE_EQ(avg.window(), 3.0);
  EXPECT_EQ(avg.samples(), 2u);
  EXPECT_DOUBLE_EQ(avg.mean().nu_flux, 3.0);
  EXPECT_DOUBLE_EQ(avg.mean().u2T_profile[0], 2.0);
  EXPECT_DOUBLE_EQ(avg.mean().u2T_profile[1], 2.0);
}

TEST(Averages, EmptyWindowIsRejected) {
  EXPECT_THROW(averaged_balances(RunningAverages{}, params(1, 1, 1)), std::invalid_argument);
}

TEST(Averages, SpreadAndBalancesOfAveragedData) {
  DiagnosticsRecord r;
  r.nu_flux = 2.0;
  r.nu_grad = 2.02;
  r.nu_wall = 1.98;
  r.grad_u_sq = 10.0;
  r.buoyancy_flux = 10.0;
  r.grad_omega_sq = 5.0;
  r.omega_dT1 = 1.0;
  RunningAverages avg;
  avg.add(r, 1.0);
  const AveragedBalanceReport rep = averaged_balances(avg, params(5.0, 1, INFINITY));
  EXPECT_NEAR(rep.nu_spread, 0.02, 1e-14);
  EXPECT_NEAR(rep.energy_residual, 0.0, 1e-15);
  EXPECT_NEAR(rep.enstrophy_residual, 0.0, 1e-15);
}

// psi = sin(pi y) cos(k x) under free slip: ||grad u|| = ||omega|| and
// ||lap u|| = ||grad omega|| hold in the continuum.
TEST(Appendix, IdentitiesOnASmoothFreeSlipState) {
  const Grid g(16, 64, 2.0);
  Transform tr(g);
  const PhysicalParams p = params(1e3, 1, INFINITY);
  SimState s = init_state(p, g, {});
  const double k = g.wavenumber(1);
  s.omega = sample(tr, [&](double x, double y) { return -(pi * pi + k * k) * std::sin(pi * y) * std::cos(k * x); });
  s.vel = solve_streamfunction(s.omega, p.ls, std::span<const double>(s.mean_flow)).vel;
  const AppendixReport a = appendix_identity_checks(s);
  EXPECT_TRUE(a.passes(5.0 * g.h2()));
  EXPECT_TRUE(a.interpolation_holds);
  // ||d1 omega||^2 = k^2 ||omega||^2 and ||d1^2 omega|| = k^2 ||omega||: equality case.
  EXPECT_NEAR(a.d1_omega_sq, a.interp_rhs, 1e-9 * a.interp_rhs);
}

TEST(Output, CsvHeaderIsFixed) {
  EXPECT_EQ(csv_header(), "time,nu_flux,nu_grad,nu_wall,E,Z,gZ,wu1b,wu1t,wpdb,wpdt,buoy,omdT,lp2,lp4,maxT,res_e,res_z");
  DiagnosticsRecord r;
  r.time = 0.1;
  const std::string row = csv_row(r);
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), 17);
  EXPECT_EQ(row.substr(0, 4), "0.10");
}

TEST(Output, JsonRoundTrip) {
  DiagnosticsRecord r;
  r.time = 1.0 / 3.0;
  r.nu_grad = 7.25;
  r.lap_omega_sq = 1e300;
  r.dT2_profile = {1.0, -2.0, 0.1};
  const DiagnosticsRecord back = record_from_json(nlohmann::json::parse(to_json(r).dump()));
  EXPECT_EQ(back.time, r.time);
  EXPECT_EQ(back.nu_grad, r.nu_grad);
  EXPECT_EQ(back.lap_omega_sq, r.lap_omega_sq);
  EXPECT_EQ(back.dT2_profile, r.dT2_profile);
}

TEST(Monitors, KineticBoundAndRunningMaxima) {
  const Grid g(16, 16, 2.0);
  const PhysicalParams p = params(100.0, 1, 2.0);
  const SimState s = init_state(p, g, {});
  Monitors m;
  m.init(s, p);
  EXPECT_DOUBLE_EQ(m.kinetic_bound, 3.0 * 2.0 * 2.0 * 100.0);
  DiagnosticsRecord r;
  r.max_T = 0.9;
  r.lp_omega_2 = 3.0;
  m.update(r, p);
  r.lp_omega_2 = 2.0;
  m.update(r, p);
  EXPECT_EQ(m.max_omega_l2, 3.0);
  EXPECT_EQ(m.kinetic_violations, 0);
}
