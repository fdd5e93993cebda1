#include <cmath>

#include <gtest/gtest.h>

#include "slipconvect/boundcert.hpp"
#include "slipconvect/errors.hpp"
#include "slipconvect/run.hpp"

using namespace slipconvect;

namespace {

PhysicalParams params(double ra, double pr, double ls) {
  PhysicalParams p;
  p.ra = ra;
  p.pr = std::isinf(pr) ? ExtendedReal::infinite() : ExtendedReal::finite(pr);
  p.ls = std::isinf(ls) ? ExtendedReal::infinite() : ExtendedReal::finite(ls);
  return p;
}

DiagnosticsRecord conduction_record(const Grid& g, const PhysicalParams& p) {
  Transform tr(g);
  return evaluate(tr, init_state(p, g, {}), p);
}

/// Records from a short convecting run, shared by the calibration tests.
const std::vector<DiagnosticsRecord>& convecting_records() {
  static const std::vector<DiagnosticsRecord> recs = [] {
    RunConfig cfg;
    cfg.physical = params(2e4, 1.0, INFINITY);
    cfg.grid = {32, 32, true};
    cfg.time.dt_max = 1e-3;
    cfg.time.t_end = 0.1;
    cfg.init.amplitude = 0.1;
    cfg.output.diag_every = 5;
    RunOptions o;
    o.write_outputs = false;
    return run(cfg, o).records;
  }();
  return recs;
}

}  // namespace

TEST(Exponent, Table) {
  EXPECT_EQ(exponent(0.0), 0.5);
  EXPECT_EQ(exponent(1.0 / 24.0), 5.0 / 12.0);
  EXPECT_EQ(0.5 - 2.0 * (1.0 / 24.0), 5.0 / 12.0);  // the other branch meets exactly
  EXPECT_EQ(exponent(1.0), 5.0 / 12.0);
  EXPECT_EQ(exponent(0.01), 0.48);
  EXPECT_THROW(exponent(-0.1), std::invalid_argument);
  EXPECT_THROW(exponent(NAN), std::invalid_argument);
}

TEST(Exponent, ContinuousAndNonincreasing) {
  double last = exponent(0.0);
  for (int i = 1; i <= 1000; ++i) {
    const double v = exponent(i * 1e-4);
    EXPECT_LE(v, last);
    EXPECT_LT(last - v, 2.1e-4);
    last = v;
  }
}

TEST(Profile, GridAlignedLayersIntegrateExactly) {
  const Grid g(8, 64, 2.0);
  const BackgroundProfile p = make_profile(0.1, g);
  EXPECT_EQ(p.layer_points, 6);  // round(0.1 * 64)
  EXPECT_DOUBLE_EQ(p.delta, 6.0 / 64.0);
  EXPECT_EQ(p.tau[0], 1.0);
  EXPECT_EQ(p.tau[64], 0.0);
  EXPECT_EQ(p.tau[32], 0.5);
  // int tau'^2 = 2 delta / (4 delta^2) = 1/(2 delta).
  EXPECT_NEAR(layer_integral(g, p, p.dtau), 1.0 / (2.0 * p.delta), 1e-12);
  EXPECT_EQ(make_profile(1e-4, g).layer_points, 1);
  EXPECT_THROW(make_profile(0.5, g), std::invalid_argument);
  EXPECT_THROW(make_profile(0.0, g), std::invalid_argument);
  EXPECT_THROW(make_profile(0.49, Grid(8, 8, 2.0)), std::invalid_argument);
}

TEST(Profile, ThetaVanishesOnWalls) {
  const Grid g(8, 32, 2.0);
  const PhysicalParams p = params(1e3, 1, 1);
  const SimState s = init_state(p, g, {});
  const BackgroundProfile prof = make_profile(0.125, g);
  const ScalarField th = theta_of(s.temperature, prof);
  EXPECT_EQ(th(0, 0), Complex(0.0));
  EXPECT_EQ(th(0, 16).real(), 0.5 - 0.5);
  ScalarField bad = s.temperature;
  bad(0, 0) = 1.5;
  EXPECT_THROW(theta_of(bad, prof), ValidationError);
}

// Conduction: <|d2 theta|^2> = 1 - 2 + 1/(2 delta), cross = 0, so the closure
// (1-b) Nu + b - [1/(2 delta) + M Ra^2 - Q] vanishes for any parameters.
TEST(QFunctional, ConductionClosureIsExact) {
  const Grid g(16, 32, 2.0);
  const PhysicalParams p = params(1e4, 2.0, 3.0);
  const DiagnosticsRecord r = conduction_record(g, p);
  for (double delta : {1.0 / 32, 0.25}) {
    const BackgroundProfile prof = make_profile(delta, g);
    EXPECT_NEAR(grad2_theta_sq(r, prof), 1.0 / (2.0 * prof.delta) - 1.0, 1e-12);
    EXPECT_NEAR(cross_term(r, prof), 0.0, 1e-15);
    BoundParams bp;
    bp.a = 1e-4;
    bp.b = 0.3;
    bp.m = 1e-7;
    const CertificateReport rep = certify(r, bp, prof, p);
    EXPECT_NEAR(rep.closure_defect, 0.0, 1e-10);
    EXPECT_NEAR(rep.nu_identity, 1.0, 1e-10);
  }
}

TEST(QFunctional, ForcedSignsOnConvectingData) {
  const Grid g(32, 32, 2.0);
  const PhysicalParams p = params(2e4, 1.0, INFINITY);
  BoundParams bp;
  bp.a = 1e-6;
  bp.m = 1e-9;
  const BackgroundProfile prof = make_profile(0.1, g);
  for (const auto& r : convecting_records()) {
    const QBreakdown q = q_functional(r, prof, bp, p);
    EXPECT_GE(q.grad1_theta, 0.0);
    EXPECT_GE(q.grad2_theta, 0.0);
    EXPECT_GE(q.m_ra2, 0.0);
    EXPECT_GE(q.b_enstrophy, 0.0);
    EXPECT_GE(q.a_grad_omega, 0.0);
    EXPECT_NEAR(q.total,
                q.m_ra2 + q.grad1_theta + q.grad2_theta + q.cross + q.b_enstrophy + q.b_wall + q.a_grad_omega +
                    q.a_wall_pressure + q.a_cross,
                1e-12 * std::abs(q.total) + 1e-12);
  }
}

TEST(QFunctional, FieldAndRecordEntryPointsAgree) {
  RunConfig cfg;
  cfg.physical = params(2e4, 1.0, 1.0);
  cfg.grid = {16, 32, true};
  cfg.time.dt_max = 5e-4;
  cfg.time.t_end = 0.01;
  cfg.init.amplitude = 0.1;
  RunOptions o;
  o.write_outputs = false;
  const RunResult rr = run(cfg, o);
  const Grid g(cfg.grid, 2.0);
  Transform tr(g);
  const SimState& s = rr.final_state;
  const PressureSolution pr = solve_pressure(tr, s.vel, s.temperature, cfg.physical);
  const BackgroundProfile prof = make_profile(0.125, g);
  BoundParams bp;
  bp.a = 1e-5;
  const QBreakdown a = q_functional(tr, theta_of(s.temperature, prof), s.vel, s.omega, pr.p, prof, bp, cfg.physical);
  const QBreakdown b = q_functional(evaluate(tr, s, cfg.physical, pr.p), prof, bp, cfg.physical);
  EXPECT_NEAR(a.total, b.total, 1e-10 * std::abs(b.total));
  EXPECT_NE(a.a_wall_pressure, 0.0);
}

TEST(Parameters, FollowTheClosedForms) {
  const Grid g(8, 256, 2.0);
  const PhysicalParams p = params(1e6, 10.0, INFINITY);
  const double b = 0.5, c0 = 1e-8, c2 = 2.0;
  const ParameterChoice pc = choose_parameters(p, b, c0, c2, 0.0, g);
  const double a0 = b / (100.0 * c2 * c2);
  EXPECT_DOUBLE_EQ(pc.a0, a0);
  EXPECT_DOUBLE_EQ(pc.bp.a, a0 * 1e-9);
  EXPECT_DOUBLE_EQ(pc.bp.eps, pc.bp.a);
  EXPECT_EQ(pc.bp.m, 0.0);
  const double formula = std::pow(a0 * b / (4.0 * c0), 1.0 / 6.0) * std::pow(1e6, -5.0 / 12.0);
  EXPECT_NEAR(pc.delta_formula, formula, 1e-15);
  EXPECT_LE(pc.bp.delta, formula);
  EXPECT_GT(pc.bp.delta, formula - g.h2());
  EXPECT_NEAR(pc.bp.delta * 256, std::round(pc.bp.delta * 256), 1e-9);
  EXPECT_NEAR(pc.nu_bound_asymptotic, 0.5 * std::pow(4 * c0 / (a0 * b), 1.0 / 6.0) * std::pow(1e6, 5.0 / 12.0),
              1e-9);

  const PhysicalParams slip = params(1e6, 10.0, 2.0);
  EXPECT_THROW(choose_parameters(slip, b, c0, c2, 0.0, g), ValidationError);
  const ParameterChoice loose = choose_parameters(slip, b, c0, c2, 0.0, g, false);
  EXPECT_DOUBLE_EQ(loose.bp.m, loose.bp.a * c2 * c2 / 8.0);
  EXPECT_THROW(choose_parameters(p, 1.5, c0, c2, 0.0, g), ValidationError);
}

TEST(Calibration, ConstantsAreMinimal) {
  const Grid g(32, 32, 2.0);
  const PhysicalParams p = params(2e4, 1.0, INFINITY);
  const auto& data = convecting_records();
  const std::vector<double> deltas = aligned_deltas(g);
  const double eps[] = {1e-7, 1e-6};
  const Calibration c = calibrate_constants(data, g, p, deltas, eps);
  ASSERT_GT(c.c0_a, 0.0);
  ASSERT_GT(c.c0_b, 0.0);
  EXPECT_FALSE(c.degenerate);
  double worst_a = INFINITY, worst_b = INFINITY;
  double worst_a_tight = INFINITY, worst_b_tight = INFINITY;
  for (const auto& d : data)
    for (double dl : deltas) {
      const BackgroundProfile prof = make_profile(dl, g);
      for (double e : eps) {
        worst_a = std::min(worst_a, lemma_a_slack(d, prof, c.c0_a, e));
        worst_b = std::min(worst_b, lemma_b_slack(d, prof, c.c0_b, e));
        worst_a_tight = std::min(worst_a_tight, lemma_a_slack(d, prof, c.c0_a / 1.01, e));
        worst_b_tight = std::min(worst_b_tight, lemma_b_slack(d, prof, c.c0_b / 1.01, e));
      }
    }
  EXPECT_GE(worst_a, -1e-9);
  EXPECT_GE(worst_b, -1e-9);
  EXPECT_LT(worst_a_tight, 0.0);
  EXPECT_LT(worst_b_tight, 0.0);
}

TEST(Calibration, RestStateIsDegenerate) {
  const Grid g(16, 16, 2.0);
  const PhysicalParams p = params(1e3, 1.0, 1.0);
  const DiagnosticsRecord r = conduction_record(g, p);
  const std::vector<DiagnosticsRecord> data{r};
  const double eps[] = {1e-3};
  const Calibration c = calibrate_constants(data, g, p, aligned_deltas(g), eps);
  EXPECT_TRUE(c.degenerate);
  EXPECT_EQ(c.c0_a, 0.0);
  EXPECT_THROW(calibrate_constants({}, g, p, aligned_deltas(g), eps), std::invalid_argument);
}

TEST(Certificate, TinyC0DrivesTheCoefficientNegative) {
  const Grid g(32, 32, 2.0);
  const PhysicalParams p = params(2e4, 1.0, INFINITY);
  RunningAverages avg;
  for (const auto& r : convecting_records()) avg.add(r, 1.0);
  // A = b/Ra - a^2 Ra^2/2 - 2 c0 delta^6 / a; with a -> tiny the last term dominates.
  ParameterChoice pc = choose_parameters(p, 0.5, 1.0, 1.0, 0.0, g);
  pc.bp.a = 1e-30;
  const CertificateReport bad = certify(avg.mean(), pc.bp, pc.profile, p);
  EXPECT_LT(bad.coeff_a, 0.0);
  EXPECT_FALSE(bad.certified);
  EXPECT_FALSE(bad.violating_term.empty());

  const ParameterChoice ok = choose_parameters(p, 0.5, 1e-12, 1.0, 0.0, g);
  const CertificateReport good = certify(avg.mean(), ok.bp, ok.profile, p);
  EXPECT_GT(good.coeff_a, 0.0);
  EXPECT_GT(good.coeff_grad_omega, 0.0);
  EXPECT_DOUBLE_EQ(good.ls_threshold, 2.0);
}

// delta = (b eps^{2/3} / (2 c0 Ra))^{1/4} with eps = C^{-1/2} / Ra, before grid rounding.
TEST(Certificate, InfinitePrandtlDeltaScaling) {
  const Grid g(16, 64, 2.0);
  const double b = 0.5, c0 = 0.3, c_lap = 0.2;
  for (double ra : {1e4, 1e6}) {
    const PhysicalParams p = params(ra, INFINITY, 1.0);
    const CertificateReport r = certify_infinite_pr(conduction_record(g, p), p, g, b, c0, c_lap);
    const double oracle = std::pow(b * std::pow(c_lap, -1.0 / 3.0) / (2.0 * c0), 0.25) * std::pow(ra, -5.0 / 12.0);
    EXPECT_NEAR(r.delta_formula / oracle, 1.0, 1e-12);
    EXPECT_LE(r.bp.delta, std::max(r.delta_formula, g.h2()) + 1e-15);
    EXPECT_NEAR(std::fmod(r.bp.delta / g.h2() + 0.5, 1.0), 0.5, 1e-9);
    EXPECT_FALSE(r.delta_clamped);
  }
}

TEST(DcBound, ConductionAndLimits) {
  const Grid g(16, 16, 2.0);
  const PhysicalParams p = params(1e4, 1.0, 1.0);
  const DiagnosticsRecord r = conduction_record(g, p);
  for (double d : {0.1, 0.5}) EXPECT_TRUE(dc_bound_check(r, d, p).holds);
  DiagnosticsRecord hot = r;
  hot.nu_flux = 5.0;
  const DcBoundReport tiny = dc_bound_check(hot, 1e-9, p);
  EXPECT_TRUE(tiny.holds);
  EXPECT_GT(tiny.rhs, 1e8);
  // At delta* the two terms are 1/(2 delta*) and delta* * 2 sqrt(Nu (Nu-1) Ra).
  const DcBoundReport s = dc_bound_check(hot, 0.1, p);
  EXPECT_NEAR(s.delta_star, 0.5 / (std::sqrt(5.0) * 10.0), 1e-15);
  EXPECT_TRUE(s.holds_star);
}
