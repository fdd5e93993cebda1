#include "slipconvect/boundcert.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "slipconvect/errors.hpp"

namespace slipconvect {

double exponent(double alpha) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("exponent: alpha must be >= 0");
  if (alpha >= 1.0 / 24.0) return 5.0 / 12.0;
  return 0.5 - 2.0 * alpha;
}

// ---------------------------------------------------------------------------
// Profile

BackgroundProfile make_profile(double delta, const Grid& g) {
  if (!(delta > 0.0) || !(delta < 0.5))
    throw std::invalid_argument("make_profile: delta must lie in (0, 1/2)");
  const int n = g.n2;
  const double h = g.h2();
  int m = static_cast<int>(std::lround(delta / h));
  m = std::max(m, 1);
  if (2 * m >= n) throw std::invalid_argument("make_profile: delta rounds to >= 1/2 on this grid");

  BackgroundProfile p;
  p.requested_delta = delta;
  p.layer_points = m;
  p.delta = m * h;
  p.tau.resize(n + 1);
  p.dtau.assign(n + 1, 0.0);
  const double slope = -1.0 / (2.0 * p.delta);
  for (int j = 0; j <= n; ++j) {
    const double x = g.x2(j);
    if (j <= m) {
      p.tau[j] = 1.0 - x / (2.0 * p.delta);
      p.dtau[j] = slope;
    } else if (j >= n - m) {
      p.tau[j] = (1.0 - x) / (2.0 * p.delta);
      p.dtau[j] = slope;
    } else {
      p.tau[j] = 0.5;
    }
  }
  // Exact kink and wall values (no rounding drift from x / (2 delta)).
  p.tau[0] = 1.0;
  p.tau[m] = 0.5;
  p.tau[n - m] = 0.5;
  p.tau[n] = 0.0;
  return p;
}

double layer_integral(const Grid& g, const BackgroundProfile& prof, std::span<const double> f) {
  const int n = g.n2;
  const int m = prof.layer_points;
  const double h = g.h2();
  const auto layer = [&](int lo, int hi) {
    double s = 0.5 * (prof.dtau[lo] * f[lo] + prof.dtau[hi] * f[hi]);
    for (int j = lo + 1; j < hi; ++j) s += prof.dtau[j] * f[j];
    return h * s;
  };
  return layer(0, m) + layer(n - m, n);
}

ScalarField theta_of(const ScalarField& T, const BackgroundProfile& prof) {
  const Grid& g = T.grid();
  if (prof.tau.size() != static_cast<std::size_t>(g.points()))
    throw std::invalid_argument("theta_of: profile does not match the grid");
  ScalarField th = T;
  for (int j = 0; j < g.points(); ++j) th(0, j) -= prof.tau[j];
  for (int k = 0; k < g.modes(); ++k)
    if (std::abs(th(k, 0)) > 1e-12 || std::abs(th(k, g.n2)) > 1e-12)
      throw ValidationError("theta_of: theta does not vanish on the walls (mode " + std::to_string(k) + ")");
  return th;
}

// ---------------------------------------------------------------------------
// Q functional

namespace {

/// Only n2 matters to the x2 quadratures.
Grid profile_grid(const BackgroundProfile& prof) { return Grid(8, static_cast<int>(prof.tau.size()) - 1, 1.0); }

}  // namespace

double grad2_theta_sq(const DiagnosticsRecord& d, const BackgroundProfile& prof) {
  const Grid g = profile_grid(prof);
  const double tau_sq = layer_integral(g, prof, prof.dtau);
  return trapezoid(g, d.dT2_sq_profile) - 2.0 * layer_integral(g, prof, d.dT2_profile) + tau_sq;
}

double cross_term(const DiagnosticsRecord& d, const BackgroundProfile& prof) {
  const Grid g = profile_grid(prof);
  return 2.0 * layer_integral(g, prof, d.u2T_profile);
}

QBreakdown q_functional(const DiagnosticsRecord& d, const BackgroundProfile& prof, const BoundParams& bp,
                        const PhysicalParams& params) {
  const double ra = params.ra;
  const double inv_ls = params.ls.reciprocal();
  QBreakdown q;
  q.m_ra2 = bp.m * ra * ra;
  q.grad1_theta = d.dT1_sq;
  q.grad2_theta = grad2_theta_sq(d, prof);
  q.cross = cross_term(d, prof);
  q.b_enstrophy = bp.b / ra * d.omega_sq;
  q.b_wall = bp.b / ra * inv_ls * (d.wall_u1_sq_bottom + d.wall_u1_sq_top);
  q.a_grad_omega = bp.a * d.grad_omega_sq;
  q.a_wall_pressure = -bp.a * inv_ls * (d.wall_p_du1_bottom + d.wall_p_du1_top);
  q.a_cross = -bp.a * ra * d.omega_dT1;
  q.total = q.m_ra2 + q.grad1_theta + q.grad2_theta + q.cross + q.b_enstrophy + q.b_wall +
            q.a_grad_omega + q.a_wall_pressure + q.a_cross;
  return q;
}

QBreakdown q_functional(Transform& tr, const ScalarField& theta, const VelocityPair& vel,
                        const ScalarField& omega, const ScalarField& p, const BackgroundProfile& prof,
                        const BoundParams& bp, const PhysicalParams& params) {
  SimState s;
  s.omega = omega;
  s.temperature = theta;
  for (int j = 0; j < theta.grid().points(); ++j) s.temperature(0, j) += prof.tau[j];
  s.vel = vel;
  return q_functional(evaluate(tr, s, params, p), prof, bp, params);
}

// ---------------------------------------------------------------------------
// Parameters

double asymptotic_bound(const PhysicalParams& params, double a0, double b, double c0, double c2) {
  const double ra = params.ra;
  const double inv_ls = params.ls.reciprocal();
  const double first = c0 > 0.0 ? 0.5 * std::pow(4.0 * c0 / (a0 * b), 1.0 / 6.0) * std::pow(ra, 5.0 / 12.0) : 0.0;
  return first + 0.5 * a0 * c2 * c2 * inv_ls * inv_ls * std::sqrt(ra);
}

std::vector<double> aligned_deltas(const Grid& g) {
  std::vector<double> out;
  for (int m = 1; 2 * m < g.n2; ++m) out.push_back(m * g.h2());
  return out;
}

ParameterChoice choose_parameters(const PhysicalParams& params, double b, double c0, double c2,
                                  double u0_w1r, const Grid& grid, bool strict) {
  if (!(b > 0.0 && b < 1.0)) throw ValidationError("invariant violated: 0 < b < 1");
  if (!(c0 >= 0.0) || !(c2 > 0.0)) throw ValidationError("invariant violated: c0 >= 0, c2 > 0");
  if (!(u0_w1r >= 0.0)) throw ValidationError("invariant violated: u0_w1r >= 0");
  if (strict) require_five_twelfths_regime(params);

  const double ra = params.ra;
  ParameterChoice pc;
  const double ratio = u0_w1r > 0.0 ? ra * ra / (u0_w1r * u0_w1r) : 1.0;
  pc.a0 = b / (100.0 * c2 * c2) * std::min(1.0, ratio);
  BoundParams& bp = pc.bp;
  bp.b = b;
  bp.c0 = c0;
  bp.c2 = c2;
  bp.u0_w1r = u0_w1r;
  bp.a = pc.a0 * std::pow(ra, -1.5);
  bp.eps = bp.a;
  bp.m = params.ls.is_infinite() ? 0.0 : bp.a * c2 * c2 / (2.0 * params.ls.value() * params.ls.value());
  pc.delta_formula = c0 > 0.0 ? std::pow(pc.a0 * b / (4.0 * c0), 1.0 / 6.0) * std::pow(ra, -5.0 / 12.0)
                              : std::numeric_limits<double>::infinity();

  // Largest grid-aligned delta not above the formula, so the c0 delta^6 / a
  // term never grows by rounding; at least one grid cell.
  const double h = grid.h2();
  const int m_max = (grid.n2 - 1) / 2;
  int m = std::isfinite(pc.delta_formula) ? static_cast<int>(std::floor(pc.delta_formula / h + 1e-9)) : m_max;
  if (m > m_max) {
    m = m_max;
    pc.delta_clamped = true;
  }
  m = std::max(m, 1);
  pc.profile = make_profile(m * h, grid);
  bp.delta = pc.profile.delta;
  pc.nu_bound_asymptotic = asymptotic_bound(params, pc.a0, b, c0, c2);
  return pc;
}

// ---------------------------------------------------------------------------
// Calibration

double lemma_a_slack(const DiagnosticsRecord& d, const BackgroundProfile& prof, double c0, double eps) {
  const double d6 = std::pow(prof.delta, 6);
  return 0.5 * grad2_theta_sq(d, prof) + c0 * d6 / eps * d.omega_sq + 0.25 * eps * d.d1_omega_sq -
         std::abs(cross_term(d, prof));
}

double lemma_b_slack(const DiagnosticsRecord& d, const BackgroundProfile& prof, double c0, double eps) {
  const double d4 = std::pow(prof.delta, 4);
  return 0.5 * grad2_theta_sq(d, prof) + c0 * d4 * std::pow(eps, -2.0 / 3.0) * d.omega_sq +
         0.25 * eps * eps * d.d11_omega_sq - std::abs(cross_term(d, prof));
}

Calibration calibrate_constants(std::span<const DiagnosticsRecord> data, const Grid& grid,
                                const PhysicalParams& params, std::span<const double> deltas,
                                std::span<const double> eps_grid, double u0_w1r) {
  if (data.empty()) throw std::invalid_argument("calibrate_constants: no data");
  Calibration c;
  std::vector<BackgroundProfile> profiles;
  for (double dl : deltas) profiles.push_back(make_profile(dl, grid));

  const double inv_ls = params.ls.reciprocal();
  const double inv_pr = params.pr.reciprocal();
  for (const auto& d : data) {
    c.c2_pressure = std::max(c.c2_pressure, pressure_bound_ratio(d, params));
    if (d.lap_omega_sq > 0.0) c.c_lap = std::max(c.c_lap, d.d11_omega_sq / d.lap_omega_sq);
    if (!params.ls.is_infinite()) {
      const double d1w = std::sqrt(d.d1_omega_sq);
      const double w = std::sqrt(d.omega_sq);
      const double scale = d1w * (d1w * inv_ls + params.ra + (u0_w1r + params.ra) * w * inv_pr);
      if (scale > 0.0)
        c.c2_wall = std::max(c.c2_wall, std::abs(d.wall_p_du1_bottom + d.wall_p_du1_top) / scale);
    }
    if (!(d.omega_sq > 0.0)) continue;
    ++c.used;
    for (const auto& prof : profiles) {
      const double cross = std::abs(cross_term(d, prof));
      const double g2 = 0.5 * grad2_theta_sq(d, prof);
      for (double eps : eps_grid) {
        const double na = cross - g2 - 0.25 * eps * d.d1_omega_sq;
        if (na > 0.0) {
          const double v = na * eps / (std::pow(prof.delta, 6) * d.omega_sq);
          if (v > c.c0_a) {
            c.c0_a = v;
            c.c0_a_delta = prof.delta;
            c.c0_a_eps = eps;
          }
        }
        const double nb = cross - g2 - 0.25 * eps * eps * d.d11_omega_sq;
        if (nb > 0.0) {
          const double v = nb * std::pow(eps, 2.0 / 3.0) / (std::pow(prof.delta, 4) * d.omega_sq);
          if (v > c.c0_b) {
            c.c0_b = v;
            c.c0_b_delta = prof.delta;
            c.c0_b_eps = eps;
          }
        }
      }
    }
  }
  c.c2 = std::max(c.c2_pressure, c.c2_wall);
  c.degenerate = c.used == 0;
  return c;
}

// ---------------------------------------------------------------------------
// Certificates

namespace {

struct Term {
  const char* name;
  double value;
};

std::string most_negative(std::initializer_list<Term> terms) {
  const Term* worst = nullptr;
  for (const auto& t : terms)
    if (t.value < 0.0 && (!worst || t.value < worst->value)) worst = &t;
  return worst ? worst->name : "";
}

std::string q_violator(const QBreakdown& q) {
  return most_negative({{"m_ra2", q.m_ra2},
                        {"grad1_theta", q.grad1_theta},
                        {"grad2_theta", q.grad2_theta},
                        {"cross", q.cross},
                        {"b_enstrophy", q.b_enstrophy},
                        {"b_wall", q.b_wall},
                        {"a_grad_omega", q.a_grad_omega},
                        {"a_wall_pressure", q.a_wall_pressure},
                        {"a_cross", q.a_cross}});
}

void finish(CertificateReport& r, const DiagnosticsRecord& avg, double one_over_2delta, double m_ra2) {
  const double b = r.bp.b;
  r.nu = avg.nu_grad;
  r.nu_flux = avg.nu_flux;
  r.nu_identity = (one_over_2delta + m_ra2 - r.q.total - b) / (1.0 - b);
  r.nu_bound_implied = (one_over_2delta + m_ra2 - b) / (1.0 - b);
  r.closure_defect = (1.0 - b) * avg.nu_grad + b - (one_over_2delta + m_ra2 - r.q.total);
  r.q_nonnegative = r.q.total >= 0.0;
  r.below_implied = r.nu_flux <= r.nu_bound_implied;
  r.below_asymptotic = r.nu_bound_asymptotic > 0.0 && r.nu_flux <= r.nu_bound_asymptotic;
  r.certified = r.q_nonnegative && r.coefficients_positive;
  if (!r.q_nonnegative) r.violating_term = "Q:" + q_violator(r.q);
}

}  // namespace

CertificateReport certify(const DiagnosticsRecord& avg, const BoundParams& bp, const BackgroundProfile& prof,
                          const PhysicalParams& params, double nu_bound_asymptotic) {
  CertificateReport r;
  r.bp = bp;
  r.bp.delta = prof.delta;
  r.q = q_functional(avg, prof, r.bp, params);
  r.nu_bound_asymptotic = nu_bound_asymptotic;

  const double ra = params.ra;
  const double a = bp.a;
  const double inv_ls2 = params.ls.reciprocal() * params.ls.reciprocal();
  const double inv_pr2 = params.pr.reciprocal() * params.pr.reciprocal();
  const double c22 = bp.c2 * bp.c2;
  const double t_b = bp.b / ra;
  const double t_young = -0.5 * a * a * ra * ra;
  const double t_u0 = -0.5 * a * c22 * bp.u0_w1r * bp.u0_w1r * inv_ls2 * inv_pr2;
  const double t_ra = -0.5 * a * c22 * ra * ra * inv_ls2 * inv_pr2;
  const double t_c0 = a > 0.0 ? -2.0 * bp.c0 * std::pow(prof.delta, 6) / a : -std::numeric_limits<double>::infinity();
  r.coeff_a = t_b + t_young + t_u0 + t_ra + t_c0;
  r.coeff_grad_omega = a * (0.25 - bp.c2 * inv_ls2);
  r.coefficients_positive = r.coeff_a > 0.0 && r.coeff_grad_omega > 0.0;
  r.ls_threshold = 2.0 * std::sqrt(bp.c2);

  finish(r, avg, 1.0 / (2.0 * prof.delta), bp.m * ra * ra);
  if (r.coeff_a <= 0.0 && r.violating_term.empty())
    r.violating_term = "A:" + most_negative({{"a^2 Ra^2/2", t_young},
                                             {"a c2^2 u0^2/(2 Ls^2 Pr^2)", t_u0},
                                             {"a c2^2 Ra^2/(2 Ls^2 Pr^2)", t_ra},
                                             {"2 c0 delta^6/a", t_c0}});
  else if (r.coeff_grad_omega <= 0.0 && r.violating_term.empty())
    r.violating_term = "grad_omega: c2/Ls^2 >= 1/4";
  return r;
}

CertificateReport certify_infinite_pr(const DiagnosticsRecord& avg, const PhysicalParams& params,
                                      const Grid& grid, double b, double c0_b, double c_lap) {
  if (!(b > 0.0 && b < 1.0)) throw ValidationError("invariant violated: 0 < b < 1");
  const double ra = params.ra;
  CertificateReport r;
  r.label = "empirical certificate at finite horizon (Pr = inf, lemma part b)";
  BoundParams& bp = r.bp;
  bp.b = b;
  bp.c0 = c0_b;
  bp.c2 = c_lap;
  bp.a = 0.0;
  bp.m = 0.0;
  bp.eps = c_lap > 0.0 ? 1.0 / (std::sqrt(c_lap) * ra) : 1.0 / ra;
  const double formula = c0_b > 0.0 ? std::pow(b * std::pow(bp.eps, 2.0 / 3.0) / (2.0 * c0_b * ra), 0.25)
                                    : std::numeric_limits<double>::infinity();
  const double h = grid.h2();
  const int m_max = (grid.n2 - 1) / 2;
  int m = std::isfinite(formula) ? static_cast<int>(std::floor(formula / h + 1e-9)) : m_max;
  r.delta_formula = formula;
  r.delta_clamped = m > m_max;
  m = std::clamp(m, 1, m_max);
  const BackgroundProfile prof = make_profile(m * h, grid);
  bp.delta = prof.delta;
  r.q = q_functional(avg, prof, bp, params);

  const double t_c0 = -c0_b * std::pow(prof.delta, 4) * std::pow(bp.eps, -2.0 / 3.0);
  r.coeff_a = b / ra + t_c0;
  // <|d1 theta|^2> = <|lap omega|^2>/Ra^2 >= <|d1^2 omega|^2>/(C Ra^2).
  r.coeff_grad_omega = c_lap > 0.0 ? 1.0 / (c_lap * ra * ra) - 0.25 * bp.eps * bp.eps : 0.0;
  r.coefficients_positive = r.coeff_a > 0.0 && r.coeff_grad_omega > 0.0;
  r.nu_bound_asymptotic = c0_b > 0.0 ? 0.5 / formula : 0.0;
  finish(r, avg, 1.0 / (2.0 * prof.delta), 0.0);
  if (r.coeff_a <= 0.0 && r.violating_term.empty()) r.violating_term = "A:c0 delta^4 eps^{-2/3}";
  return r;
}

DcBoundReport dc_bound_check(const DiagnosticsRecord& avg, double delta, const PhysicalParams& params) {
  DcBoundReport r;
  r.nu = avg.nu_flux;
  r.delta = delta;
  const double ra = params.ra;
  const auto rhs = [&](double d) {
    return 1.0 / (2.0 * d) + 2.0 * d * std::sqrt(r.nu) * std::sqrt(std::max(r.nu - 1.0, 0.0) * ra);
  };
  r.rhs = rhs(delta);
  r.delta_star = 0.5 / (std::sqrt(r.nu) * std::pow(ra, 0.25));
  r.rhs_star = rhs(r.delta_star);
  r.holds = r.nu <= r.rhs;
  r.holds_star = r.nu <= r.rhs_star;
  return r;
}

// ---------------------------------------------------------------------------

nlohmann::json to_json(const QBreakdown& q) {
  return {{"m_ra2", q.m_ra2},         {"grad1_theta", q.grad1_theta},
          {"grad2_theta", q.grad2_theta}, {"cross", q.cross},
          {"b_enstrophy", q.b_enstrophy}, {"b_wall", q.b_wall},
          {"a_grad_omega", q.a_grad_omega}, {"a_wall_pressure", q.a_wall_pressure},
          {"a_cross", q.a_cross},     {"total", q.total}};
}

nlohmann::json to_json(const BoundParams& b) {
  return {{"a", b.a},   {"b", b.b},   {"m", b.m},   {"delta", b.delta},
          {"eps", b.eps}, {"c0", b.c0}, {"c2", b.c2}, {"u0_w1r", b.u0_w1r}};
}

nlohmann::json to_json(const Calibration& c) {
  return {{"c0_a", c.c0_a},
          {"c0_b", c.c0_b},
          {"c2", c.c2},
          {"c2_pressure", c.c2_pressure},
          {"c2_wall", c.c2_wall},
          {"c_lap", c.c_lap},
          {"used", c.used},
          {"degenerate", c.degenerate},
          {"c0_a_delta", c.c0_a_delta},
          {"c0_a_eps", c.c0_a_eps},
          {"c0_b_delta", c.c0_b_delta},
          {"c0_b_eps", c.c0_b_eps}};
}

nlohmann::json to_json(const CertificateReport& r) {
  return {{"label", r.label},
          {"params", to_json(r.bp)},
          {"q", to_json(r.q)},
          {"coeff_a", r.coeff_a},
          {"coeff_grad_omega", r.coeff_grad_omega},
          {"nu", r.nu},
          {"nu_flux", r.nu_flux},
          {"nu_identity", r.nu_identity},
          {"nu_bound_implied", r.nu_bound_implied},
          {"nu_bound_asymptotic", r.nu_bound_asymptotic},
          {"closure_defect", r.closure_defect},
          {"q_nonnegative", r.q_nonnegative},
          {"coefficients_positive", r.coefficients_positive},
          {"below_implied", r.below_implied},
          {"below_asymptotic", r.below_asymptotic},
          {"certified", r.certified},
          {"violating_term", r.violating_term},
          {"ls_threshold", r.ls_threshold}};
}

nlohmann::json to_json(const DcBoundReport& r) {
  return {{"nu", r.nu},         {"delta", r.delta},     {"rhs", r.rhs},
          {"delta_star", r.delta_star}, {"rhs_star", r.rhs_star}, {"holds", r.holds},
          {"holds_star", r.holds_star}};
}

}  // namespace slipconvect
