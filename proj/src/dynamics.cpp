#include "slipconvect/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "slipconvect/errors.hpp"

namespace slipconvect {

namespace {

constexpr int perturbation_modes = 4;

/// k = 0 vorticity implied by the mean flow, with the Navier-slip wall values.
void set_mean_vorticity(ScalarField& omega, std::span<const double> ubar, const ExtendedReal& ls,
                        double sign) {
  const Grid& g = omega.grid();
  const int n = g.n2;
  const double c = 0.5 / g.h2();
  for (int j = 1; j < n; ++j) omega(0, j) = -c * (ubar[j + 1] - ubar[j - 1]);
  const double inv = ls.reciprocal();
  omega(0, 0) = -sign * inv * ubar[0];
  omega(0, n) = sign * inv * ubar[n];
}

bool all_finite(const ScalarField& f) {
  return std::all_of(f.data().begin(), f.data().end(),
                     [](const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

double velocity_l2(const VelocityPair& v, double gamma) {
  return std::sqrt(gamma * (l2_norm_sq(v.u1) + l2_norm_sq(v.u2)));
}

const BoundaryConditions& dirichlet_homogeneous() {
  static const BoundaryConditions bc{WallCondition::dirichlet(), WallCondition::dirichlet()};
  return bc;
}

}  // namespace

struct Integrator::Explicit {
  ScalarField omega;
  ScalarField temp;
  std::vector<double> mean;
};

Integrator::Integrator(const PhysicalParams& params, const Grid& grid, StepperOptions opts)
    : params_(params), grid_(grid), opts_(opts), tr_(std::make_unique<Transform>(grid)) {
  if (!params_.pr.is_infinite() || params_.ls.is_infinite()) return;
  // u1 at both walls produced by unit wall vorticity (Laplace problem).
  const int np = grid_.points();
  const double inv = params_.ls.reciprocal();
  const double s = opts_.wall_vorticity_sign;
  influence_.resize(grid_.modes());
  std::vector<Complex> om(np), psi(np), u1(np), u2(np);
  for (int k = 1; k < grid_.modes(); ++k) {
    for (int wall = 0; wall < 2; ++wall) {
      BoundaryConditions bc = dirichlet_homogeneous();
      WallTrace data(grid_.modes());
      data[k] = 1.0;
      (wall == 0 ? bc.bottom : bc.top) = WallCondition::dirichlet(data);
      std::fill(om.begin(), om.end(), Complex{});
      helmholtz_solve_mode(grid_, k, 0.0, bc, om);
      solve_streamfunction_mode(grid_, k, om, psi, u1, u2);
      influence_[k].g[0][wall] = -s * inv * u1[0].real();
      influence_[k].g[1][wall] = s * inv * u1[np - 1].real();
    }
  }
}

void Integrator::build_slip_responses(double sigma) {
  const int np = grid_.points();
  const double inv = params_.ls.reciprocal();
  const double s = opts_.wall_vorticity_sign;
  slip_.assign(grid_.modes(), {});
  std::vector<Complex> psi(np), u1(np), u2(np);
  for (int k = 1; k < grid_.modes(); ++k) {
    for (int wall = 0; wall < 2; ++wall) {
      BoundaryConditions bc = dirichlet_homogeneous();
      WallTrace data(grid_.modes());
      data[k] = 1.0;
      (wall == 0 ? bc.bottom : bc.top) = WallCondition::dirichlet(data);
      std::vector<Complex>& om = slip_[k].phi[wall];
      om.assign(np, Complex{});
      helmholtz_solve_mode(grid_, k, sigma, bc, om);
      solve_streamfunction_mode(grid_, k, om, psi, u1, u2);
      slip_[k].w.g[0][wall] = -s * inv * u1[0].real();
      slip_[k].w.g[1][wall] = s * inv * u1[np - 1].real();
    }
  }
  slip_sigma_ = sigma;
}

void Integrator::refresh_velocity(SimState& s) const {
  s.vel = solve_streamfunction(s.omega, params_.ls, std::span<const double>(s.mean_flow)).vel;
}

double Integrator::max_velocity_rate(const SimState& s) const {
  const double a = max_abs(tr_->to_physical(s.vel.u1)) / grid_.h1();
  const double b = max_abs(tr_->to_physical(s.vel.u2)) / grid_.h2();
  return std::max(a, b);
}

double Integrator::advective_dt(const SimState& s, double cfl) const {
  const double rate = max_velocity_rate(s);
  return rate > 0.0 ? cfl / rate : std::numeric_limits<double>::infinity();
}

Integrator::Explicit Integrator::explicit_terms(const SimState& s) {
  const Grid& g = grid_;
  Explicit ex{ScalarField(g), ScalarField(g), std::vector<double>(g.points(), 0.0)};
  const bool finite_pr = !params_.pr.is_infinite();

  if (opts_.advection) {
    const PhysicalField u1 = tr_->to_physical(s.vel.u1);
    const PhysicalField u2 = tr_->to_physical(s.vel.u2);
    const PhysicalField t1 = tr_->to_physical(ddx1(s.temperature));
    const PhysicalField t2 = tr_->to_physical(ddx2(s.temperature));
    PhysicalField adv(g);
    for (std::size_t i = 0; i < adv.data().size(); ++i)
      adv.data()[i] = -(u1.data()[i] * t1.data()[i] + u2.data()[i] * t2.data()[i]);
    ex.temp = dealias(tr_->to_spectral(adv));

    if (finite_pr) {
      const PhysicalField w1 = tr_->to_physical(ddx1(s.omega));
      const PhysicalField w2 = tr_->to_physical(ddx2(s.omega));
      for (std::size_t i = 0; i < adv.data().size(); ++i)
        adv.data()[i] = -(u1.data()[i] * w1.data()[i] + u2.data()[i] * w2.data()[i]);
      ex.omega = dealias(tr_->to_spectral(adv));
      // Mean momentum: d_t u1_bar = Pr d2^2 u1_bar + mean(u2 omega).
      for (int j = 0; j < g.points(); ++j) ex.mean[j] = row_inner(s.vel.u2, s.omega, j);
    }
  }
  if (finite_pr && opts_.buoyancy) {
    ScalarField b = ddx1(s.temperature);
    b *= params_.pr.value() * params_.ra;
    ex.omega += b;
  }
  return ex;
}

void Integrator::advance_temperature(SimState& s, const ScalarField& nl_star, double dt) const {
  const Grid& g = grid_;
  const double sigma = 2.0 / dt;
  WallTrace hot(g.modes());
  hot[0] = 1.0;
  const BoundaryConditions bc{WallCondition::dirichlet(hot), WallCondition::dirichlet()};
  std::vector<Complex> lap(g.points());
  for (int k = 0; k < g.modes(); ++k) {
    auto col = s.temperature.mode(k);
    auto nl = nl_star.mode(k);
    apply_helmholtz_mode(g, k, bc, col, lap);
    for (int j = 0; j < g.points(); ++j) col[j] = -sigma * col[j] - lap[j] - 2.0 * nl[j];
    helmholtz_solve_mode(g, k, sigma, bc, col);
  }
}

void Integrator::update_history(SimState& s, Explicit&& ex, double dt) const {
  s.prev.valid = true;
  s.prev.dt = dt;
  s.prev.omega_nl = std::move(ex.omega);
  s.prev.temp_nl = std::move(ex.temp);
  s.prev.mean_nl = std::move(ex.mean);
}

void Integrator::step(SimState& s, double dt) {
  if (params_.pr.is_infinite())
    step_infinite_pr(s, dt);
  else
    step_finite_pr(s, dt);
}

void Integrator::step_finite_pr(SimState& s, double dt) {
  if (params_.pr.is_infinite()) throw std::logic_error("step_finite_pr: Pr is infinite");
  if (!(dt > 0.0)) throw SolverError("step: dt must be positive");
  if (dt * max_velocity_rate(s) > opts_.cfl_limit * (1.0 + 1e-12))
    throw SolverError("step: advective CFL violated (dt = " + std::to_string(dt) + ")");

  const Grid& g = grid_;
  const double pr = params_.pr.value();
  Explicit ex = explicit_terms(s);

  // Adams-Bashforth combination for a step ratio r = dt / dt_prev.
  ScalarField om_star = ex.omega, t_star = ex.temp;
  std::vector<double> mean_star = ex.mean;
  if (s.prev.valid) {
    const double r = dt / s.prev.dt;
    const double c0 = 1.0 + 0.5 * r, c1 = -0.5 * r;
    for (std::size_t i = 0; i < om_star.data().size(); ++i) {
      om_star.data()[i] = c0 * ex.omega.data()[i] + c1 * s.prev.omega_nl.data()[i];
      t_star.data()[i] = c0 * ex.temp.data()[i] + c1 * s.prev.temp_nl.data()[i];
    }
    for (std::size_t j = 0; j < mean_star.size(); ++j)
      mean_star[j] = c0 * ex.mean[j] + c1 * s.prev.mean_nl[j];
  }

  // Vorticity, k >= 1: CN. The Dirichlet wall data is either lagged or the
  // solution of the 2x2 wall system built from the unit responses.
  const double sigma = 2.0 / (pr * dt);
  const double inv_ls = params_.ls.reciprocal();
  const double sign = opts_.wall_vorticity_sign;
  const bool coupled = opts_.implicit_wall && inv_ls > 0.0;
  WallTrace wb(g.modes()), wt(g.modes());
  if (!coupled) {
    for (int k = 1; k < g.modes(); ++k) {
      wb[k] = -sign * inv_ls * s.vel.u1(k, 0);
      wt[k] = sign * inv_ls * s.vel.u1(k, g.n2);
    }
  } else if (sigma != slip_sigma_) {
    build_slip_responses(sigma);
  }
  const BoundaryConditions wall_bc{WallCondition::dirichlet(wb), WallCondition::dirichlet(wt)};
  std::vector<Complex> lap(g.points());
  std::vector<Complex> psi(g.points()), u1(g.points()), u2(g.points());
  for (int k = 1; k < g.modes(); ++k) {
    auto col = s.omega.mode(k);
    auto nl = om_star.mode(k);
    apply_helmholtz_mode(g, k, wall_bc, col, lap);
    for (int j = 0; j < g.points(); ++j) col[j] = -sigma * col[j] - lap[j] - (2.0 / pr) * nl[j];
    helmholtz_solve_mode(g, k, sigma, wall_bc, col);
    if (!coupled) continue;
    // w = G w + f with f the wall data implied by the homogeneous solution.
    solve_streamfunction_mode(g, k, col, psi, u1, u2);
    const Complex f0 = -sign * inv_ls * u1[0], f1 = sign * inv_ls * u1[g.n2];
    const auto& G = slip_[k].w.g;
    const double a = 1.0 - G[0][0], b = -G[0][1], c = -G[1][0], d = 1.0 - G[1][1];
    const double det = a * d - b * c;
    if (std::abs(det) < 1e-300) throw SolverError("wall coupling: singular influence matrix");
    const Complex w0 = (d * f0 - b * f1) / det, w1 = (-c * f0 + a * f1) / det;
    for (int j = 0; j < g.points(); ++j) col[j] += w0 * slip_[k].phi[0][j] + w1 * slip_[k].phi[1][j];
  }

  // Mean flow: CN with Robin walls.
  {
    const BoundaryConditions slip = navier_slip(params_.ls);
    std::vector<Complex> col(g.points()), cur(g.points());
    for (int j = 0; j < g.points(); ++j) cur[j] = s.mean_flow[j];
    apply_helmholtz_mode(g, 0, slip, cur, lap);
    for (int j = 0; j < g.points(); ++j)
      col[j] = -sigma * cur[j] - lap[j] - (2.0 / pr) * mean_star[j];
    helmholtz_solve_mode(g, 0, sigma, slip, col);
    for (int j = 0; j < g.points(); ++j) s.mean_flow[j] = col[j].real();
    set_mean_vorticity(s.omega, s.mean_flow, params_.ls, sign);
  }

  advance_temperature(s, t_star, dt);
  refresh_velocity(s);
  update_history(s, std::move(ex), dt);
  s.time += dt;
  ++s.step;
  check_state(s);
}

void Integrator::step_infinite_pr(SimState& s, double dt) {
  if (!params_.pr.is_infinite()) throw std::logic_error("step_infinite_pr: Pr is finite");
  if (!(dt > 0.0)) throw SolverError("step: dt must be positive");
  if (dt * max_velocity_rate(s) > opts_.cfl_limit * (1.0 + 1e-12))
    throw SolverError("step: advective CFL violated (dt = " + std::to_string(dt) + ")");

  Explicit ex = explicit_terms(s);
  ScalarField t_star = ex.temp;
  if (s.prev.valid) {
    const double r = dt / s.prev.dt;
    for (std::size_t i = 0; i < t_star.data().size(); ++i)
      t_star.data()[i] = (1.0 + 0.5 * r) * ex.temp.data()[i] - 0.5 * r * s.prev.temp_nl.data()[i];
  }
  advance_temperature(s, t_star, dt);
  solve_quasi_static(s);
  update_history(s, std::move(ex), dt);
  s.time += dt;
  ++s.step;
  check_state(s);
}

int Integrator::solve_quasi_static(SimState& s) {
  const Grid& g = grid_;
  const int n = g.n2;
  const int np = g.points();
  const double ra = params_.ra;
  const double inv_ls = params_.ls.reciprocal();
  const double sign = opts_.wall_vorticity_sign;
  const int nyq = g.n1 / 2;
  int worst = 0;

  std::fill(s.mean_flow.begin(), s.mean_flow.end(), 0.0);
  for (int j = 0; j < np; ++j) s.omega(0, j) = 0.0;

  std::vector<Complex> col(np), psi(np), u1(np), u2(np);
  for (int k = 1; k < g.modes(); ++k) {
    auto om = s.omega.mode(k);
    if (k == nyq) {
      std::fill(om.begin(), om.end(), Complex{});
      continue;
    }
    const Complex src = Complex(0.0, -ra * g.wavenumber(k));  // omega'' - k^2 omega = -Ra ik T
    Complex w[2] = {om[0], om[n]};
    const auto solve_with = [&](const Complex wb, const Complex wtop) {
      for (int j = 0; j < np; ++j) col[j] = src * s.temperature(k, j);
      WallTrace db(g.modes()), dt_(g.modes());
      db[k] = wb;
      dt_[k] = wtop;
      helmholtz_solve_mode(g, k, 0.0,
                           {WallCondition::dirichlet(std::move(db)), WallCondition::dirichlet(std::move(dt_))},
                           col);
      solve_streamfunction_mode(g, k, col, psi, u1, u2);
    };

    bool converged = false;
    int it = 0;
    for (; it < opts_.max_wall_iterations; ++it) {
      solve_with(w[0], w[1]);
      const Complex f[2] = {-sign * inv_ls * u1[0], sign * inv_ls * u1[n]};
      double scale = 1.0;
      for (int j = 0; j < np; ++j) scale = std::max(scale, std::abs(col[j]));
      const double res = std::max(std::abs(f[0] - w[0]), std::abs(f[1] - w[1]));
      if (res <= opts_.wall_tolerance * scale) {
        converged = true;
        break;
      }
      if (influence_.empty()) {
        w[0] = f[0];
        w[1] = f[1];
        continue;
      }
      // F(w) = G w + c is affine: jump to its fixed point (I - G) w = c.
      const auto& G = influence_[k].g;
      const Complex c0 = f[0] - (G[0][0] * w[0] + G[0][1] * w[1]);
      const Complex c1 = f[1] - (G[1][0] * w[0] + G[1][1] * w[1]);
      const double a = 1.0 - G[0][0], b = -G[0][1], c = -G[1][0], d = 1.0 - G[1][1];
      const double det = a * d - b * c;
      if (std::abs(det) < 1e-300) throw SolverError("wall coupling: singular influence matrix");
      w[0] = (d * c0 - b * c1) / det;
      w[1] = (-c * c0 + a * c1) / det;
    }
    if (!converged)
      throw SolverError("wall coupling did not converge for mode " + std::to_string(k) +
                        " after " + std::to_string(opts_.max_wall_iterations) + " iterations");
    std::copy(col.begin(), col.end(), om.begin());
    worst = std::max(worst, it + 1);
  }
  refresh_velocity(s);
  return worst;
}

double Integrator::quasi_static_residual(const SimState& s) const {
  const Grid& g = grid_;
  const double h = g.h2();
  const double ih2 = 1.0 / (h * h);
  double worst = 0.0;
  for (int k = 1; k < g.modes(); ++k) {
    if (k == g.n1 / 2) continue;
    const double kp = g.wavenumber(k);
    const Complex src(0.0, params_.ra * kp);
    double scale = 1.0, res = 0.0;
    for (int j = 1; j < g.n2; ++j) {
      const Complex f = src * s.temperature(k, j);
      const Complex r = ih2 * (s.omega(k, j + 1) - 2.0 * s.omega(k, j) + s.omega(k, j - 1)) -
                        kp * kp * s.omega(k, j) + f;
      scale = std::max(scale, std::abs(f));
      res = std::max(res, std::abs(r));
    }
    worst = std::max(worst, res / scale);
  }
  return worst;
}

double Integrator::wall_vorticity_residual(const SimState& s) const {
  const Grid& g = grid_;
  const double inv = params_.ls.reciprocal();
  double worst = 0.0;
  for (int k = 0; k < g.modes(); ++k) {
    worst = std::max(worst, std::abs(s.omega(k, 0) + inv * s.vel.u1(k, 0)));
    worst = std::max(worst, std::abs(s.omega(k, g.n2) - inv * s.vel.u1(k, g.n2)));
  }
  return worst;
}

void Integrator::check_state(SimState& s) {
  if (!all_finite(s.omega) || !all_finite(s.temperature))
    throw SolverError("blow-up: non-finite values at t = " + std::to_string(s.time));
  const double tmax = max_abs(tr_->to_physical(s.temperature));
  if (tmax > s.temp_bound + 1e-8)
    throw SolverError("maximum principle violated: max|T| = " + std::to_string(tmax) +
                      " at t = " + std::to_string(s.time));
  if (!params_.ls.is_infinite()) {
    const double bound = (s.u0_l2 + 3.0 * params_.gamma * std::max(1.0, params_.ls.value()) * params_.ra) *
                         (1.0 + opts_.energy_margin);
    const double u = velocity_l2(s.vel, params_.gamma);
    if (u > bound)
      throw SolverError("kinetic-energy bound breached: ||u|| = " + std::to_string(u) +
                        " > " + std::to_string(bound));
  }
}

// ---------------------------------------------------------------------------

InitRequest init_request(const RunConfig& cfg) {
  InitRequest r;
  switch (cfg.init.mode) {
    case InitMode::conduction: r.kind = InitKind::conduction; break;
    case InitMode::perturbed: r.kind = InitKind::perturbed; break;
    case InitMode::snapshot: r.kind = InitKind::snapshot; break;
  }
  r.amplitude = cfg.init.amplitude;
  r.seed = cfg.time.seed;
  r.snapshot = cfg.init.snapshot_path;
  return r;
}

namespace {

void record_initial_norms(SimState& s, Transform& tr, double gamma) {
  const PhysicalField t = tr.to_physical(s.temperature);
  const double tmax = max_abs(t);
  s.temp_bound = std::max(1.0, tmax);
  s.exceeds_unit_bound = tmax > 1.0;
  s.u0_l2 = velocity_l2(s.vel, gamma);
  const PhysicalField w = tr.to_physical(s.omega);
  s.omega0_l2 = lp_norm(w, 2.0);
  s.omega0_l4 = lp_norm(w, 4.0);
}

}  // namespace

SimState init_state(const PhysicalParams& params, const Grid& grid, const InitRequest& req) {
  if (req.kind == InitKind::snapshot) return from_snapshot(read_snapshot(req.snapshot), params, grid);
  if (!(req.amplitude >= 0.0)) throw ValidationError("invariant violated: amplitude >= 0");

  SimState s;
  s.omega = ScalarField(grid);
  s.temperature = ScalarField(grid);
  s.mean_flow.assign(grid.points(), 0.0);
  for (int j = 0; j < grid.points(); ++j) s.temperature(0, j) = 1.0 - grid.x2(j);

  if (req.kind == InitKind::perturbed && req.amplitude > 0.0) {
    std::mt19937_64 rng(req.seed);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    int kmax = std::min(perturbation_modes, grid.n1 / 2 - 1);
    if (grid.dealias) kmax = std::min(kmax, grid.dealias_cutoff());
    const int mmax = perturbation_modes;
    std::vector<double> a(kmax * mmax), b(kmax * mmax);
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = coef(rng);
      b[i] = coef(rng);
      total += std::abs(a[i]) + std::abs(b[i]);
    }
    // a cos + b sin has modulus <= |a| + |b|, so sup|theta| <= amplitude.
    const double scale = total > 0.0 ? req.amplitude / total : 0.0;
    for (int k = 1; k <= kmax; ++k)
      for (int m = 1; m <= mmax; ++m) {
        const std::size_t i = (k - 1) * mmax + (m - 1);
        const Complex c = 0.5 * scale * Complex(a[i], -b[i]);
        for (int j = 1; j < grid.n2; ++j)
          s.temperature(k, j) += c * std::sin(m * std::numbers::pi * grid.x2(j));
      }
  }

  Integrator integ(params, grid);
  if (params.pr.is_infinite())
    integ.solve_quasi_static(s);
  else
    integ.refresh_velocity(s);
  record_initial_norms(s, integ.transform(), params.gamma);
  return s;
}

Snapshot to_snapshot(const SimState& s) {
  const Grid& g = s.omega.grid();
  Snapshot snap;
  snap.n1 = static_cast<std::uint32_t>(g.n1);
  snap.n2 = static_cast<std::uint32_t>(g.n2);
  snap.gamma = g.gamma;
  snap.time = s.time;
  snap.add_field("omega", s.omega);
  snap.add_field("T", s.temperature);
  snap.add_values("u1mean", {s.mean_flow.begin(), s.mean_flow.end()});
  snap.add_values("meta", {static_cast<double>(s.step), s.temp_bound, s.u0_l2, s.omega0_l2,
                           s.omega0_l4, s.exceeds_unit_bound ? 1.0 : 0.0});
  if (s.prev.valid) {
    snap.add_values("history", {s.prev.dt});
    snap.add_field("omega_nl", s.prev.omega_nl);
    snap.add_field("T_nl", s.prev.temp_nl);
    snap.add_values("u1mean_nl", {s.prev.mean_nl.begin(), s.prev.mean_nl.end()});
  }
  return snap;
}

namespace {

std::vector<double> real_values(const Snapshot& snap, const std::string& name, std::size_t n) {
  const SnapshotBlock* b = snap.find(name);
  if (!b) throw ParseError("snapshot: missing block '" + name + "'");
  if (b->values.size() != n) throw ParseError("snapshot: block '" + name + "' has wrong length");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = b->values[i].real();
  return out;
}

}  // namespace

SimState from_snapshot(const Snapshot& snap, const PhysicalParams& params, const Grid& grid) {
  if (snap.n1 != static_cast<std::uint32_t>(grid.n1) || snap.n2 != static_cast<std::uint32_t>(grid.n2) ||
      snap.gamma != grid.gamma)
    throw ValidationError("snapshot grid mismatch: file has " + std::to_string(snap.n1) + "x" +
                          std::to_string(snap.n2 + 1) + ", config has " + std::to_string(grid.n1) +
                          "x" + std::to_string(grid.n2 + 1));
  SimState s;
  s.time = snap.time;
  s.omega = snap.field("omega", grid);
  s.temperature = snap.field("T", grid);
  if (snap.find("u1mean"))
    s.mean_flow = real_values(snap, "u1mean", grid.points());
  else
    s.mean_flow = mean_flow_from_vorticity(grid, mean_profile(s.omega), params.ls);

  for (int k = 0; k < grid.modes(); ++k) {
    const Complex want = k == 0 ? Complex(1.0) : Complex();
    if (std::abs(s.temperature(k, 0) - want) > 1e-12 || std::abs(s.temperature(k, grid.n2)) > 1e-12)
      throw ValidationError("snapshot: temperature wall values are not (1, 0)");
  }

  Integrator integ(params, grid);
  integ.refresh_velocity(s);
  if (snap.find("meta")) {
    const auto meta = real_values(snap, "meta", 6);
    s.step = static_cast<long>(meta[0]);
    s.temp_bound = meta[1];
    s.u0_l2 = meta[2];
    s.omega0_l2 = meta[3];
    s.omega0_l4 = meta[4];
    s.exceeds_unit_bound = meta[5] != 0.0;
  } else {
    record_initial_norms(s, integ.transform(), params.gamma);
  }
  if (snap.find("history")) {
    s.prev.valid = true;
    s.prev.dt = real_values(snap, "history", 1)[0];
    s.prev.omega_nl = snap.field("omega_nl", grid);
    s.prev.temp_nl = snap.field("T_nl", grid);
    s.prev.mean_nl = real_values(snap, "u1mean_nl", grid.points());
  }
  return s;
}

}  // namespace slipconvect
