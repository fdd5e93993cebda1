#include "slipconvect/elliptic.hpp"

#include <algorithm>
#include <cmath>

#include "slipconvect/errors.hpp"

namespace slipconvect {

void solve_tridiagonal(std::span<const double> sub, std::span<const double> diag,
                       std::span<const double> sup, std::span<Complex> rhs) {
  const std::size_t n = diag.size();
  std::vector<double> c(n);
  double beta = diag[0];
  if (beta == 0.0) throw SolverError("tridiagonal solve: zero pivot at row 0");
  rhs[0] /= beta;
  for (std::size_t i = 1; i < n; ++i) {
    c[i - 1] = sup[i - 1] / beta;
    beta = diag[i] - sub[i] * c[i - 1];
    if (beta == 0.0 || !std::isfinite(beta))
      throw SolverError("tridiagonal solve: zero pivot at row " + std::to_string(i));
    rhs[i] = (rhs[i] - sub[i] * rhs[i - 1]) / beta;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
}

BoundaryConditions navier_slip(const ExtendedReal& ls) {
  if (ls.is_infinite()) return {WallCondition::neumann(), WallCondition::neumann()};
  const double r = 1.0 / ls.value();
  return {WallCondition::robin_condition(r), WallCondition::robin_condition(-r)};
}

namespace {

bool is_pure_neumann_null(int k, double sigma, const BoundaryConditions& bc) {
  return k == 0 && sigma == 0.0 && bc.bottom.kind == WallKind::neumann &&
         bc.top.kind == WallKind::neumann;
}

}  // namespace

void helmholtz_solve_mode(const Grid& g, int k, double sigma, const BoundaryConditions& bc,
                          std::span<Complex> col) {
  const int n = g.n2;
  const int np = n + 1;
  const double h = g.h2();
  const double ih2 = 1.0 / (h * h);
  const double kk = g.wavenumber(k) * g.wavenumber(k);
  const double center = -2.0 * ih2 - kk - sigma;

  std::vector<double> sub(np, ih2), diag(np, center), sup(np, ih2);

  // Bottom wall. Ghost f_{-1} = f_1 - 2h (robin f_0 + g0).
  switch (bc.bottom.kind) {
    case WallKind::dirichlet:
      diag[0] = 1.0;
      sup[0] = 0.0;
      col[0] = bc.bottom.value(k);
      break;
    case WallKind::neumann:
    case WallKind::robin:
      sup[0] = 2.0 * ih2;
      diag[0] = center - 2.0 * bc.bottom.robin / h;
      col[0] += 2.0 * bc.bottom.value(k) / h;
      break;
  }
  // Top wall. Ghost f_{n+1} = f_{n-1} + 2h (robin f_n + g1).
  switch (bc.top.kind) {
    case WallKind::dirichlet:
      diag[n] = 1.0;
      sub[n] = 0.0;
      col[n] = bc.top.value(k);
      break;
    case WallKind::neumann:
    case WallKind::robin:
      sub[n] = 2.0 * ih2;
      diag[n] = center + 2.0 * bc.top.robin / h;
      col[n] -= 2.0 * bc.top.value(k) / h;
      break;
  }

  if (is_pure_neumann_null(k, sigma, bc)) {
    // Weighted row sum vanishes identically; the data must too.
    Complex defect = 0.0;
    double scale = 0.0;
    for (int j = 0; j < np; ++j) {
      const double w = (j == 0 || j == n) ? 0.5 * h : h;
      defect += w * col[j];
      scale += w * std::abs(col[j]);
    }
    if (std::abs(defect) > 1e-10 * std::max(scale, 1.0))
      throw SolvabilityError("Neumann problem incompatible: weighted residual " +
                             std::to_string(std::abs(defect)));
    // Pin f_0 = 0 (row 0 is implied by the others), then remove the mean.
    diag[0] = 1.0;
    sup[0] = 0.0;
    col[0] = 0.0;
    solve_tridiagonal(sub, diag, sup, col);
    Complex mean = 0.0;
    for (int j = 0; j < np; ++j) mean += ((j == 0 || j == n) ? 0.5 * h : h) * col[j];
    for (auto& v : col) v -= mean;
    return;
  }
  solve_tridiagonal(sub, diag, sup, col);
}

ScalarField helmholtz_solve(const ScalarField& rhs, double sigma, const BoundaryConditions& bc) {
  if (sigma < 0.0) throw std::invalid_argument("helmholtz_solve: sigma must be >= 0");
  ScalarField out = rhs;
  const Grid& g = rhs.grid();
  for (int k = 0; k < g.modes(); ++k) helmholtz_solve_mode(g, k, sigma, bc, out.mode(k));
  return out;
}

void apply_helmholtz_mode(const Grid& g, int k, const BoundaryConditions& bc,
                          std::span<const Complex> f, std::span<Complex> out) {
  const int n = g.n2;
  const double h = g.h2();
  const double ih2 = 1.0 / (h * h);
  const double kk = g.wavenumber(k) * g.wavenumber(k);
  for (int j = 1; j < n; ++j) out[j] = ih2 * (f[j + 1] - 2.0 * f[j] + f[j - 1]) - kk * f[j];

  if (bc.bottom.kind == WallKind::dirichlet) {
    out[0] = ih2 * (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) - kk * f[0];
  } else {
    const Complex ghost = f[1] - 2.0 * h * (bc.bottom.robin * f[0] + bc.bottom.value(k));
    out[0] = ih2 * (f[1] - 2.0 * f[0] + ghost) - kk * f[0];
  }
  if (bc.top.kind == WallKind::dirichlet) {
    out[n] = ih2 * (2.0 * f[n] - 5.0 * f[n - 1] + 4.0 * f[n - 2] - f[n - 3]) - kk * f[n];
  } else {
    const Complex ghost = f[n - 1] + 2.0 * h * (bc.top.robin * f[n] + bc.top.value(k));
    out[n] = ih2 * (ghost - 2.0 * f[n] + f[n - 1]) - kk * f[n];
  }
}

// ---------------------------------------------------------------------------

std::vector<double> mean_flow_from_vorticity(const Grid& g, std::span<const double> om,
                                             const ExtendedReal& ls) {
  const int n = g.n2;
  const double h = g.h2();
  std::vector<double> u(n + 1, 0.0);
  for (int j = 1; j <= n; ++j) u[j] = u[j - 1] - 0.5 * h * (om[j - 1] + om[j]);
  double shift = 0.0;
  if (ls.is_infinite()) {
    shift = -trapezoid(g, u);
  } else {
    shift = -ls.value() * om[0];
  }
  for (auto& v : u) v += shift;
  return u;
}

void solve_streamfunction_mode(const Grid& g, int k, std::span<const Complex> omega,
                               std::span<Complex> psi, std::span<Complex> u1,
                               std::span<Complex> u2) {
  const int n = g.n2;
  std::copy(omega.begin(), omega.end(), psi.begin());
  static const BoundaryConditions no_penetration{WallCondition::dirichlet(),
                                                 WallCondition::dirichlet()};
  helmholtz_solve_mode(g, k, 0.0, no_penetration, psi);
  const double c = 0.5 / g.h2();
  u1[0] = -c * (-3.0 * psi[0] + 4.0 * psi[1] - psi[2]);
  for (int j = 1; j < n; ++j) u1[j] = -c * (psi[j + 1] - psi[j - 1]);
  u1[n] = -c * (3.0 * psi[n] - 4.0 * psi[n - 1] + psi[n - 2]);
  const Complex ik(0.0, g.wavenumber(k));
  for (int j = 0; j <= n; ++j) u2[j] = ik * psi[j];
  u2[0] = 0.0;
  u2[n] = 0.0;
}

StreamSolution solve_streamfunction(const ScalarField& omega, const ExtendedReal& ls,
                                    std::optional<std::span<const double>> mean_flow) {
  const Grid& g = omega.grid();
  StreamSolution s{ScalarField(g), {ScalarField(g), ScalarField(g)}};
  const int nyq = g.n1 / 2;
  for (int k = 1; k < g.modes(); ++k) {
    if (k == nyq) continue;  // d1 of the Nyquist mode is not representable
    solve_streamfunction_mode(g, k, omega.mode(k), s.psi.mode(k), s.vel.u1.mode(k),
                              s.vel.u2.mode(k));
  }
  std::vector<double> ubar;
  if (mean_flow) {
    ubar.assign(mean_flow->begin(), mean_flow->end());
  } else {
    ubar = mean_flow_from_vorticity(g, mean_profile(omega), ls);
  }
  for (int j = 0; j < g.points(); ++j) s.vel.u1(0, j) = ubar[j];
  return s;
}

// ---------------------------------------------------------------------------

PressureSolution solve_pressure(Transform& tr, const VelocityPair& vel, const ScalarField& temperature,
                                const PhysicalParams& params) {
  const Grid& g = temperature.grid();
  const double ra = params.ra;
  ScalarField rhs = ddx2(temperature);
  rhs *= ra;

  if (!params.pr.is_infinite()) {
    const PhysicalField a = tr.to_physical(ddx1(vel.u1));
    const PhysicalField b = tr.to_physical(ddx2(vel.u1));
    const PhysicalField c = tr.to_physical(ddx1(vel.u2));
    const PhysicalField d = tr.to_physical(ddx2(vel.u2));
    PhysicalField q(g);
    for (std::size_t i = 0; i < q.data().size(); ++i) {
      const double du11 = a.data()[i], du12 = b.data()[i];
      const double du21 = c.data()[i], du22 = d.data()[i];
      q.data()[i] = du11 * du11 + 2.0 * du21 * du12 + du22 * du22;
    }
    ScalarField qs = dealias(tr.to_spectral(q));
    qs *= -1.0 / params.pr.value();
    rhs += qs;
  }

  const double inv_ls = params.ls.reciprocal();
  const WallTrace du1_bottom = wall_trace(ddx1(vel.u1), Wall::bottom);
  const WallTrace du1_top = wall_trace(ddx1(vel.u1), Wall::top);
  const WallTrace t_bottom = wall_trace(temperature, Wall::bottom);
  const WallTrace t_top = wall_trace(temperature, Wall::top);
  WallTrace g0(g.modes()), g1(g.modes());
  for (int k = 0; k < g.modes(); ++k) {
    g0[k] = -inv_ls * du1_bottom[k] + ra * t_bottom[k];
    g1[k] = inv_ls * du1_top[k] + ra * t_top[k];
  }

  PressureSolution out;
  // Discrete divergence theorem for k = 0: trapezoid(rhs) = g1 - g0.
  double trap = 0.0;
  for (int j = 0; j < g.points(); ++j) trap += g.weight(j) * rhs(0, j).real();
  out.projection = trap - (g1[0].real() - g0[0].real());
  for (int j = 0; j < g.points(); ++j) rhs(0, j) -= out.projection;
  for (int j = 0; j < g.points(); ++j) rhs(0, j).imag(0.0);

  const BoundaryConditions bc{WallCondition::neumann(g0), WallCondition::neumann(g1)};
  out.p = helmholtz_solve(rhs, 0.0, bc);
  return out;
}

}  // namespace slipconvect
