#pragma once

#include <optional>
#include <span>
#include <vector>

#include "slipconvect/config.hpp"
#include "slipconvect/field.hpp"

namespace slipconvect {

/// Thomas algorithm for a real tridiagonal matrix and complex right-hand
/// side, solved in place. sub[0] and sup[n-1] are ignored. Throws
/// SolverError on a zero pivot.
void solve_tridiagonal(std::span<const double> sub, std::span<const double> diag,
                       std::span<const double> sup, std::span<Complex> rhs);

enum class WallKind { dirichlet, neumann, robin };

/// One wall's closure for f'' - (k'^2 + sigma) f = rhs, per Fourier mode:
///   dirichlet: f = data
///   neumann:   d2 f = data
///   robin:     d2 f = robin * f + data
/// An empty data trace means homogeneous data.
struct WallCondition {
  WallKind kind = WallKind::dirichlet;
  double robin = 0.0;
  WallTrace data;

  static WallCondition dirichlet(WallTrace data = {}) { return {WallKind::dirichlet, 0.0, std::move(data)}; }
  static WallCondition neumann(WallTrace data = {}) { return {WallKind::neumann, 0.0, std::move(data)}; }
  static WallCondition robin_condition(double coeff, WallTrace data = {}) {
    return {WallKind::robin, coeff, std::move(data)};
  }
  Complex value(int k) const { return data.empty() ? Complex{} : data[k]; }
};

struct BoundaryConditions {
  WallCondition bottom;
  WallCondition top;
};

/// Navier-slip closure for the tangential velocity u1:
/// d2 u1 = u1/Ls at x2 = 0 and -d2 u1 = u1/Ls at x2 = 1; Neumann for Ls = inf.
BoundaryConditions navier_slip(const ExtendedReal& ls);

/// Solves one mode's column in place (rhs -> solution). Ghost points at
/// Neumann/Robin walls are eliminated with second-order centered closures.
/// The singular pure-Neumann k = 0, sigma = 0 case is solved up to its
/// constant (zero trapezoid mean) after a compatibility check.
void helmholtz_solve_mode(const Grid& g, int k, double sigma, const BoundaryConditions& bc,
                          std::span<Complex> column);

/// f with f'' - (k'^2 + sigma) f = rhs for every mode.
ScalarField helmholtz_solve(const ScalarField& rhs, double sigma, const BoundaryConditions& bc);

/// D2 f - k'^2 f with the same wall closures as helmholtz_solve (ghost values
/// from the boundary data); Dirichlet wall rows use one-sided differences.
void apply_helmholtz_mode(const Grid& g, int k, const BoundaryConditions& bc,
                          std::span<const Complex> f, std::span<Complex> out);

struct VelocityPair {
  ScalarField u1;
  ScalarField u2;
};

struct StreamSolution {
  ScalarField psi;
  VelocityPair vel;
};

/// Mean flow from the x1-mean vorticity: d2 u1 = -omega with the bottom
/// Navier-slip anchor u1(0) = -Ls omega(0); zero trapezoid mean for Ls = inf.
std::vector<double> mean_flow_from_vorticity(const Grid& g, std::span<const double> omega_mean,
                                             const ExtendedReal& ls);

/// psi'' - k'^2 psi = omega with psi = 0 on both walls for k != 0;
/// u1 = -d2 psi, u2 = d1 psi. The k = 0 velocity is the mean flow, either
/// supplied or recovered from the mean vorticity.
StreamSolution solve_streamfunction(const ScalarField& omega, const ExtendedReal& ls,
                                    std::optional<std::span<const double>> mean_flow = std::nullopt);

/// Single-mode version used by the wall-coupling iteration.
void solve_streamfunction_mode(const Grid& g, int k, std::span<const Complex> omega,
                               std::span<Complex> psi, std::span<Complex> u1,
                               std::span<Complex> u2);

struct PressureSolution {
  ScalarField p;
  /// Constant subtracted from the k = 0 right-hand side to satisfy the
  /// discrete divergence theorem.
  double projection = 0.0;
};

/// Pressure-Poisson solve:
///   lap p = -(1/Pr) grad u^T : grad u + Ra d2 T
///   d2 p = -(1/Ls) d1 u1 + Ra T   at x2 = 0
///   d2 p =  (1/Ls) d1 u1 + Ra T   at x2 = 1
/// Returned p has zero domain mean.
PressureSolution solve_pressure(Transform& tr, const VelocityPair& vel, const ScalarField& temperature,
                                const PhysicalParams& params);

}  // namespace slipconvect
