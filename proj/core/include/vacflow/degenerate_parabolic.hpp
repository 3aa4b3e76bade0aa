#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/SparseCore>

#include "vacflow/geometry.hpp"
#include "vacflow/kappa_solver.hpp"
#include "vacflow/vacuum_eos.hpp"

namespace vacflow {

/// Forcing G(t) as a nodal field; an empty function means G = 0.
using XForcing = std::function<ScalarField(double)>;

/// Frozen-coefficient problem
///   J^3 X_t / rho0 - 2 kappa [B^{jk} (1/rho0) (rho0 X),_k],_j = G,  X = 0 on Gamma.
struct XProblem {
  TensorField B;         ///< symmetric, B^{jk} = a^j_i a^k_i
  ScalarField Jcubed;
  ScalarField rho0;
  /// Closed-form rho0(x_v) used at staggered points; nodal averages otherwise.
  std::optional<AnalyticProfile> rho0_analytic;
  XForcing G;
  double kappa = 1.0;
  ScalarField X0;
};

/// B and J^3 frozen at `state`, rho0 taken from `profile`.
XProblem frozen_x_problem(const FlowState& state, const DensityProfile& profile, double kappa,
                          XForcing G, const ScalarField& X0);

enum class XMethod {
  finite_difference,
  /// 1-D only: Galerkin on the Dirichlet sine basis sqrt(2) sin(l pi x).
  galerkin,
};

struct XSolveOptions {
  XMethod method = XMethod::finite_difference;
  int galerkin_modes = 16;
  int quadrature_points = 96;
};

struct XSolution {
  std::vector<double> times;
  std::vector<ScalarField> X;
  std::vector<double> weighted_norm;  ///< ||X / sqrt(rho0)||_0 over interior nodes
  std::vector<double> gradient_norm;  ///< ||DX||_0
};

/// Semi-discrete system M X' + K X = F(t) on the interior nodes. M is diagonal
/// (J^3 times quadrature weights) and K is symmetric; unknowns are listed in
/// `nodes`.
struct XOperator {
  std::vector<std::size_t> nodes;
  Eigen::VectorXd mass;
  Eigen::SparseMatrix<double> stiffness;
};

/// Throws ValidationError if kappa <= 0, B is not uniformly positive definite,
/// X0 does not vanish on Gamma or the fields live on different grids.
void validate(const XProblem& problem);

/// Smallest nodal eigenvalue of B.
double min_eigenvalue(const TensorField& B);

XOperator assemble_x_operator(const XProblem& problem);

/// Implicit Euler in time with the rho0-weighted symmetric finite-difference
/// operator (or the Galerkin mode). dt is rounded down so that t_end is hit.
XSolution solve_x(const XProblem& problem, double dt, double t_end, const XSolveOptions& options = {});

/// X = rho0 J^{-3} J_t = rho0 J^{-2} div_eta v.
ScalarField x_from_flow(const FlowState& state, const DensityProfile& profile);

/// Residual of the nonlinear heat equation for X (gamma = 2) at every sample
/// of `samples`, measured as ||rho0 R||_0 over interior nodes. Time
/// derivatives use three-point formulas on neighboring samples.
std::vector<double> consistency_check(std::span<const FlowState> samples,
                                      const DensityProfile& profile, double kappa);
std::vector<double> consistency_check(const Trajectory& trajectory, const DensityProfile& profile,
                                      double kappa);

}  // namespace vacflow
