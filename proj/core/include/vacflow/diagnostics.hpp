#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vacflow/geometry.hpp"
#include "vacflow/vacuum_eos.hpp"

namespace vacflow {

using NamedValues = std::vector<std::pair<std::string, double>>;

/// Energy functionals and structural residuals at one sample time.
///
/// E_components is the truncated higher-order energy (time levels a in
/// {0, 1}, spatial orders capped at 4). E_gamma_components is the general-gamma
/// variant without the extra high-time-derivative sum that appears for
/// gamma < 2 (it needs seven or more time derivatives).
struct EnergyReport {
  double t = 0.0;
  double physical_energy = 0.0;
  NamedValues E_components;
  double E_total = 0.0;
  NamedValues E_gamma_components;
  double E_gamma_total = 0.0;
  double curl_residual = 0.0;
  double piola_residual_max = 0.0;
  double J_min = 0.0;
  double J_max = 0.0;
};

struct EnergyOptions {
  /// 1: a = 0 only; 2: a in {0, 1}. Level 2 needs a window of >= 3 samples.
  int time_levels = 2;
  /// Cap on the spatial Sobolev order (the functional asks for up to 4).
  int max_spatial_order = 4;
  bool include_curl = true;
};

/// int [ rho0 |v|^2 / 2 + rho0^gamma J^{1-gamma} / (gamma - 1) ] dx.
double physical_energy(const FlowState& state, const DensityProfile& profile);

/// Report for sample `at` of `window`. Time derivatives use three-point
/// formulas on the samples nearest to `at` (one-sided at the ends).
/// Throws std::invalid_argument when time_levels = 2 and window.size() < 3.
EnergyReport energy_functional(std::span<const FlowState> window, std::size_t at,
                               const DensityProfile& profile, double kappa,
                               const EnergyOptions& options = {});

/// kappa = 0: ||curl_eta v_t||_0. kappa > 0: L2 norm of curl_eta v_t minus
/// the artificial-viscosity source
/// (gamma/(gamma-1)) kappa eps_{.ji} v^r,_s A^s_i [g,_l A^l_r],_m A^m_j,
/// g = (rho0 / J)^{gamma-1}. Needs >= 3 samples.
double curl_transport_residual(std::span<const FlowState> window, std::size_t at,
                               const DensityProfile& profile, double kappa);

/// ||curl_eta v||_0 at one state.
double vorticity_norm(const FlowState& state);

struct BoundaryTrace {
  double t = 0.0;
  std::vector<int> face;
  std::vector<Point> positions;        ///< eta on Gamma
  std::vector<double> normal_velocity; ///< v . n
};

BoundaryTrace boundary_trace(const FlowState& state);

/// Least constant C with E(t) <= M0 + C t E(t)^degree over the history,
/// M0 = E(t_0). A reporting aid only.
struct PolynomialBoundFit {
  int degree = 1;
  double M0 = 0.0;
  double C = 0.0;
};

PolynomialBoundFit fit_polynomial_bound(std::span<const double> times,
                                        std::span<const double> energies, int degree);

/// Three-point derivative weights at `t` for samples at t0, t1, t2.
std::array<double, 3> first_derivative_weights(double t0, double t1, double t2, double t);
std::array<double, 3> second_derivative_weights(double t0, double t1, double t2);

/// Indices of the three samples used around `at` in a window of size n >= 3.
std::array<std::size_t, 3> stencil_indices(std::size_t n, std::size_t at);

}  // namespace vacflow
