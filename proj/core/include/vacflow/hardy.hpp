#pragma once

#include <functional>
#include <string>
#include <vector>

#include "vacflow/grid.hpp"
#include "vacflow/vacuum_eos.hpp"

namespace vacflow {

struct InequalityReport {
  double ratio = 0.0;
  double left = 0.0;
  double right = 0.0;
  /// Largest ratio seen (equal to ratio for a single evaluation).
  double constant_estimate = 0.0;
  /// Ratios on successively refined grids, coarsest first.
  std::vector<double> history;
  bool degenerate = false;
};

/// Weight used for the Hardy quotient u/d.
enum class DistanceKind {
  /// d = min(x_v, 1 - x_v).
  exact,
  /// sin(pi x_v)/pi: equal to d to third order at Gamma but smooth at x_v = 1/2,
  /// so that ||u/d||_2 stays bounded under refinement.
  smooth,
};

ScalarField distance_field(const DiscreteDomain& domain, DistanceKind kind);

/// ||u/d||_{s-1} / ||u||_s with u/d at Gamma from the one-sided derivative
/// quotient. Throws ValidationError if u does not vanish on Gamma or s is
/// outside [1, 3].
InequalityReport hardy_ratio(const ScalarField& u, int s, const DensityProfile& profile,
                             DistanceKind distance = DistanceKind::exact);

/// left = ||F||_0^{2(1-theta)} ||F||_1^{2 theta}, theta = 1 - p/2,
/// right = int d^p (F^2 + |DF|^2). p must be 1 or 2. F = 0 gives a degenerate
/// report with ratio 0.
InequalityReport weighted_embedding_ratio(const ScalarField& F, int p, const DensityProfile& profile);

/// Named test functions: "sine", "parabola", "smoothed_distance", "cubic",
/// "modulated" (horizontal modulation of the sine), "one", "zero",
/// "inverse_sqrt_distance" (clipped at the first interior layer).
ScalarField test_function(const std::string& name, const DiscreteDomain& domain);
std::vector<std::string> test_function_names();
/// Members of the corpus that vanish on Gamma.
std::vector<std::string> hardy_corpus();

/// Evaluates `ratio_on(domain)` on `levels` grids with n_vertical = (n0 - 1) 2^k + 1
/// (and n_horizontal doubled alongside) and collects the history.
InequalityReport refinement_history(int dim, int n_horizontal0, int n_vertical0, int levels,
                                    const std::function<InequalityReport(const DiscreteDomain&)>& ratio_on);

/// Relative spread (max - min) / min of a history.
double relative_spread(const std::vector<double>& history);

struct KellipticSolution {
  std::vector<double> times;
  std::vector<ScalarField> f;
  /// max over the evaluated g samples of max|g|.
  double g_sup = 0.0;
};

/// f + kappa f_t = g, nodewise, by the integrating-factor update
/// f^{n+1} = gbar + (f^n - gbar) exp(-dt/kappa), gbar = g(t^n + dt/2).
KellipticSolution kelliptic_solve(const ScalarField& f0, const std::function<ScalarField(double)>& g,
                                  double kappa, double dt, double t_end);

/// sup_t max|f(t)| / max(max|f0|, g_sup).
double kelliptic_bound_constant(const KellipticSolution& solution);

}  // namespace vacflow
