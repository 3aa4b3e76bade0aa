#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vacflow/diagnostics.hpp"
#include "vacflow/errors.hpp"
#include "vacflow/geometry.hpp"
#include "vacflow/vacuum_eos.hpp"

namespace vacflow {

/// How the momentum equation is evaluated away from the vacuum boundary.
enum class ForceForm {
  /// rho0 v_t + a^k_i (rho0^g J^-g),_k + kappa d_t[...] = 0 divided by rho0 at
  /// interior nodes; the divided form at the boundary nodes.
  conservative,
  /// v_t + g/(g-1) A^k_i (rho0^{g-1} J^{1-g}),_k + kappa d_t[...] = 0 everywhere.
  divided,
};

const char* to_string(ForceForm form);
ForceForm force_form_from_string(const std::string& name);

struct SolverConfig {
  double kappa = 0.0;
  double gamma = 2.0;
  /// Fixed step; 0 selects stable_dt every step.
  double dt = 0.0;
  double t_end = 0.1;
  double cfl_number = 0.4;
  int snapshot_stride = 1;
  ForceForm force_form = ForceForm::divided;
  /// Attach an EnergyReport to every stored sample.
  bool energy_reports = true;
  EnergyOptions energy_options{};
};

/// Throws ValidationError unless kappa >= 0, gamma > 1, cfl in (0, 1],
/// dt >= 0, t_end >= 0 and snapshot_stride >= 1.
void validate(const SolverConfig& config);

/// Stored samples (strictly increasing times, first at t = 0 with eta = e)
/// and one EnergyReport per sample when requested.
struct Trajectory {
  std::vector<FlowState> samples;
  std::vector<EnergyReport> reports;
  std::size_t steps = 0;
};

/// Abort raised by step/run; carries the trajectory up to the last good step.
class SolverAbort : public AbortError {
 public:
  SolverAbort(double time, const std::string& what, std::shared_ptr<const Trajectory> partial)
      : AbortError(time, what), partial_(std::move(partial)) {}

  const Trajectory* partial() const noexcept { return partial_.get(); }

 private:
  std::shared_ptr<const Trajectory> partial_;
};

/// w_i = a^k_i (rho0^gamma J^{-gamma}),_k. Throws AbortError if J <= 0.
VectorField force_field(const FlowState& state, const DensityProfile& profile);

/// Semi-discrete acceleration v_t of the kappa-problem. The artificial
/// viscosity term kappa d_t[...] is evaluated exactly along eta_t = v through
/// the cofactor and Jacobian rates.
VectorField acceleration(const FlowState& state, const DensityProfile& profile, double kappa,
                         ForceForm form = ForceForm::divided);

/// Explicit two-stage midpoint step of size dt. Throws AbortError when the
/// new state has J <= 0 or non-finite entries.
FlowState step(const FlowState& state, const DensityProfile& profile, const SolverConfig& config,
               double dt);

inline constexpr double kSoundSpeedFloor = 1e-12;
inline constexpr double kDiffusivityFloor = 1e-12;

/// cfl * min( dx / max(c, 1e-12), dx^2 / max(2 kappa c^2_max, 1e-12) ) with
/// c^2 = gamma (rho0/J)^{gamma-1} the pulled-back sound speed squared.
double stable_dt(const FlowState& state, const DensityProfile& profile, const SolverConfig& config);

/// Integrates from (e, u0) to t_end. Samples every snapshot_stride steps plus
/// the final state. Throws SolverAbort on a failed step.
Trajectory run(const VectorField& u0, const DensityProfile& profile, const SolverConfig& config);

/// Reports for every sample of a trajectory (time derivatives from
/// neighboring samples when at least three exist).
std::vector<EnergyReport> energy_reports(const std::vector<FlowState>& samples,
                                         const DensityProfile& profile, double kappa,
                                         const EnergyOptions& options);

}  // namespace vacflow
