#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vacflow/diagnostics.hpp"
#include "vacflow/kappa_solver.hpp"
#include "vacflow/vacuum_eos.hpp"

namespace vacflow {

enum class InitialKind { zero, affine, gradient, rotation };

const char* to_string(InitialKind kind);
InitialKind initial_kind_from_string(const std::string& name);

/// Everything needed to reproduce a run. See docs/config.md for the INI schema.
struct RunConfig {
  struct Domain {
    int dim = 1;
    int n_horizontal = 16;
    int n_vertical = 65;
  } domain;
  struct Profile {
    ProfileKind kind = ProfileKind::parabolic;
    double c = 1.0;
    double width = 0.25;
    double degeneracy = 1.0;
  } profile;
  EosParams eos;
  struct Initial {
    InitialKind kind = InitialKind::zero;
    double amplitude = 0.0;
    double mollify_radius = 0.0;
  } initial;
  SolverConfig solver;
  struct Output {
    std::string directory = "out";
    std::string energy_csv = "energy.csv";
    int dump_stride = 0;
    std::string dump_prefix = "state";
  } output;
  struct Study {
    std::vector<double> kappas{1e-2, 5e-3, 2.5e-3};
    int levels = 3;
    std::uint64_t seed = 12345;
  } study;
};

/// Throws ValidationError on inconsistent values.
void validate(const RunConfig& config);

/// INI text with sections [domain] [profile] [eos] [initial] [solver]
/// [output] [study]. Unknown sections or keys are rejected.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);
/// Applies one "section.key=value" override.
void apply_override(RunConfig& config, const std::string& assignment);
std::string to_ini(const RunConfig& config);

DiscreteDomain make_domain(const RunConfig& config);
DensityProfile make_profile(const RunConfig& config, const DiscreteDomain& domain);
VectorField make_initial_velocity(const RunConfig& config, const DiscreteDomain& domain);
/// Profile and velocity after the optional mollification.
std::pair<DensityProfile, VectorField> make_initial_data(const RunConfig& config);

/// Reference solution eta = 1/2 + r(t)(x_v - 1/2) for rho0 = c x(1-x),
/// gamma = 2, with r'' = 4c/r^2 - 8 c kappa r'/r^3 (kappa = 0: compressible
/// Euler).
struct AffineReference {
  double c = 1.0;
  double kappa = 0.0;
  double dt_ref = 0.0;
  std::vector<double> times;
  std::vector<double> r;
  std::vector<double> rdot;

  /// (r, r') at t, one RK4 substep from the nearest earlier sample.
  std::pair<double, double> at(double t) const;
  /// r'^2/2 + 4c/r at sample k (conserved when kappa = 0).
  double first_integral(std::size_t k) const;
  double max_first_integral_drift() const;
  FlowState state(const DiscreteDomain& domain, double t) const;
  /// X = rho0 J^{-3} J_t = rho0 r' / r^3.
  ScalarField X(const DiscreteDomain& domain, double t) const;
};

/// Classical RK4 at step dt_ref. Throws ValidationError for c <= 0, r0 <= 0,
/// kappa < 0 or dt_ref <= 0, and AbortError if r reaches 0.
AffineReference affine_oracle(double c, double r0, double rdot0, double t_end, double dt_ref,
                              double kappa = 0.0);

struct StudyRow {
  double parameter = 0.0;
  std::vector<double> metrics;
  std::string status = "ok";
};

/// Rows follow the study order: decreasing kappa for sweeps, decreasing
/// spacing for refinement studies.
struct StudyResult {
  std::string name;
  std::string parameter_name;
  std::vector<std::string> metric_names;
  std::vector<StudyRow> rows;
  NamedValues fitted_orders;
  std::vector<std::string> notes;
};

/// Least-squares slope of log(error) against log(h). Non-positive or
/// non-finite errors are skipped; fewer than two usable points give NaN.
double fit_order(std::span<const double> h, std::span<const double> error);

/// Worker count: the flag if given, otherwise VACFLOW_THREADS, otherwise the
/// hardware concurrency. Always >= 1.
int resolve_threads(std::optional<int> flag = std::nullopt);

/// Runs body(i) for i in [0, n) on up to `threads` workers. The first
/// exception (lowest index) is rethrown after all workers finish.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

/// Runs `base` once per kappa with a common time step (the stable step of
/// the largest kappa at t = 0 unless base.solver.dt > 0) and reports
/// ||v_i - v_{i+1}||_0 at t_end. Needs >= 3 non-increasing kappas.
StudyResult kappa_sweep(const RunConfig& base, const std::vector<double>& kappas, int threads = 1);

/// Halves the spacing `levels` times (>= 3). Metrics: relative L2 error of
/// the 1-D affine benchmark (eta and v, max over stored samples), and the 3-D
/// Piola (L2) and curl-curl (L2 on 1/4 <= x_v <= 3/4, and full domain)
/// residuals of a smooth perturbed map.
StudyResult refinement_study(const RunConfig& base, int levels, int threads = 1);

/// Smooth flow map e + amplitude * phi with phi periodic horizontally.
VectorField smooth_test_map(const DiscreteDomain& domain, double amplitude = 0.05);
/// Smooth velocity field, periodic horizontally.
VectorField smooth_test_velocity(const DiscreteDomain& domain);

/// L2 norm over nodes with margin <= x_v <= 1 - margin.
double window_l2_norm(const VectorField& f, double margin);

struct IdentityCheck {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string detail;
};

/// Geometry suites on grids with n_vertical = n + 1 and n_horizontal = n:
/// Piola residual of an affine shear, cofactor identity, and observed orders
/// over n/2, n, 2n of the Piola residual (L2) and of the curl-curl residual
/// (L2 on 1/4 <= x_v <= 3/4; the full-domain order is reported alongside,
/// since the composed one-sided stencils are first order at Gamma). In 3-D
/// the fitted orders are pre-asymptotic below n = 16.
std::vector<IdentityCheck> check_identities(int dim, int n);

struct RunOutcome {
  Trajectory trajectory;
  DensityProfile profile;
  bool aborted = false;
  double abort_time = 0.0;
  std::string message;
  std::vector<std::string> written;
};

/// Runs the configured simulation. Aborts are captured (the partial
/// trajectory is kept). Outputs are written when `write_outputs` is set.
RunOutcome run_simulation(const RunConfig& config, bool write_outputs = true);

std::vector<std::string> energy_csv_header(const EnergyReport& sample);
void write_energy_csv(std::ostream& out, std::span<const EnergyReport> reports);
void write_study_csv(std::ostream& out, const StudyResult& study);

struct DumpData {
  std::string metadata_json;
  int dim = 0;
  int n_horizontal = 0;
  int n_vertical = 0;
  double time = 0.0;
  std::vector<std::string> field_names;
  std::vector<std::vector<double>> fields;
};

inline constexpr char kDumpMagic[9] = "VFDUMP01";

/// Binary snapshot: magic, uint64 LE metadata length, JSON metadata,
/// then each field as little-endian float64 in node order. Fields: eta_*,
/// v_*, rho0, J.
void write_dump(const std::string& path, const FlowState& state, const DensityProfile& profile,
                double kappa);
DumpData read_dump(const std::string& path);

}  // namespace vacflow
