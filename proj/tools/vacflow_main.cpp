#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <fmt/ostream.h>

#include "vacflow/degenerate_parabolic.hpp"
#include "vacflow/errors.hpp"
#include "vacflow/hardy.hpp"
#include "vacflow/harness.hpp"

namespace {

using namespace vacflow;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitAbort = 2;
constexpr int kExitCheckFailed = 3;
constexpr int kExitUsage = 64;

struct ConfigArgs {
  std::string path;
  std::vector<std::string> overrides;
  std::optional<int> threads;
};

void add_config_options(CLI::App* cmd, ConfigArgs& args) {
  cmd->add_option("--config", args.path, "INI run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--set", args.overrides, "Override one entry, section.key=value (repeatable)");
  cmd->add_option("--threads", args.threads, "Worker threads (overrides VACFLOW_THREADS)")
      ->check(CLI::PositiveNumber);
}

RunConfig resolve_config(const ConfigArgs& args) {
  RunConfig config = args.path.empty() ? RunConfig{} : load_config(args.path);
  for (const std::string& o : args.overrides) apply_override(config, o);
  validate(config);
  return config;
}

std::string number(double x) { return fmt::format("{:.17g}", x); }

std::filesystem::path output_file(const RunConfig& config, const std::string& name) {
  const std::filesystem::path dir(config.output.directory);
  std::filesystem::create_directories(dir);
  return dir / name;
}

void print_study(const StudyResult& study) {
  fmt::print("{}", study.parameter_name);
  for (const std::string& m : study.metric_names) fmt::print("  {}", m);
  fmt::print("  status\n");
  for (const StudyRow& row : study.rows) {
    fmt::print("{:.6g}", row.parameter);
    for (double m : row.metrics) fmt::print("  {:.6e}", m);
    fmt::print("  {}\n", row.status);
  }
  for (const auto& [name, order] : study.fitted_orders) fmt::print("order {} = {:.4f}\n", name, order);
  for (const std::string& note : study.notes) fmt::print("note: {}\n", note);
}

int write_study(const RunConfig& config, const StudyResult& study, const std::string& name) {
  print_study(study);
  const auto path = output_file(config, name);
  std::ofstream f(path);
  if (!f) throw ValidationError("cannot write '" + path.string() + "'");
  write_study_csv(f, study);
  fmt::print("wrote {}\n", path.string());
  for (const StudyRow& row : study.rows) {
    if (row.status != "ok") return kExitAbort;
  }
  return kExitOk;
}

int cmd_run(const ConfigArgs& args) {
  const RunConfig config = resolve_config(args);
  const RunOutcome out = run_simulation(config, true);
  const Trajectory& tr = out.trajectory;
  fmt::print("steps {}  samples {}\n", tr.steps, tr.samples.size());
  if (!tr.reports.empty()) {
    const EnergyReport& first = tr.reports.front();
    const EnergyReport& last = tr.reports.back();
    fmt::print("t {:.6g}  physical_energy {:.10e} -> {:.10e}  E_total {:.6e} -> {:.6e}  J in [{:.6f}, {:.6f}]\n",
               last.t, first.physical_energy, last.physical_energy, first.E_total, last.E_total, last.J_min,
               last.J_max);
  }
  for (const std::string& p : out.written) fmt::print("wrote {}\n", p);
  if (out.aborted) {
    fmt::print(stderr, "aborted at t = {:.6g}: {}\n", out.abort_time, out.message);
    return kExitAbort;
  }
  return kExitOk;
}

int cmd_sweep(const ConfigArgs& args, std::vector<double> kappas) {
  const RunConfig config = resolve_config(args);
  if (kappas.empty()) kappas = config.study.kappas;
  const StudyResult study = kappa_sweep(config, kappas, resolve_threads(args.threads));
  return write_study(config, study, "sweep_kappa.csv");
}

int cmd_refine(const ConfigArgs& args, std::optional<int> levels) {
  const RunConfig config = resolve_config(args);
  const StudyResult study =
      refinement_study(config, levels.value_or(config.study.levels), resolve_threads(args.threads));
  return write_study(config, study, "refine.csv");
}

int cmd_identities(int dim, int n) {
  bool all = true;
  for (const IdentityCheck& c : check_identities(dim, n)) {
    fmt::print("{:<28} {:>12.4e}  threshold {:>10.3g}  {}  {}\n", c.name, c.value, c.threshold,
               c.pass ? "PASS" : "FAIL", c.detail);
    all = all && c.pass;
  }
  return all ? kExitOk : kExitCheckFailed;
}

struct HardyArgs {
  int dim = 1;
  int n = 33;
  int s = 1;
  int levels = 3;
  std::string function;
  std::string distance = "exact";
};

int cmd_hardy(const HardyArgs& a) {
  const DistanceKind kind = a.distance == "smooth" ? DistanceKind::smooth : DistanceKind::exact;
  if (a.distance != "smooth" && a.distance != "exact") {
    throw ValidationError("unknown distance '" + a.distance + "' (exact, smooth)");
  }
  const std::vector<std::string> names =
      a.function.empty() ? hardy_corpus() : std::vector<std::string>{a.function};
  const int nh = a.dim == 1 ? 1 : a.n - 1;
  for (const std::string& name : names) {
    const InequalityReport rep = refinement_history(a.dim, nh, a.n, a.levels, [&](const DiscreteDomain& dom) {
      ProfileParams params;
      const DensityProfile profile = density_profile(ProfileKind::parabolic, params, dom);
      return hardy_ratio(test_function(name, dom), a.s, profile, kind);
    });
    fmt::print("{:<18} s={}", name, a.s);
    for (double r : rep.history) fmt::print("  {:.6f}", r);
    fmt::print("  spread {:.3e}\n", relative_spread(rep.history));
  }
  return kExitOk;
}

struct XArgs {
  int n = 65;
  double kappa = 0.1;
  double dt = 1e-3;
  double t_end = 0.1;
  std::string method = "fd";
  int modes = 16;
  std::string out = "xsolve.csv";
};

int cmd_xsolve(const XArgs& a) {
  const DiscreteDomain dom = build_domain(1, 1, a.n);
  const DensityProfile profile = density_profile(ProfileKind::parabolic, ProfileParams{}, dom);
  const FlowState state = initial_state(VectorField(dom));
  const ScalarField X0 = ScalarField::from_function(dom, [](const Point& x) { return std::sin(M_PI * x[0]); });
  XSolveOptions options;
  if (a.method == "galerkin") {
    options.method = XMethod::galerkin;
  } else if (a.method != "fd") {
    throw ValidationError("unknown method '" + a.method + "' (fd, galerkin)");
  }
  options.galerkin_modes = a.modes;
  const XSolution sol = solve_x(frozen_x_problem(state, profile, a.kappa, {}, X0), a.dt, a.t_end, options);
  std::ofstream f(a.out);
  if (!f) throw ValidationError("cannot write '" + a.out + "'");
  f << "t,weighted_norm,gradient_norm\n";
  for (std::size_t k = 0; k < sol.times.size(); ++k) {
    f << number(sol.times[k]) << ',' << number(sol.weighted_norm[k]) << ',' << number(sol.gradient_norm[k]) << '\n';
  }
  fmt::print("steps {}  ||X/sqrt(rho0)||: {:.6e} -> {:.6e}\nwrote {}\n", sol.times.size() - 1,
             sol.weighted_norm.front(), sol.weighted_norm.back(), a.out);
  return kExitOk;
}

struct OracleArgs {
  double c = 1.0;
  double r0 = 1.0;
  double rdot0 = 0.0;
  double t_end = 0.2;
  double dt_ref = 1e-4;
  double kappa = 0.0;
  std::string out = "oracle.csv";
};

int cmd_oracle(const OracleArgs& a) {
  const AffineReference ref = affine_oracle(a.c, a.r0, a.rdot0, a.t_end, a.dt_ref, a.kappa);
  std::ofstream f(a.out);
  if (!f) throw ValidationError("cannot write '" + a.out + "'");
  f << "t,r,rdot,first_integral\n";
  for (std::size_t k = 0; k < ref.times.size(); ++k) {
    f << number(ref.times[k]) << ',' << number(ref.r[k]) << ',' << number(ref.rdot[k]) << ','
      << number(ref.first_integral(k)) << '\n';
  }
  fmt::print("r({:.6g}) = {:.12f}  first-integral drift {:.3e}\nwrote {}\n", ref.times.back(), ref.r.back(),
             ref.max_first_integral_drift(), a.out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lagrangian vacuum-boundary Euler kappa-problem simulator"};
  app.require_subcommand(1);

  ConfigArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Single simulation: energy CSV and grid dumps");
  add_config_options(run_cmd, run_args);

  ConfigArgs sweep_args;
  std::vector<double> kappas;
  auto* sweep_cmd = app.add_subcommand("sweep-kappa", "Kappa -> 0 Cauchy study");
  add_config_options(sweep_cmd, sweep_args);
  sweep_cmd->add_option("--kappas", kappas, "Decreasing kappa values (default: [study] kappas)")->delimiter(',');

  ConfigArgs refine_args;
  std::optional<int> levels;
  auto* refine_cmd = app.add_subcommand("refine", "Refinement study with fitted orders");
  add_config_options(refine_cmd, refine_args);
  refine_cmd->add_option("--levels", levels, "Number of grids (>= 3)");

  int id_dim = 3;
  int id_n = 16;
  auto* id_cmd = app.add_subcommand("check-identities", "Piola, cofactor and curl-curl suites");
  id_cmd->add_option("--dim", id_dim, "Dimension")->check(CLI::Range(1, 3));
  id_cmd->add_option("--n", id_n, "Base resolution (even, >= 8)");

  HardyArgs hardy_args;
  auto* hardy_cmd = app.add_subcommand("hardy", "Hardy ratios under refinement");
  hardy_cmd->add_option("--dim", hardy_args.dim, "Dimension")->check(CLI::Range(1, 3));
  hardy_cmd->add_option("--n", hardy_args.n, "Coarsest vertical node count");
  hardy_cmd->add_option("--s", hardy_args.s, "Sobolev order")->check(CLI::Range(1, 3));
  hardy_cmd->add_option("--levels", hardy_args.levels, "Refinement levels");
  hardy_cmd->add_option("--function", hardy_args.function, "Test function (default: corpus)");
  hardy_cmd->add_option("--distance", hardy_args.distance, "exact or smooth");

  XArgs x_args;
  auto* x_cmd = app.add_subcommand("xsolve", "Degenerate parabolic X-problem at the identity map (1-D)");
  x_cmd->add_option("--n", x_args.n, "Vertical node count");
  x_cmd->add_option("--kappa", x_args.kappa, "kappa > 0");
  x_cmd->add_option("--dt", x_args.dt, "Time step");
  x_cmd->add_option("--t-end", x_args.t_end, "Final time");
  x_cmd->add_option("--method", x_args.method, "fd or galerkin");
  x_cmd->add_option("--modes", x_args.modes, "Galerkin modes");
  x_cmd->add_option("--out", x_args.out, "Output CSV");

  OracleArgs o_args;
  auto* o_cmd = app.add_subcommand("oracle", "Affine reference trajectory r(t)");
  o_cmd->add_option("--c", o_args.c, "Profile constant c");
  o_cmd->add_option("--r0", o_args.r0, "r(0)");
  o_cmd->add_option("--rdot0", o_args.rdot0, "r'(0)");
  o_cmd->add_option("--t-end", o_args.t_end, "Final time");
  o_cmd->add_option("--dt-ref", o_args.dt_ref, "RK4 step");
  o_cmd->add_option("--kappa", o_args.kappa, "kappa >= 0");
  o_cmd->add_option("--out", o_args.out, "Output CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    fmt::print(stderr, "{}", app.help());
    return kExitUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run_args);
    if (*sweep_cmd) return cmd_sweep(sweep_args, kappas);
    if (*refine_cmd) return cmd_refine(refine_args, levels);
    if (*id_cmd) return cmd_identities(id_dim, id_n);
    if (*hardy_cmd) return cmd_hardy(hardy_args);
    if (*x_cmd) return cmd_xsolve(x_args);
    if (*o_cmd) return cmd_oracle(o_args);
  } catch (const ValidationError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitValidation;
  } catch (const AbortError& e) {
    fmt::print(stderr, "aborted at t = {:.6g}: {}\n", e.time(), e.what());
    return kExitAbort;
  }
  return kExitUsage;
}
