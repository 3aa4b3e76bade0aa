#include "vacflow/kappa_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace vacflow {

const char* to_string(ForceForm form) {
  return form == ForceForm::conservative ? "conservative" : "divided";
}

ForceForm force_form_from_string(const std::string& name) {
  if (name == "conservative") return ForceForm::conservative;
  if (name == "divided") return ForceForm::divided;
  throw ValidationError("unknown force form '" + name + "'");
}

void validate(const SolverConfig& c) {
  if (!(c.kappa >= 0.0)) throw ValidationError("solver: kappa must be >= 0");
  if (!(c.gamma > 1.0)) throw ValidationError("solver: gamma must be > 1");
  if (!(c.cfl_number > 0.0 && c.cfl_number <= 1.0)) throw ValidationError("solver: cfl must be in (0, 1]");
  if (!(c.dt >= 0.0)) throw ValidationError("solver: dt must be >= 0 (0 = adaptive)");
  if (!(c.t_end >= 0.0)) throw ValidationError("solver: t_end must be >= 0");
  if (c.snapshot_stride < 1) throw ValidationError("solver: snapshot_stride must be >= 1");
}

namespace {

std::string describe_invalid(const GeometrySnapshot& snap, double time) {
  const DiscreteDomain& dom = snap.J.domain();
  std::size_t worst = 0;
  for (std::size_t k = 0; k < dom.size(); ++k) {
    if (std::isnan(snap.J[k])) {
      worst = k;
      break;
    }
    if (snap.J[k] < snap.J[worst]) worst = k;
  }
  const Point x = dom.coord(worst);
  std::ostringstream os;
  os << "flow map lost injectivity at t = " << time << ": J = " << snap.J[worst] << " at x = ("
     << x[0] << ", " << x[1] << ", " << x[2] << "); J range [" << snap.J_min << ", "
     << snap.J_max << "]";
  return os.str();
}

GeometrySnapshot checked_snapshot(const FlowState& state) {
  GeometrySnapshot snap = snapshot(state);
  if (!snap.valid) throw AbortError(state.time, describe_invalid(snap, state.time));
  return snap;
}

}  // namespace

VectorField force_field(const FlowState& state, const DensityProfile& profile) {
  const GeometrySnapshot snap = checked_snapshot(state);
  const DiscreteDomain& dom = state.eta.domain();
  const double gamma = profile.gamma;
  ScalarField P(dom);
  for (std::size_t k = 0; k < dom.size(); ++k) P[k] = std::pow(profile.rho0[k] / snap.J[k], gamma);
  const VectorField DP = gradient(P);
  VectorField w(dom);
  for (int i = 0; i < dom.dim(); ++i) {
    for (int k = 0; k < dom.dim(); ++k) w[i] += snap.a(k, i) * DP[k];
  }
  return w;
}

VectorField acceleration(const FlowState& state, const DensityProfile& profile, double kappa,
                         ForceForm form) {
  const GeometrySnapshot snap = checked_snapshot(state);
  const DiscreteDomain& dom = state.eta.domain();
  const int dim = dom.dim();
  const std::size_t N = dom.size();
  const double gamma = profile.gamma;
  const double ratio = gamma / (gamma - 1.0);
  const ScalarField& rho0 = profile.rho0;

  // Divided form: g = (rho0/J)^{gamma-1}.
  ScalarField g(dom);
  for (std::size_t k = 0; k < N; ++k) g[k] = std::pow(rho0[k] / snap.J[k], gamma - 1.0);
  const VectorField Dg = gradient(g);

  std::optional<TensorField> Adot;
  std::optional<VectorField> Dgt;
  std::optional<ScalarField> Jt;
  if (kappa > 0.0) {
    Jt = jacobian_rate(snap, state.v);
    Adot = inverse_rate(snap, state.v);
    ScalarField gt(dom);
    for (std::size_t k = 0; k < N; ++k) {
      gt[k] = (1.0 - gamma) * std::pow(rho0[k], gamma - 1.0) * std::pow(snap.J[k], -gamma) * (*Jt)[k];
    }
    Dgt = gradient(gt);
  }

  VectorField acc(dom);
  for (int i = 0; i < dim; ++i) {
    for (std::size_t n = 0; n < N; ++n) {
      double s = 0.0;
      for (int k = 0; k < dim; ++k) {
        s += snap.A(k, i)[n] * Dg[k][n];
        if (kappa > 0.0) s += kappa * ((*Adot)(k, i)[n] * Dg[k][n] + snap.A(k, i)[n] * (*Dgt)[k][n]);
      }
      acc[i][n] = -ratio * s;
    }
  }

  if (form == ForceForm::conservative) {
    ScalarField P(dom);
    for (std::size_t k = 0; k < N; ++k) P[k] = std::pow(rho0[k] / snap.J[k], gamma);
    const VectorField DP = gradient(P);
    std::optional<TensorField> adot;
    std::optional<VectorField> DPt;
    if (kappa > 0.0) {
      adot = cofactor_rate(snap, state.v);
      ScalarField Pt(dom);
      for (std::size_t k = 0; k < N; ++k) {
        Pt[k] = -gamma * std::pow(rho0[k], gamma) * std::pow(snap.J[k], -gamma - 1.0) * (*Jt)[k];
      }
      DPt = gradient(Pt);
    }
    for (std::size_t n = 0; n < N; ++n) {
      if (dom.on_boundary(n)) continue;
      for (int i = 0; i < dim; ++i) {
        double s = 0.0;
        for (int k = 0; k < dim; ++k) {
          s += snap.a(k, i)[n] * DP[k][n];
          if (kappa > 0.0) s += kappa * ((*adot)(k, i)[n] * DP[k][n] + snap.a(k, i)[n] * (*DPt)[k][n]);
        }
        acc[i][n] = -s / rho0[n];
      }
    }
  }
  return acc;
}

FlowState step(const FlowState& state, const DensityProfile& profile, const SolverConfig& config,
               double dt) {
  const double kappa = config.kappa;
  const VectorField k1 = acceleration(state, profile, kappa, config.force_form);

  FlowState mid;
  mid.eta = state.eta + state.v * (0.5 * dt);
  mid.v = state.v + k1 * (0.5 * dt);
  mid.time = state.time + 0.5 * dt;
  const VectorField k2 = acceleration(mid, profile, kappa, config.force_form);

  FlowState next;
  next.eta = state.eta + mid.v * dt;
  next.v = state.v + k2 * dt;
  next.time = state.time + dt;

  if (!next.eta.all_finite() || !next.v.all_finite()) {
    throw AbortError(next.time, "non-finite state after step ending at t = " + std::to_string(next.time));
  }
  const GeometrySnapshot snap = snapshot(next);
  if (!snap.valid) throw AbortError(next.time, describe_invalid(snap, next.time));
  return next;
}

double stable_dt(const FlowState& state, const DensityProfile& profile, const SolverConfig& config) {
  const GeometrySnapshot snap = checked_snapshot(state);
  const DiscreteDomain& dom = state.eta.domain();
  const double gamma = profile.gamma;
  double c2_max = 0.0;
  for (std::size_t k = 0; k < dom.size(); ++k) {
    c2_max = std::max(c2_max, gamma * std::pow(profile.rho0[k] / snap.J[k], gamma - 1.0));
  }
  const double dx = dom.min_spacing();
  const double wave = dx / std::max(std::sqrt(c2_max), kSoundSpeedFloor);
  const double diffusion = dx * dx / std::max(2.0 * config.kappa * c2_max, kDiffusivityFloor);
  return config.cfl_number * std::min(wave, diffusion);
}

std::vector<EnergyReport> energy_reports(const std::vector<FlowState>& samples,
                                         const DensityProfile& profile, double kappa,
                                         const EnergyOptions& options) {
  EnergyOptions opts = options;
  if (samples.size() < 3) opts.time_levels = 1;
  std::vector<EnergyReport> out;
  out.reserve(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k) {
    out.push_back(energy_functional(samples, k, profile, kappa, opts));
  }
  return out;
}

Trajectory run(const VectorField& u0, const DensityProfile& profile, const SolverConfig& config) {
  validate(config);
  if (std::abs(config.gamma - profile.gamma) > 1e-14) {
    throw ValidationError("run: solver gamma does not match the density profile gamma");
  }
  if (!u0.all_finite()) throw ValidationError("run: initial velocity has non-finite entries");
  if (!(u0.domain() == profile.domain())) throw ValidationError("run: u0 and rho0 live on different grids");

  Trajectory traj;
  FlowState state = initial_state(u0);
  traj.samples.push_back(state);

  const double tol = 1e-12 * std::max(1.0, config.t_end);
  bool last_stored = true;
  while (state.time < config.t_end - tol) {
    double dt = config.dt > 0.0 ? config.dt : stable_dt(state, profile, config);
    if (state.time + dt > config.t_end - tol) dt = config.t_end - state.time;
    try {
      state = step(state, profile, config, dt);
    } catch (const AbortError& e) {
      if (config.energy_reports) {
        traj.reports = energy_reports(traj.samples, profile, config.kappa, config.energy_options);
      }
      throw SolverAbort(e.time(), e.what(), std::make_shared<const Trajectory>(std::move(traj)));
    }
    ++traj.steps;
    last_stored = traj.steps % static_cast<std::size_t>(config.snapshot_stride) == 0;
    if (last_stored) traj.samples.push_back(state);
  }
  if (!last_stored) traj.samples.push_back(state);

  if (config.energy_reports) {
    traj.reports = energy_reports(traj.samples, profile, config.kappa, config.energy_options);
  }
  return traj;
}

}  // namespace vacflow
