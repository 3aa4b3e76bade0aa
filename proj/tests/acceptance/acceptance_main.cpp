#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "vacflow/degenerate_parabolic.hpp"
#include "vacflow/diagnostics.hpp"
#include "vacflow/errors.hpp"
#include "vacflow/hardy.hpp"
#include "vacflow/harness.hpp"

using namespace vacflow;

namespace {

struct Verdict {
  bool pass = true;
  std::vector<std::string> details;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    details.push_back(fmt::format("{} {}", ok ? "ok  " : "FAIL", what));
  }
  void note(const std::string& what) { details.push_back("     " + what); }
};

DensityProfile parabolic(const DiscreteDomain& dom, double gamma = 2.0) {
  ProfileParams params;
  params.gamma = gamma;
  return density_profile(ProfileKind::parabolic, params, dom);
}

double relative_l2(const VectorField& a, const VectorField& b) { return l2_norm(a - b) / l2_norm(b); }

Verdict geometry_identities() {
  Verdict v;
  for (int dim : {2, 3}) {
    for (const IdentityCheck& c : check_identities(dim, 16)) {
      v.require(c.pass, fmt::format("{}-D {} = {:.4e} (threshold {:.3g}) {}", dim, c.name, c.value, c.threshold, c.detail));
    }
  }
  return v;
}

Verdict affine_oracle_match() {
  Verdict v;
  const double t_end = 0.2;
  const AffineReference ref = affine_oracle(1.0, 1.0, 0.0, t_end, 1e-5);
  v.require(ref.max_first_integral_drift() <= 1e-10,
            fmt::format("oracle first-integral drift {:.3e} <= 1e-10", ref.max_first_integral_drift()));

  std::vector<double> hs, errors;
  for (int n : {65, 129, 257, 513}) {
    const DiscreteDomain dom = build_domain(1, 1, n);
    SolverConfig cfg;
    cfg.t_end = t_end;
    cfg.energy_reports = false;
    const Trajectory tr = run(VectorField(dom), parabolic(dom), cfg);
    double eta_err = 0.0;
    double v_err = 0.0;
    double v_scale = 0.0;
    for (const FlowState& s : tr.samples) {
      const FlowState exact = ref.state(dom, s.time);
      eta_err = std::max(eta_err, relative_l2(s.eta, exact.eta));
      v_err = std::max(v_err, l2_norm(s.v - exact.v));
      v_scale = std::max(v_scale, l2_norm(exact.v));
    }
    const FlowState last = ref.state(dom, tr.samples.back().time);
    const double disp_err = l2_norm(tr.samples.back().eta - last.eta) / l2_norm(displacement(last.eta));
    const double err = std::max(eta_err, v_err / v_scale);
    v.note(fmt::format("n = {:4d}  steps {:4d}  eta {:.4e}  v {:.4e}  displacement at t_end {:.4e}", n, tr.steps, eta_err,
                       v_err / v_scale, disp_err));
    hs.push_back(1.0 / (n - 1));
    errors.push_back(err);
  }
  v.require(errors.back() <= 1e-3, fmt::format("n = 513 relative L2 error {:.3e} <= 1e-3", errors.back()));
  const double order = fit_order(hs, errors);
  v.require(order >= 1.7 && order <= 2.3, fmt::format("fitted order {:.3f} in [1.7, 2.3]", order));
  return v;
}

RunConfig gradient_2d(int n, double kappa, double t_end) {
  RunConfig c;
  c.domain.dim = 2;
  c.domain.n_horizontal = n - 1;
  c.domain.n_vertical = n;
  c.initial.kind = InitialKind::gradient;
  c.initial.amplitude = 0.5;
  c.solver.kappa = kappa;
  c.solver.t_end = t_end;
  c.solver.energy_reports = false;
  return c;
}

RunConfig affine_1d(int n, double kappa, double t_end) {
  RunConfig c;
  c.domain.n_vertical = n;
  c.initial.kind = InitialKind::affine;
  c.initial.amplitude = 0.5;
  c.solver.kappa = kappa;
  c.solver.t_end = t_end;
  c.solver.energy_reports = false;
  return c;
}

Verdict conservation() {
  Verdict v;
  for (const RunConfig& base : {affine_1d(257, 0.0, 0.1), gradient_2d(65, 0.0, 0.1)}) {
    for (double kappa : {0.0, 1e-3, 1e-2}) {
      RunConfig c = base;
      c.solver.kappa = kappa;
      const RunOutcome o = run_simulation(c, false);
      const auto& S = o.trajectory.samples;
      const double E0 = physical_energy(S.front(), o.profile);
      double drift = 0.0;
      double worst_rise = -1e300;
      double band = 0.0;
      double prev = E0;
      for (std::size_t k = 0; k < S.size(); ++k) {
        const double E = physical_energy(S[k], o.profile);
        drift = std::max(drift, std::abs(E - E0) / E0);
        if (k > 0) {
          const double dt = S[k].time - S[k - 1].time;
          worst_rise = std::max(worst_rise, (E - prev) / E0);
          band = std::max(band, dt);
        }
        prev = E;
      }
      const std::string tag = fmt::format("{}-D n = {} kappa = {:g}", c.domain.dim, c.domain.n_vertical, kappa);
      if (o.aborted) {
        v.require(false, tag + " aborted: " + o.message);
      } else if (kappa == 0.0) {
        v.require(drift <= 1e-3, fmt::format("{}: relative drift {:.3e} <= 1e-3 over {} steps", tag, drift, o.trajectory.steps));
      } else {
        v.require(worst_rise <= 1e-3 * band,
                  fmt::format("{}: largest step-to-step rise {:.3e} E(0) <= 1e-3 dt_max = {:.3e} (total change {:.3e})",
                              tag, worst_rise, 1e-3 * band, (prev - E0) / E0));
      }
    }
  }
  return v;
}

Verdict vorticity_transport() {
  Verdict v;
  for (double kappa : {0.0, 1e-2}) {
    std::vector<double> hs, res, consts;
    for (int n : {17, 33, 65}) {
      const RunOutcome o = run_simulation(gradient_2d(n, kappa, 0.1), false);
      if (o.aborted) {
        v.require(false, "run aborted: " + o.message);
        return v;
      }
      const auto& S = o.trajectory.samples;
      double r = 0.0;
      for (std::size_t k = 0; k < S.size(); ++k) {
        r = std::max(r, kappa == 0.0 ? vorticity_norm(S[k]) : curl_transport_residual(S, k, o.profile, kappa));
      }
      const double h = 1.0 / (n - 1);
      hs.push_back(h);
      res.push_back(r);
      consts.push_back(r / (h * h));
      v.note(fmt::format("kappa = {:g} n = {:2d}: {} {:.4e}  C = {:.4f}", kappa, n,
                         kappa == 0.0 ? "max ||curl_eta v||" : "max vorticity-equation residual", r, r / (h * h)));
    }
    const double order = fit_order(hs, res);
    const double spread = *std::max_element(consts.begin(), consts.end()) / *std::min_element(consts.begin(), consts.end());
    v.require(order >= 1.8, fmt::format("kappa = {:g}: fitted order {:.3f} >= 1.8", kappa, order));
    v.require(spread <= 1.5, fmt::format("kappa = {:g}: C(h) max/min {:.3f} <= 1.5", kappa, spread));
  }
  return v;
}

Verdict kappa_cauchy() {
  Verdict v;
  const std::vector<double> kappas{1e-2, 5e-3, 2.5e-3, 1.25e-3};
  for (const RunConfig& base : {affine_1d(129, 0.0, 0.1), gradient_2d(33, 0.0, 0.1)}) {
    const StudyResult s = kappa_sweep(base, kappas, resolve_threads());
    std::vector<double> d;
    bool ok = true;
    for (const StudyRow& row : s.rows) {
      ok = ok && row.status == "ok";
      if (std::isfinite(row.metrics[0])) d.push_back(row.metrics[0]);
    }
    std::string line;
    for (double x : d) line += fmt::format(" {:.4e}", x);
    v.note(fmt::format("{}-D ||v_k - v_k+1||:{}", base.domain.dim, line));
    bool monotone = d.size() == kappas.size() - 1;
    for (std::size_t i = 1; i < d.size(); ++i) monotone = monotone && d[i] < d[i - 1];
    v.require(ok && monotone, fmt::format("{}-D differences decrease monotonically", base.domain.dim));
    const double ratio = d.back() / d[d.size() - 2];
    v.require(ratio <= 0.7, fmt::format("{}-D final ratio {:.3f} <= 0.7", base.domain.dim, ratio));
  }
  return v;
}

Verdict energy_boundedness() {
  Verdict v;
  for (double gamma : {2.0, 1.4, 3.0}) {
    RunConfig c = affine_1d(129, 0.0, 0.5);
    c.eos.gamma = gamma;
    c.solver.energy_reports = true;
    const RunOutcome o = run_simulation(c, false);
    const auto& R = o.trajectory.reports;
    const bool general = gamma != 2.0;
    const auto energy = [&](const EnergyReport& r) { return general ? r.E_gamma_total : r.E_total; };
    const double E0 = energy(R.front());
    double t_star = 0.0;
    double t_J = 0.0;
    for (const EnergyReport& r : R) {
      if (energy(r) > 2 * E0) break;
      t_star = r.t;
    }
    for (const EnergyReport& r : R) {
      if (r.J_min < 0.5 || r.J_max > 1.5) break;
      t_J = r.t;
    }
    const std::string name = general ? "E_gamma" : "E";
    v.note(fmt::format("gamma = {}: {}(0) = {:.4e}, {} samples to t = {:.3g}{}", gamma, name, E0, R.size(), R.back().t,
                       o.aborted ? " (aborted: " + o.message + ")" : ""));
    v.require(t_star > 0.0 && t_J > 0.0,
              fmt::format("gamma = {}: {}(t) <= 2 {}(0) up to T* = {:.4f}; J in [1/2, 3/2] up to T_J = {:.4f}", gamma,
                          name, name, t_star, t_J));
  }
  return v;
}

double mms_error(int dim, int n) {
  const double kappa = 0.1;
  const DiscreteDomain dom = build_domain(dim, 8, n);
  const int ax = dom.vertical_axis();
  const auto exact = [&](double t) {
    return ScalarField::from_function(dom, [&](const Point& x) { return std::exp(-t) * x[ax] * (1 - x[ax]); });
  };
  // Residual of exp(-t) x(1-x) in J^3 X_t / rho0 - 2 kappa [B (1/rho0)(rho0 X),_k],_j at eta = e.
  const XForcing G = [&](double t) { return ScalarField(dom, (8 * kappa - 1) * std::exp(-t)); };
  const XProblem p = frozen_x_problem(initial_state(VectorField(dom)), parabolic(dom), kappa, G, exact(0.0));
  const double h = 1.0 / (n - 1);
  return l2_norm(solve_x(p, 4 * h * h, 0.5).X.back() - exact(0.5));
}

Verdict x_solver() {
  Verdict v;
  for (int dim : {1, 2}) {
    std::vector<double> hs, errs;
    for (int n : {17, 33, 65}) {
      hs.push_back(1.0 / (n - 1));
      errs.push_back(mms_error(dim, n));
    }
    const double order = fit_order(hs, errs);
    v.require(order >= 1.8, fmt::format("{}-D manufactured solution errors {:.3e} {:.3e} {:.3e}, order {:.3f} >= 1.8 (dt = 4h^2)",
                                        dim, errs[0], errs[1], errs[2], order));
  }
  {
    const DiscreteDomain dom = build_domain(2, 32, 33);
    const ScalarField X0 = ScalarField::from_function(
        dom, [](const Point& x) { return std::sin(M_PI * x[1]) * (1 + 0.5 * std::cos(2 * M_PI * x[0])); });
    FlowState s = initial_state(VectorField(dom));
    s.eta = smooth_test_map(dom, 0.05);
    const XSolution sol = solve_x(frozen_x_problem(s, parabolic(dom), 0.05, {}, X0), 1e-3, 0.2);
    bool monotone = true;
    for (std::size_t k = 1; k < sol.weighted_norm.size(); ++k) {
      monotone = monotone && sol.weighted_norm[k] <= sol.weighted_norm[k - 1];
    }
    v.require(monotone, fmt::format("G = 0: ||X/sqrt(rho0)|| non-increasing over {} steps ({:.4e} -> {:.4e})",
                                    sol.times.size() - 1, sol.weighted_norm.front(), sol.weighted_norm.back()));
  }
  for (double kappa : {0.0, 1e-2}) {
    const AffineReference ref = affine_oracle(1.0, 1.0, 0.5, 0.2, 1e-5, kappa);
    std::vector<double> hs, res;
    for (int n : {17, 33, 65, 129}) {
      const DiscreteDomain dom = build_domain(1, 1, n);
      const double h = 1.0 / (n - 1);
      std::vector<FlowState> samples;
      for (int j = -1; j <= 1; ++j) samples.push_back(ref.state(dom, 0.1 + j * h));
      hs.push_back(h);
      res.push_back(consistency_check(samples, parabolic(dom), kappa)[1]);
    }
    const double order = fit_order(hs, res);
    v.require(order >= 1.8, fmt::format("affine consistency_check kappa = {:g}: {:.3e} .. {:.3e}, order {:.3f} >= 1.8",
                                        kappa, res.front(), res.back(), order));
  }
  return v;
}

Verdict functional_analysis() {
  Verdict v;
  struct Setup {
    int dim, nh, nv;
  };
  for (const Setup& g : {Setup{1, 1, 33}, Setup{2, 16, 65}}) {
    for (int s = 1; s <= 3; ++s) {
      const DistanceKind kind = s == 3 ? DistanceKind::smooth : DistanceKind::exact;
      double worst_spread = 0.0;
      double worst_scale = 0.0;
      std::string worst;
      for (const std::string& name : hardy_corpus()) {
        const InequalityReport rep = refinement_history(g.dim, g.nh, g.nv, 3, [&](const DiscreteDomain& dom) {
          const DensityProfile p = parabolic(dom);
          const ScalarField u = test_function(name, dom);
          const double base = hardy_ratio(u, s, p, kind).ratio;
          worst_scale = std::max(worst_scale, std::abs(hardy_ratio(u * 1e3, s, p, kind).ratio / base - 1));
          worst_scale = std::max(worst_scale, std::abs(hardy_ratio(u * -0.125, s, p, kind).ratio / base - 1));
          return hardy_ratio(u, s, p, kind);
        });
        const double spread = relative_spread(rep.history);
        if (spread >= worst_spread) {
          worst_spread = spread;
          worst = name;
        }
      }
      v.require(worst_spread < 0.05, fmt::format("{}-D s = {} ({} distance): largest spread {:.4f} ({}) < 0.05", g.dim, s,
                                                 kind == DistanceKind::smooth ? "smooth" : "exact", worst_spread, worst));
      v.require(worst_scale <= 1e-12, fmt::format("{}-D s = {}: scale invariance defect {:.2e} <= 1e-12", g.dim, s, worst_scale));
    }
  }

  const DiscreteDomain dom = build_domain(1, 1, 17);
  const double kappa = 0.2;
  const ScalarField f0 = ScalarField::from_function(dom, [](const Point& x) { return std::cos(3 * x[0]); });
  const double g0 = -0.4;
  const KellipticSolution sol = kelliptic_solve(f0, [&](double) { return ScalarField(dom, g0); }, kappa, 1e-2, 1.0);
  double err = 0.0;
  for (std::size_t k = 0; k < sol.times.size(); ++k) {
    for (std::size_t n = 0; n < dom.size(); ++n) {
      err = std::max(err, std::abs(sol.f[k][n] - (g0 + (f0[n] - g0) * std::exp(-sol.times[k] / kappa))));
    }
  }
  v.require(err <= 1e-12, fmt::format("kelliptic constant forcing max error {:.2e} <= 1e-12", err));

  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  double worst_C = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const double a = U(rng), b = U(rng), w = 30 * U(rng), kap = 0.02 + std::abs(U(rng));
    std::vector<double> phase(dom.size());
    for (double& p : phase) p = 3 * U(rng);
    const ScalarField start = ScalarField::from_function(dom, [&](const Point&) { return 2 * U(rng); });
    const auto g = [&](double t) {
      ScalarField out(dom);
      for (std::size_t n = 0; n < dom.size(); ++n) out[n] = a * std::sin(w * t + phase[n]) + b;
      return out;
    };
    worst_C = std::max(worst_C, kelliptic_bound_constant(kelliptic_solve(start, g, kap, 5e-3, 1.0)));
  }
  v.require(worst_C <= 1 + 1e-12, fmt::format("kelliptic max bound over 50 random forcings: C = {:.15f} <= 1 + 1e-12", worst_C));
  return v;
}

Verdict vacuum_gate() {
  Verdict v;
  for (double gamma : {1.5, 2.0, 3.0}) {
    for (int n : {33, 129, 513}) {
      const DiscreteDomain dom = build_domain(1, 1, n);
      for (double k : {1.0, 2.0}) {
        const ScalarField rho =
            ScalarField::from_function(dom, [&](const Point& x) { return std::pow(x[0] * (1 - x[0]), k / (gamma - 1)); });
        const auto [bottom, top] = check_physical_vacuum(rho, gamma);
        const bool accepted = bottom.ok && top.ok;
        bool threw = false;
        try {
          profile_from_field(rho, gamma);
        } catch (const ValidationError&) {
          threw = true;
        }
        const bool expect_accept = k == 1.0;
        v.require(accepted == expect_accept && threw != expect_accept,
                  fmt::format("gamma = {} n = {:3d} exponent {}/(gamma-1): {} (order {:.3f}, dN {:.3e})", gamma, n, k,
                              accepted ? "accepted" : "rejected", bottom.vanishing_order, bottom.normal_derivative));
      }
    }
  }
  return v;
}

struct Criterion {
  int id;
  const char* title;
  std::function<Verdict()> check;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "geometry identities", geometry_identities},
      {2, "affine oracle", affine_oracle_match},
      {3, "energy conservation and dissipation", conservation},
      {4, "vorticity transport", vorticity_transport},
      {5, "kappa -> 0 Cauchy property", kappa_cauchy},
      {6, "energy boundedness", energy_boundedness},
      {7, "degenerate parabolic X-solver", x_solver},
      {8, "Hardy and kappa-elliptic harness", functional_analysis},
      {9, "physical-vacuum gate", vacuum_gate},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  bool all = true;
  std::vector<std::string> summary;
  for (const Criterion& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    fmt::print("criterion {} ({}), {:.1f} s\n", c.id, c.title, secs);
    for (const std::string& d : v.details) fmt::print("    {}\n", d);
    summary.push_back(fmt::format("{} criterion {}: {}", v.pass ? "PASS" : "FAIL", c.id, c.title));
    all = all && v.pass;
    std::fflush(stdout);
  }
  fmt::print("\n");
  for (const std::string& s : summary) fmt::print("{}\n", s);
  return all ? 0 : 1;
}
