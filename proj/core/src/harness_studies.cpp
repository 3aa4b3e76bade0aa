#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <thread>

#include <fmt/format.h>

#include "vacflow/errors.hpp"
#include "vacflow/harness.hpp"

namespace vacflow {

double fit_order(std::span<const double> h, std::span<const double> error) {
  if (h.size() != error.size()) throw std::invalid_argument("fit_order: size mismatch");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    if (!(error[k] > 0.0) || !std::isfinite(error[k]) || !(h[k] > 0.0)) continue;
    const double x = std::log(h[k]), y = std::log(error[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / denom;
}

int resolve_threads(std::optional<int> flag) {
  if (flag) {
    if (*flag < 1) throw ValidationError("--threads must be >= 1");
    return *flag;
  }
  if (const char* env = std::getenv("VACFLOW_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v <= 4096) return static_cast<int>(v);
    throw ValidationError(fmt::format("VACFLOW_THREADS must be a positive integer (got '{}')", env));
  }
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  std::vector<std::exception_ptr> errors(n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            body(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

namespace {

/// Trajectory and status of one member run; aborts keep the partial samples.
struct MemberRun {
  Trajectory trajectory;
  std::string status = "ok";
  bool aborted = false;
};

MemberRun run_member(const VectorField& u0, const DensityProfile& profile, const SolverConfig& cfg) {
  MemberRun m;
  try {
    m.trajectory = run(u0, profile, cfg);
  } catch (const SolverAbort& e) {
    if (e.partial()) m.trajectory = *e.partial();
    m.aborted = true;
    m.status = fmt::format("abort at t = {:.6g}: {}", e.time(), e.what());
  }
  return m;
}

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

}  // namespace

StudyResult kappa_sweep(const RunConfig& base, const std::vector<double>& kappas, int threads) {
  if (kappas.size() < 3) {
    throw ValidationError(fmt::format("kappa_sweep: a sweep needs >= 3 kappa values (got {})", kappas.size()));
  }
  for (std::size_t i = 0; i < kappas.size(); ++i) {
    if (!(kappas[i] >= 0.0)) throw ValidationError("kappa_sweep: kappa values must be >= 0");
    if (i > 0 && kappas[i] > kappas[i - 1]) throw ValidationError("kappa_sweep: kappa values must be non-increasing");
  }
  validate(base);
  const auto [profile, u0] = make_initial_data(base);

  SolverConfig cfg = base.solver;
  cfg.gamma = base.eos.gamma;
  cfg.energy_reports = false;
  if (!(cfg.dt > 0.0)) {
    SolverConfig widest = cfg;
    widest.kappa = kappas.front();
    cfg.dt = stable_dt(initial_state(u0), profile, widest);
  }

  std::vector<MemberRun> runs(kappas.size());
  parallel_for(kappas.size(), threads, [&](std::size_t i) {
    SolverConfig c = cfg;
    c.kappa = kappas[i];
    runs[i] = run_member(u0, profile, c);
  });

  StudyResult out;
  out.name = "kappa_sweep";
  out.parameter_name = "kappa";
  out.metric_names = {"v_diff_next", "t_final", "physical_energy", "E_total", "J_min"};
  for (std::size_t i = 0; i < kappas.size(); ++i) {
    const MemberRun& m = runs[i];
    const FlowState& last = m.trajectory.samples.back();
    double diff = nan();
    if (i + 1 < kappas.size() && !m.aborted && !runs[i + 1].aborted) {
      diff = l2_norm(last.v - runs[i + 1].trajectory.samples.back().v);
    }
    double E = nan();
    const auto& samples = m.trajectory.samples;
    if (samples.size() >= 3) {
      E = energy_functional(samples, samples.size() - 1, profile, kappas[i]).E_total;
    }
    const GeometrySnapshot snap = snapshot(last);
    out.rows.push_back({kappas[i], {diff, last.time, physical_energy(last, profile), E, snap.J_min}, m.status});
  }
  out.notes.push_back(fmt::format("common dt = {:.17g}", cfg.dt));
  out.notes.push_back(fmt::format(
      "reproduce a row with: vacflow run --config <base> --set solver.kappa=<kappa> --set solver.dt={:.17g}", cfg.dt));
  return out;
}

StudyResult refinement_study(const RunConfig& base, int levels, int threads) {
  if (levels < 3) throw ValidationError(fmt::format("refinement_study: levels must be >= 3 (got {})", levels));
  validate(base);
  const double c = base.profile.c;
  const double kappa = base.solver.kappa;
  const double rdot0 = base.initial.amplitude;
  const double t_end = base.solver.t_end;
  const AffineReference ref = affine_oracle(c, 1.0, rdot0, t_end, std::min(1e-4, std::max(t_end, 1e-12) / 100.0), kappa);

  struct Level {
    double h = 0, eta_err = nan(), v_err = nan(), piola = nan(), curl = nan(), curl_full = nan();
    std::string status = "ok";
  };
  std::vector<Level> rows(static_cast<std::size_t>(levels));

  parallel_for(rows.size(), threads, [&](std::size_t k) {
    Level& L = rows[k];
    const int nv = (base.domain.n_vertical - 1) * (1 << k) + 1;
    const DiscreteDomain dom = build_domain(1, 4, nv);
    L.h = dom.spacing(0);

    ProfileParams pp;
    pp.gamma = 2.0;
    pp.c = c;
    const DensityProfile profile = density_profile(ProfileKind::parabolic, pp, dom);
    const VectorField u0 = ref.state(dom, 0.0).v;
    SolverConfig cfg = base.solver;
    cfg.gamma = 2.0;
    cfg.energy_reports = false;
    if (cfg.dt > 0.0) cfg.dt /= static_cast<double>(1 << k);
    const MemberRun m = run_member(u0, profile, cfg);
    L.status = m.status;
    if (!m.aborted) {
      double eta_err = 0.0, v_err = 0.0, v_scale = 0.0;
      for (const FlowState& s : m.trajectory.samples) {
        const FlowState exact = ref.state(dom, s.time);
        eta_err = std::max(eta_err, l2_norm(s.eta - exact.eta) / l2_norm(exact.eta));
        v_err = std::max(v_err, l2_norm(s.v - exact.v));
        v_scale = std::max(v_scale, l2_norm(exact.v));
      }
      L.eta_err = eta_err;
      L.v_err = v_scale > 0.0 ? v_err / v_scale : v_err;
    }

    const int n3 = 8 << k;
    const DiscreteDomain d3 = build_domain(3, n3, n3 + 1);
    const GeometrySnapshot snap = snapshot(smooth_test_map(d3));
    L.piola = l2_norm(piola_residual(snap));
    const VectorField cc = curlcurl_identity_residual(snap, smooth_test_velocity(d3));
    L.curl = window_l2_norm(cc, 0.25);
    L.curl_full = l2_norm(cc);
  });

  StudyResult out;
  out.name = "refinement";
  out.parameter_name = "h";
  out.metric_names = {"affine_eta_rel_error", "affine_v_rel_error", "piola_l2_3d", "curlcurl_interior_l2_3d",
                      "curlcurl_l2_3d"};
  std::vector<double> hs, e1, e2, e3, e4, e5;
  for (const Level& L : rows) {
    out.rows.push_back({L.h, {L.eta_err, L.v_err, L.piola, L.curl, L.curl_full}, L.status});
    e5.push_back(L.curl_full);
    hs.push_back(L.h);
    e1.push_back(L.eta_err);
    e2.push_back(L.v_err);
    e3.push_back(L.piola);
    e4.push_back(L.curl);
  }
  out.fitted_orders = {{"affine_eta_rel_error", fit_order(hs, e1)},
                       {"affine_v_rel_error", fit_order(hs, e2)},
                       {"piola_l2_3d", fit_order(hs, e3)},
                       {"curlcurl_interior_l2_3d", fit_order(hs, e4)},
                       {"curlcurl_l2_3d", fit_order(hs, e5)}};
  out.notes.push_back(fmt::format("affine benchmark: 1-D, gamma = 2, rho0 = {} x(1-x), kappa = {}, rdot0 = {}, t_end = {}",
                                  c, kappa, rdot0, t_end));
  out.notes.push_back(fmt::format("oracle first-integral drift {:.3e}", ref.max_first_integral_drift()));
  out.notes.push_back("3-D residuals on n^3 grids with n = 8, 16, 32, ... (same halving as h)");
  return out;
}

}  // namespace vacflow
