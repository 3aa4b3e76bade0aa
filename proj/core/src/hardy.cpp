#include "vacflow/hardy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "vacflow/errors.hpp"

namespace vacflow {

ScalarField distance_field(const DiscreteDomain& domain, DistanceKind kind) {
  if (kind == DistanceKind::exact) return distance_to_boundary(domain);
  const int v = domain.vertical_axis();
  ScalarField d = ScalarField::from_function(
      domain, [v](const Point& x) { return std::sin(std::numbers::pi * x[v]) / std::numbers::pi; });
  for (int face = 0; face < 2; ++face) {
    for (std::size_t n : domain.face_nodes(face)) d[n] = 0.0;
  }
  return d;
}

InequalityReport hardy_ratio(const ScalarField& u, int s, const DensityProfile& profile,
                             DistanceKind distance) {
  if (s < 1 || s > 3) throw ValidationError("hardy_ratio: s must be 1, 2 or 3");
  const DiscreteDomain& dom = u.domain();
  if (!(dom == profile.domain())) throw ValidationError("hardy_ratio: u and profile grids differ");
  const double tol = 1e-12 * std::max(1.0, u.max_abs());
  for (int face = 0; face < 2; ++face) {
    for (std::size_t n : dom.face_nodes(face)) {
      if (std::abs(u[n]) > tol) throw ValidationError("hardy_ratio: u must vanish on Gamma");
    }
  }
  const ScalarField d = distance == DistanceKind::exact ? profile.d : distance_field(dom, distance);
  const ScalarField quotient = divide_vanishing(u, d);

  InequalityReport r;
  r.left = std::sqrt(sobolev_norm_sq(quotient, s - 1));
  r.right = std::sqrt(sobolev_norm_sq(u, s));
  r.degenerate = r.right == 0.0;
  r.ratio = r.degenerate ? 0.0 : r.left / r.right;
  r.constant_estimate = r.ratio;
  r.history = {r.ratio};
  return r;
}

InequalityReport weighted_embedding_ratio(const ScalarField& F, int p, const DensityProfile& profile) {
  if (p != 1 && p != 2) throw ValidationError("weighted_embedding_ratio: p must be 1 or 2");
  if (!F.all_finite()) throw ValidationError("weighted_embedding_ratio: F has non-finite entries");
  const double theta = 1.0 - 0.5 * p;
  const double n0 = sobolev_norm_sq(F, 0);
  const double n1 = sobolev_norm_sq(F, 1);

  InequalityReport r;
  r.left = std::pow(n0, 1.0 - theta) * std::pow(n1, theta);
  r.right = sobolev_norm_sq(F, 1, false, &profile.d, p);
  r.degenerate = r.right == 0.0 || r.left == 0.0;
  r.ratio = r.degenerate ? 0.0 : r.left / r.right;
  r.constant_estimate = r.ratio;
  r.history = {r.ratio};
  return r;
}

ScalarField test_function(const std::string& name, const DiscreteDomain& domain) {
  const int v = domain.vertical_axis();
  const double pi = std::numbers::pi;
  auto make = [&](auto fn) { return ScalarField::from_function(domain, fn); };
  if (name == "sine") return make([=](const Point& x) { return std::sin(pi * x[v]); });
  if (name == "parabola") return make([=](const Point& x) { return x[v] * (1.0 - x[v]); });
  if (name == "smoothed_distance") return make([=](const Point& x) { return std::sin(pi * x[v]) / pi; });
  if (name == "cubic") return make([=](const Point& x) { return x[v] * (1.0 - x[v]) * (1.0 + x[v]); });
  if (name == "modulated") {
    return make([=](const Point& x) {
      double m = 1.0;
      for (int a = 0; a < v; ++a) m += 0.5 * std::cos(2.0 * pi * x[a]);
      return std::sin(pi * x[v]) * m;
    });
  }
  if (name == "one") return make([](const Point&) { return 1.0; });
  if (name == "zero") return make([](const Point&) { return 0.0; });
  if (name == "inverse_sqrt_distance") {
    const double h = domain.spacing(v);
    return make([=](const Point& x) { return 1.0 / std::sqrt(std::max(std::min(x[v], 1.0 - x[v]), h)); });
  }
  throw ValidationError("unknown test function '" + name + "'");
}

std::vector<std::string> test_function_names() {
  return {"sine", "parabola", "smoothed_distance", "cubic", "modulated", "one", "zero", "inverse_sqrt_distance"};
}

std::vector<std::string> hardy_corpus() {
  return {"sine", "parabola", "smoothed_distance", "cubic", "modulated"};
}

InequalityReport refinement_history(int dim, int n_horizontal0, int n_vertical0, int levels,
                                    const std::function<InequalityReport(const DiscreteDomain&)>& ratio_on) {
  if (levels < 1) throw ValidationError("refinement_history: levels must be >= 1");
  InequalityReport out;
  int nh = n_horizontal0, nv = n_vertical0;
  for (int k = 0; k < levels; ++k) {
    const InequalityReport r = ratio_on(build_domain(dim, nh, nv));
    out = InequalityReport{r.ratio, r.left, r.right, 0.0, std::move(out.history), r.degenerate};
    out.history.push_back(r.ratio);
    nh *= 2;
    nv = 2 * (nv - 1) + 1;
  }
  out.constant_estimate = *std::max_element(out.history.begin(), out.history.end());
  return out;
}

double relative_spread(const std::vector<double>& history) {
  if (history.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(history.begin(), history.end());
  return (*hi - *lo) / *lo;
}

KellipticSolution kelliptic_solve(const ScalarField& f0, const std::function<ScalarField(double)>& g,
                                  double kappa, double dt, double t_end) {
  if (!(kappa > 0.0)) throw ValidationError("kelliptic_solve: kappa must be > 0");
  if (!(dt > 0.0)) throw ValidationError("kelliptic_solve: dt must be > 0");
  if (!(t_end >= 0.0)) throw ValidationError("kelliptic_solve: t_end must be >= 0");
  KellipticSolution sol;
  sol.times.push_back(0.0);
  sol.f.push_back(f0);
  ScalarField f = f0;
  double t = 0.0;
  const double tol = 1e-12 * std::max(1.0, t_end);
  while (t < t_end - tol) {
    const double h = std::min(dt, t_end - t);
    const ScalarField gbar = g(t + 0.5 * h);
    sol.g_sup = std::max(sol.g_sup, gbar.max_abs());
    const double decay = std::exp(-h / kappa);
    for (std::size_t n = 0; n < f.domain().size(); ++n) f[n] = gbar[n] + (f[n] - gbar[n]) * decay;
    t += h;
    sol.times.push_back(t);
    sol.f.push_back(f);
  }
  return sol;
}

double kelliptic_bound_constant(const KellipticSolution& solution) {
  double sup_f = 0.0;
  for (const ScalarField& f : solution.f) sup_f = std::max(sup_f, f.max_abs());
  const double bound = std::max(solution.f.front().max_abs(), solution.g_sup);
  return bound > 0.0 ? sup_f / bound : (sup_f > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
}

}  // namespace vacflow
