#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

#include "vacflow/errors.hpp"
#include "vacflow/harness.hpp"

namespace vacflow {

namespace {

struct AffineRhs {
  double c;
  double kappa;
  std::pair<double, double> operator()(double r, double s) const {
    return {s, 4.0 * c / (r * r) - 8.0 * c * kappa * s / (r * r * r)};
  }
};

std::pair<double, double> rk4(const AffineRhs& f, double r, double s, double h) {
  const auto [k1r, k1s] = f(r, s);
  const auto [k2r, k2s] = f(r + 0.5 * h * k1r, s + 0.5 * h * k1s);
  const auto [k3r, k3s] = f(r + 0.5 * h * k2r, s + 0.5 * h * k2s);
  const auto [k4r, k4s] = f(r + h * k3r, s + h * k3s);
  return {r + h / 6.0 * (k1r + 2 * k2r + 2 * k3r + k4r), s + h / 6.0 * (k1s + 2 * k2s + 2 * k3s + k4s)};
}

}  // namespace

AffineReference affine_oracle(double c, double r0, double rdot0, double t_end, double dt_ref, double kappa) {
  if (!(c > 0.0)) throw ValidationError("affine_oracle: c must be > 0 (c = 0 has no vacuum profile)");
  if (!(r0 > 0.0)) throw ValidationError("affine_oracle: r0 must be > 0");
  if (!(dt_ref > 0.0)) throw ValidationError("affine_oracle: dt_ref must be > 0");
  if (!(t_end >= 0.0)) throw ValidationError("affine_oracle: t_end must be >= 0");
  if (!(kappa >= 0.0)) throw ValidationError("affine_oracle: kappa must be >= 0");
  if (!std::isfinite(rdot0)) throw ValidationError("affine_oracle: rdot0 must be finite");

  AffineReference ref;
  ref.c = c;
  ref.kappa = kappa;
  ref.dt_ref = dt_ref;
  const AffineRhs f{c, kappa};
  double t = 0.0, r = r0, s = rdot0;
  ref.times.push_back(t);
  ref.r.push_back(r);
  ref.rdot.push_back(s);
  const double tol = 1e-12 * std::max(1.0, t_end);
  while (t < t_end - tol) {
    const double h = std::min(dt_ref, t_end - t);
    std::tie(r, s) = rk4(f, r, s, h);
    t += h;
    if (!(r > 0.0) || !std::isfinite(s)) {
      throw AbortError(t, fmt::format("affine_oracle: r = {} reached zero at t = {}", r, t));
    }
    ref.times.push_back(t);
    ref.r.push_back(r);
    ref.rdot.push_back(s);
  }
  return ref;
}

std::pair<double, double> AffineReference::at(double t) const {
  if (times.empty()) throw std::logic_error("AffineReference: empty reference");
  if (t < 0.0 || t > times.back() + 1e-12 * std::max(1.0, times.back())) {
    throw std::out_of_range(fmt::format("AffineReference: t = {} outside [0, {}]", t, times.back()));
  }
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const auto k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - times.begin()) - 1));
  const double h = t - times[k];
  if (h == 0.0) return {r[k], rdot[k]};
  return rk4(AffineRhs{c, kappa}, r[k], rdot[k], h);
}

double AffineReference::first_integral(std::size_t k) const {
  return 0.5 * rdot.at(k) * rdot.at(k) + 4.0 * c / r.at(k);
}

double AffineReference::max_first_integral_drift() const {
  const double I0 = first_integral(0);
  double drift = 0.0;
  for (std::size_t k = 1; k < times.size(); ++k) drift = std::max(drift, std::abs(first_integral(k) - I0));
  return drift / std::abs(I0);
}

FlowState AffineReference::state(const DiscreteDomain& domain, double t) const {
  const auto [rt, st] = at(t);
  const int v = domain.vertical_axis();
  FlowState s{identity_map(domain), VectorField(domain), t};
  s.eta[v] = ScalarField::from_function(domain, [=, r = rt](const Point& x) { return 0.5 + r * (x[v] - 0.5); });
  s.v[v] = ScalarField::from_function(domain, [=, sd = st](const Point& x) { return sd * (x[v] - 0.5); });
  return s;
}

ScalarField AffineReference::X(const DiscreteDomain& domain, double t) const {
  const auto [rt, st] = at(t);
  const int v = domain.vertical_axis();
  const double cc = c;
  return ScalarField::from_function(domain, [=](const Point& x) {
    return cc * x[v] * (1.0 - x[v]) * st / (rt * rt * rt);
  });
}

VectorField smooth_test_map(const DiscreteDomain& domain, double amplitude) {
  const int dim = domain.dim();
  const int v = domain.vertical_axis();
  const double pi = std::numbers::pi;
  VectorField eta = identity_map(domain);
  for (int i = 0; i < dim; ++i) {
    eta[i] += ScalarField::from_function(domain, [=](const Point& x) {
      double s = std::cos(pi * x[v] + 0.7 * i) * (1.0 + 0.5 * x[v] * x[v]);
      for (int h = 0; h < dim - 1; ++h) s *= std::sin(2 * pi * x[h] + 0.9 * i + 0.4 * h) + 0.3;
      return amplitude * s;
    });
  }
  return eta;
}

VectorField smooth_test_velocity(const DiscreteDomain& domain) {
  const int dim = domain.dim();
  const int v = domain.vertical_axis();
  const double pi = std::numbers::pi;
  VectorField u(domain);
  for (int i = 0; i < dim; ++i) {
    u[i] = ScalarField::from_function(domain, [=](const Point& x) {
      double s = std::exp(0.5 * x[v]) * std::sin(1.3 * pi * x[v] + 0.5 * i);
      for (int h = 0; h < dim - 1; ++h) s *= std::cos(2 * pi * x[h] + 0.3 * i - 0.2 * h) + 0.5;
      return s;
    });
  }
  return u;
}

namespace {

DiscreteDomain identity_grid(int dim, int n) { return build_domain(dim, n, n + 1); }

double max_abs(const VectorField& f) {
  double m = 0.0;
  for (int c = 0; c < f.dim(); ++c) m = std::max(m, f[c].max_abs());
  return m;
}

}  // namespace

double window_l2_norm(const VectorField& f, double margin) {
  const DiscreteDomain& d = f.domain();
  const int v = d.vertical_axis();
  const double tol = 1e-12;
  double s = 0.0;
  for (std::size_t n = 0; n < d.size(); ++n) {
    const double z = d.coord(n)[v];
    if (z < margin - tol || z > 1.0 - margin + tol) continue;
    for (int c = 0; c < f.dim(); ++c) s += d.quad_weight(n) * f[c][n] * f[c][n];
  }
  return std::sqrt(s);
}

std::vector<IdentityCheck> check_identities(int dim, int n) {
  if (n < 8 || n % 2 != 0) throw ValidationError("check_identities: n must be even and >= 8");
  std::vector<IdentityCheck> out;
  const DiscreteDomain dom = identity_grid(dim, n);
  const int v = dom.vertical_axis();

  {
    VectorField eta = identity_map(dom);
    for (int i = 0; i < dim; ++i) {
      const double shear = 0.2 + 0.1 * i;
      eta[i] += ScalarField::from_function(dom, [=](const Point& x) { return shear * x[v] + 0.05 * i; });
    }
    const double r = max_abs(piola_residual(snapshot(eta)));
    out.push_back({"piola_affine", r, 1e-10, r <= 1e-10, "max |a^k_i,_k| for an affine shear"});
  }
  {
    const double defect = cofactor_identity_defect(snapshot(smooth_test_map(dom)));
    out.push_back({"cofactor_identity", defect, 1e-10, defect <= 1e-10, "max |a (D eta)^T - J I| / max(1, |J|)"});
  }

  std::vector<double> hs, piola, curl, curl_full;
  for (int m : {n / 2, n, 2 * n}) {
    const DiscreteDomain d = identity_grid(dim, m);
    const GeometrySnapshot snap = snapshot(smooth_test_map(d));
    const VectorField cc = curlcurl_identity_residual(snap, smooth_test_velocity(d));
    hs.push_back(d.spacing(d.vertical_axis()));
    piola.push_back(l2_norm(piola_residual(snap)));
    curl.push_back(window_l2_norm(cc, 0.25));
    curl_full.push_back(l2_norm(cc));
  }
  auto order_check = [&](const std::string& name, const std::vector<double>& r, const std::string& norm) {
    const double worst = *std::max_element(r.begin(), r.end());
    if (worst <= 1e-10) {
      out.push_back({name, worst, 1e-10, true,
                     fmt::format("residual vanishes to rounding in {}-D (max {:.3e})", dim, worst)});
    } else {
      const double order = fit_order(hs, r);
      out.push_back({name, order, 1.8, order >= 1.8,
                     fmt::format("{} residual {:.3e} {:.3e} {:.3e}", norm, r[0], r[1], r[2])});
    }
  };
  order_check("piola_order", piola, "L2");
  order_check("curlcurl_order", curl, "interior L2");
  const double full = *std::max_element(curl_full.begin(), curl_full.end());
  if (full <= 1e-10) {
    out.push_back({"curlcurl_order_full_domain", full, 0.0, true,
                   fmt::format("informational: residual vanishes to rounding in {}-D (max {:.3e})", dim, full)});
  } else {
    out.push_back({"curlcurl_order_full_domain", fit_order(hs, curl_full), 0.0, true,
                   fmt::format("informational: L2 over all nodes {:.3e} {:.3e} {:.3e}", curl_full[0], curl_full[1],
                               curl_full[2])});
  }
  return out;
}

}  // namespace vacflow
