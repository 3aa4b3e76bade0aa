#include "vacflow/vacuum_eos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "vacflow/errors.hpp"

namespace vacflow {

const char* to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::parabolic:
      return "parabolic";
    case ProfileKind::linear_ramp:
      return "linear_ramp";
    case ProfileKind::custom:
      return "custom";
  }
  return "custom";
}

ProfileKind profile_kind_from_string(const std::string& name) {
  if (name == "parabolic") return ProfileKind::parabolic;
  if (name == "linear_ramp") return ProfileKind::linear_ramp;
  if (name == "custom") return ProfileKind::custom;
  throw ValidationError("unknown profile kind '" + name + "'");
}

ScalarField distance_to_boundary(const DiscreteDomain& domain) {
  const int v = domain.vertical_axis();
  return ScalarField::from_function(domain, [v](const Point& x) {
    const double z = x[static_cast<std::size_t>(v)];
    return std::min(z, 1.0 - z);
  });
}

double DensityProfile::rho_at(std::size_t node, double x_vertical) const {
  if (analytic) return analytic->rho(x_vertical);
  const DiscreteDomain& dom = domain();
  const std::size_t base = node - static_cast<std::size_t>(dom.vertical_index(node));
  const double h = dom.spacing(dom.vertical_axis());
  const double s = std::clamp(x_vertical / h, 0.0, static_cast<double>(dom.n_vertical() - 1));
  const auto i = std::min(static_cast<int>(s), dom.n_vertical() - 2);
  const double t = s - i;
  return (1.0 - t) * rho0[base + static_cast<std::size_t>(i)] + t * rho0[base + static_cast<std::size_t>(i) + 1];
}

namespace {

std::string face_name(int face) { return face == 0 ? "bottom face (x_v = 0)" : "top face (x_v = 1)"; }

VacuumFaceReport check_face(const ScalarField& rho0, const ScalarField& q, const ScalarField& dq,
                            int face) {
  const DiscreteDomain& dom = rho0.domain();
  const double h = dom.spacing(dom.vertical_axis());
  const double scale = std::max(1.0, rho0.max_abs());
  VacuumFaceReport rep;
  rep.face = face;
  rep.constant_estimate = std::numeric_limits<double>::infinity();
  rep.vanishing_order = -std::numeric_limits<double>::infinity();
  rep.normal_derivative = -std::numeric_limits<double>::infinity();
  double slowest_order = std::numeric_limits<double>::infinity();

  for (std::size_t node : dom.face_nodes(face)) {
    if (std::abs(rho0[node]) > 1e-13 * scale) {
      rep.failure = face_name(face) + ": rho0 does not vanish on the boundary";
      return rep;
    }
    const std::size_t n1 = face == 0 ? node + 1 : node - 1;
    const std::size_t n2 = face == 0 ? node + 2 : node - 2;
    const double q1 = q[n1];
    const double q2 = q[n2];
    rep.constant_estimate = std::min({rep.constant_estimate, q1 / h, q2 / (2.0 * h)});
    if (q1 > 0.0 && q2 > 0.0) {
      const double order = std::log2(q2 / q1);
      rep.vanishing_order = std::max(rep.vanishing_order, order);
      slowest_order = std::min(slowest_order, order);
    }
    const double outward = face == 0 ? -dq[node] : dq[node];
    rep.normal_derivative = std::max(rep.normal_derivative, outward);
  }

  if (!(rep.constant_estimate > 0.0)) {
    rep.failure = face_name(face) + ": rho0^(gamma-1) is not positive next to the boundary";
  } else if (slowest_order < 0.5) {
    rep.failure = face_name(face) + ": rho0^(gamma-1) vanishes slower than the distance (order " +
                  std::to_string(slowest_order) + "); no physical vacuum";
  } else if (rep.vanishing_order > 1.5) {
    rep.failure = face_name(face) + ": rho0^(gamma-1) vanishes faster than the distance (order " +
                  std::to_string(rep.vanishing_order) +
                  "); the gas cannot accelerate into vacuum";
  } else if (!(rep.normal_derivative < 0.0)) {
    rep.failure = face_name(face) + ": d(rho0^(gamma-1))/dN is not negative";
  } else {
    rep.ok = true;
  }
  return rep;
}

}  // namespace

std::pair<VacuumFaceReport, VacuumFaceReport> check_physical_vacuum(const ScalarField& rho0,
                                                                    double gamma) {
  if (!(gamma > 1.0)) throw ValidationError("physical vacuum check: gamma must be > 1");
  const DiscreteDomain& dom = rho0.domain();
  for (std::size_t k = 0; k < dom.size(); ++k) {
    if (!dom.on_boundary(k) && !(rho0[k] > 0.0)) {
      VacuumFaceReport bad;
      bad.failure = "rho0 must be positive at interior nodes";
      return {bad, bad};
    }
  }
  const ScalarField q = map(rho0, [gamma](double r) { return std::pow(std::max(r, 0.0), gamma - 1.0); });
  const ScalarField dq = diff(q, dom.vertical_axis(), 1);
  return {check_face(rho0, q, dq, 0), check_face(rho0, q, dq, 1)};
}

void require_physical_vacuum(const ScalarField& rho0, double gamma) {
  const auto [bottom, top] = check_physical_vacuum(rho0, gamma);
  if (!bottom.ok) throw ValidationError("physical vacuum violated: " + bottom.failure);
  if (!top.ok) throw ValidationError("physical vacuum violated: " + top.failure);
}

DensityProfile unchecked_profile(const ScalarField& rho0, double gamma) {
  DensityProfile p;
  p.rho0 = rho0;
  p.grad_rho0 = gradient(rho0);
  p.d = distance_to_boundary(rho0.domain());
  p.gamma = gamma;
  p.kind = ProfileKind::custom;
  return p;
}

DensityProfile profile_from_field(const ScalarField& rho0, double gamma) {
  require_physical_vacuum(rho0, gamma);
  return unchecked_profile(rho0, gamma);
}

DensityProfile density_profile(ProfileKind kind, const ProfileParams& params,
                               const DiscreteDomain& domain) {
  const double gamma = params.gamma;
  if (!(gamma > 1.0)) throw ValidationError("density_profile: gamma must be > 1");
  const double expo = 1.0 / (gamma - 1.0);
  const int v = domain.vertical_axis();

  AnalyticProfile an;
  switch (kind) {
    case ProfileKind::parabolic: {
      const double c = params.c;
      if (!(c > 0.0)) throw ValidationError("density_profile: parabolic slope c must be > 0");
      if (!(params.degeneracy >= 0.0)) throw ValidationError("density_profile: degeneracy must be >= 0");
      const double e = expo * params.degeneracy;
      an.rho = [c, expo = e](double z) { return std::pow(std::max(c * z * (1.0 - z), 0.0), expo); };
      an.drho = [c, expo = e](double z) {
        const double q = c * z * (1.0 - z);
        return expo * std::pow(q, expo - 1.0) * c * (1.0 - 2.0 * z);
      };
      break;
    }
    case ProfileKind::linear_ramp: {
      const double c = params.c;
      const double w = params.width;
      if (!(c > 0.0)) throw ValidationError("density_profile: ramp slope c must be > 0");
      if (!(w > 0.0 && w <= 0.5)) throw ValidationError("density_profile: ramp width must be in (0, 0.5]");
      an.rho = [c, w, expo](double z) { return std::pow(c * std::min({z, 1.0 - z, w}), expo); };
      an.drho = [c, w, expo](double z) {
        const double d = std::min(z, 1.0 - z);
        if (d >= w) return 0.0;
        const double dq = z < 0.5 ? c : -c;
        return expo * std::pow(c * d, expo - 1.0) * dq;
      };
      break;
    }
    case ProfileKind::custom: {
      if (!params.custom) throw ValidationError("density_profile: custom kind needs a density function");
      ScalarField rho0 = ScalarField::from_function(domain, params.custom);
      for (std::size_t k = 0; k < domain.size(); ++k) {
        if (domain.on_boundary(k)) rho0[k] = 0.0;
      }
      return profile_from_field(rho0, gamma);
    }
  }

  ScalarField rho0 = ScalarField::from_function(domain, [&](const Point& x) {
    return an.rho(x[static_cast<std::size_t>(v)]);
  });
  for (std::size_t k = 0; k < domain.size(); ++k) {
    if (domain.on_boundary(k)) rho0[k] = 0.0;
  }
  DensityProfile p = profile_from_field(rho0, gamma);
  p.kind = kind;
  p.analytic = std::move(an);
  return p;
}

double pressure(double rho, const EosParams& eos) {
  if (rho < 0.0) throw std::invalid_argument("pressure: negative density");
  return eos.c_gamma * std::pow(rho, eos.gamma);
}

ScalarField pressure(const ScalarField& rho, const EosParams& eos) {
  return map(rho, [&eos](double r) { return pressure(r, eos); });
}

double sound_speed_sq(double rho, const EosParams& eos) {
  if (rho < 0.0) throw std::invalid_argument("sound_speed_sq: negative density");
  return eos.gamma * eos.c_gamma * std::pow(rho, eos.gamma - 1.0);
}

ScalarField sound_speed_sq(const ScalarField& rho, const EosParams& eos) {
  return map(rho, [&eos](double r) { return sound_speed_sq(r, eos); });
}

namespace {

std::vector<double> gaussian_kernel(double radius, double h, int max_half_width) {
  const int half = std::min(max_half_width, static_cast<int>(std::ceil(3.0 * radius / h)));
  std::vector<double> w(static_cast<std::size_t>(2 * half + 1));
  double sum = 0.0;
  for (int m = -half; m <= half; ++m) {
    const double x = m * h;
    const double val = std::exp(-0.5 * x * x / (radius * radius));
    w[static_cast<std::size_t>(m + half)] = val;
    sum += val;
  }
  for (double& x : w) x /= sum;
  return w;
}

// Convolution along one axis. Vertical reflection about the end nodes is even
// (parity +1) or odd (parity -1).
ScalarField smooth_axis(const ScalarField& f, int axis, double radius, double parity) {
  const DiscreteDomain& dom = f.domain();
  const double h = dom.spacing(axis);
  const int n = dom.extent(axis);
  const bool periodic = dom.periodic(axis);
  const int max_half = periodic ? n / 2 : n - 1;
  const std::vector<double> w = gaussian_kernel(radius, h, max_half);
  const int half = static_cast<int>(w.size() / 2);
  const std::size_t s = dom.stride(axis);

  ScalarField out(dom);
  for (std::size_t k = 0; k < dom.size(); ++k) {
    const int i = static_cast<int>((k / s) % static_cast<std::size_t>(n));
    const std::size_t base = k - s * static_cast<std::size_t>(i);
    double acc = 0.0;
    for (int m = -half; m <= half; ++m) {
      int j = i + m;
      double sign = 1.0;
      if (periodic) {
        j = ((j % n) + n) % n;
      } else if (j < 0) {
        j = -j;
        sign = parity;
      } else if (j > n - 1) {
        j = 2 * (n - 1) - j;
        sign = parity;
      }
      acc += w[static_cast<std::size_t>(m + half)] * sign * f[base + s * static_cast<std::size_t>(j)];
    }
    out[k] = acc;
  }
  return out;
}

ScalarField smooth(ScalarField f, double radius, double vertical_parity) {
  const DiscreteDomain& dom = f.domain();
  for (int axis = 0; axis < dom.dim(); ++axis) {
    f = smooth_axis(f, axis, radius, dom.periodic(axis) ? 1.0 : vertical_parity);
  }
  return f;
}

}  // namespace

std::pair<VectorField, ScalarField> mollify_initial_data(const VectorField& u0,
                                                         const ScalarField& rho0, double radius,
                                                         double gamma) {
  if (radius < 0.0) throw ValidationError("mollify_initial_data: radius must be >= 0");
  if (radius == 0.0) return {u0, rho0};

  VectorField u(u0.domain());
  for (int c = 0; c < u0.dim(); ++c) u[c] = smooth(u0[c], radius, 1.0);

  const ScalarField q = map(rho0, [gamma](double r) { return std::pow(std::max(r, 0.0), gamma - 1.0); });
  ScalarField qs = smooth(q, radius, -1.0);
  const DiscreteDomain& dom = rho0.domain();
  ScalarField rho(dom);
  for (std::size_t k = 0; k < dom.size(); ++k) {
    rho[k] = dom.on_boundary(k) ? 0.0 : std::pow(std::max(qs[k], 0.0), 1.0 / (gamma - 1.0));
  }
  require_physical_vacuum(rho, gamma);
  return {u, rho};
}

}  // namespace vacflow
