#include "vacflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vacflow {

namespace {

VectorField combine(std::span<const FlowState> w, const std::array<std::size_t, 3>& idx,
                    const std::array<double, 3>& c, VectorField FlowState::*member) {
  VectorField out = (w[idx[0]].*member) * c[0];
  out += (w[idx[1]].*member) * c[1];
  out += (w[idx[2]].*member) * c[2];
  return out;
}

ScalarField combine(const std::array<ScalarField, 3>& f, const std::array<double, 3>& c) {
  ScalarField out = f[0] * c[0];
  out += f[1] * c[1];
  out += f[2] * c[2];
  return out;
}

// rho0 * T for every component of a tensor, flattened into a vector of fields.
std::vector<ScalarField> weighted_components(const TensorField& T, const ScalarField& w) {
  std::vector<ScalarField> out;
  for (int r = 0; r < T.dim(); ++r) {
    for (int c = 0; c < T.dim(); ++c) out.push_back(T(r, c) * w);
  }
  return out;
}

double sum_sobolev(const std::vector<ScalarField>& comps, int order, bool horizontal_only,
                   const ScalarField* weight = nullptr, double power = 0.0) {
  double s = 0.0;
  for (const auto& f : comps) s += sobolev_norm_sq(f, order, horizontal_only, weight, power);
  return s;
}

std::vector<ScalarField> components(const TensorField& T) {
  std::vector<ScalarField> out;
  for (int r = 0; r < T.dim(); ++r) {
    for (int c = 0; c < T.dim(); ++c) out.push_back(T(r, c));
  }
  return out;
}

double total(const NamedValues& v) {
  double s = 0.0;
  for (const auto& [name, val] : v) s += val;
  return s;
}

}  // namespace

std::array<double, 3> first_derivative_weights(double t0, double t1, double t2, double t) {
  return {((t - t1) + (t - t2)) / ((t0 - t1) * (t0 - t2)),
          ((t - t0) + (t - t2)) / ((t1 - t0) * (t1 - t2)),
          ((t - t0) + (t - t1)) / ((t2 - t0) * (t2 - t1))};
}

std::array<double, 3> second_derivative_weights(double t0, double t1, double t2) {
  return {2.0 / ((t0 - t1) * (t0 - t2)), 2.0 / ((t1 - t0) * (t1 - t2)),
          2.0 / ((t2 - t0) * (t2 - t1))};
}

std::array<std::size_t, 3> stencil_indices(std::size_t n, std::size_t at) {
  if (n < 3) throw std::invalid_argument("time stencil needs at least 3 samples");
  if (at == 0) return {0, 1, 2};
  if (at >= n - 1) return {n - 3, n - 2, n - 1};
  return {at - 1, at, at + 1};
}

double physical_energy(const FlowState& state, const DensityProfile& profile) {
  const GeometrySnapshot snap = snapshot(state);
  if (!snap.valid) throw std::invalid_argument("physical_energy: invalid snapshot (J <= 0)");
  const DiscreteDomain& dom = state.eta.domain();
  const double gamma = profile.gamma;
  double sum = 0.0;
  for (std::size_t k = 0; k < dom.size(); ++k) {
    double v2 = 0.0;
    for (int c = 0; c < dom.dim(); ++c) v2 += state.v[c][k] * state.v[c][k];
    const double rho0 = profile.rho0[k];
    const double internal = std::pow(rho0, gamma) * std::pow(snap.J[k], 1.0 - gamma) / (gamma - 1.0);
    sum += (0.5 * rho0 * v2 + internal) * dom.quad_weight(k);
  }
  return sum;
}

double vorticity_norm(const FlowState& state) {
  const GeometrySnapshot snap = snapshot(state);
  return l2_norm(lagrangian_curl(snap, state.v));
}

double curl_transport_residual(std::span<const FlowState> window, std::size_t at,
                               const DensityProfile& profile, double kappa) {
  const auto idx = stencil_indices(window.size(), at);
  const FlowState& s = window[at];
  const auto wts = first_derivative_weights(window[idx[0]].time, window[idx[1]].time,
                                            window[idx[2]].time, s.time);
  const VectorField vt = combine(window, idx, wts, &FlowState::v);
  const GeometrySnapshot snap = snapshot(s);
  VectorField res = lagrangian_curl(snap, vt);
  const DiscreteDomain& dom = s.eta.domain();
  const int dim = dom.dim();
  if (kappa > 0.0 && dim > 1) {
    const double gamma = profile.gamma;
    const double ratio = gamma / (gamma - 1.0);
    ScalarField g(dom);
    for (std::size_t n = 0; n < dom.size(); ++n) {
      g[n] = std::pow(profile.rho0[n] / snap.J[n], gamma - 1.0);
    }
    const VectorField Dg = gradient(g);
    // E_r = A^l_r g,_l ; H(r, j) = E_r,_m A^m_j
    TensorField H(dom);
    for (int r = 0; r < dim; ++r) {
      ScalarField E(dom);
      for (int l = 0; l < dim; ++l) E += snap.A(l, r) * Dg[l];
      for (int m = 0; m < dim; ++m) {
        const ScalarField dE = diff(E, m, 1);
        for (int j = 0; j < dim; ++j) H(r, j) += dE * snap.A(m, j);
      }
    }
    const TensorField Dv = jacobian(s.v);
    // T(i, j) = v^r,_s A^s_i H(r, j)
    TensorField T(dom);
    for (std::size_t n = 0; n < dom.size(); ++n) {
      for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
          double sum = 0.0;
          for (int r = 0; r < dim; ++r) {
            for (int sx = 0; sx < dim; ++sx) sum += Dv(r, sx)[n] * snap.A(sx, i)[n] * H(r, j)[n];
          }
          T(i, j)[n] = sum;
        }
      }
    }
    const double scale = ratio * kappa;
    if (dim == 2) {
      res[1] -= (T(1, 0) - T(0, 1)) * scale;
    } else {
      // [rhs]_k = eps_{kji} T(i, j)
      res[0] -= (T(2, 1) - T(1, 2)) * scale;
      res[1] -= (T(0, 2) - T(2, 0)) * scale;
      res[2] -= (T(1, 0) - T(0, 1)) * scale;
    }
  }
  return l2_norm(res);
}

EnergyReport energy_functional(std::span<const FlowState> window, std::size_t at,
                               const DensityProfile& profile, double kappa,
                               const EnergyOptions& options) {
  if (window.empty() || at >= window.size()) throw std::invalid_argument("energy_functional: empty window");
  if (options.time_levels < 1 || options.time_levels > 2) {
    throw std::invalid_argument("energy_functional: time_levels must be 1 or 2");
  }
  if (options.time_levels == 2 && window.size() < 3) {
    throw std::invalid_argument("energy_functional: window too short for time derivatives");
  }
  const FlowState& s = window[at];
  const GeometrySnapshot snap = snapshot(s);
  if (!snap.valid) throw std::invalid_argument("energy_functional: invalid snapshot (J <= 0)");
  const ScalarField& rho0 = profile.rho0;
  const int S4 = std::min(4, options.max_spatial_order);
  const int S3 = std::min(3, options.max_spatial_order);

  EnergyReport rep;
  rep.t = s.time;
  rep.physical_energy = physical_energy(s, profile);
  rep.J_min = snap.J_min;
  rep.J_max = snap.J_max;
  rep.piola_residual_max = piola_residual(snap).max_abs();

  const ScalarField Jm2 = map(snap.J, [](double J) { return 1.0 / (J * J); });

  // a = 0
  const VectorField disp = displacement(s.eta);
  double eta_norm = std::pow(l2_norm(s.eta), 2);
  if (S4 >= 1) {
    eta_norm += sobolev_norm_sq(disp, S4) - sobolev_norm_sq(disp, 1);
    for (const ScalarField& c : components(snap.D_eta)) eta_norm += std::pow(l2_norm(c), 2);
  }
  const double rho0_Deta = sum_sobolev(weighted_components(snap.D_eta, rho0), S4, false);
  const double v_tan = sobolev_norm_sq(s.v, S4, true, &rho0, 1.0);
  const double rho0_dbar_Deta = sum_sobolev(components(snap.D_eta), S4, true, &rho0, 2.0);
  const double rho0_Jm2 = sobolev_norm_sq(Jm2 * rho0, S4);

  rep.E_components.emplace_back("eta_H4", eta_norm);
  rep.E_components.emplace_back("rho0_Deta_H4", rho0_Deta);
  rep.E_components.emplace_back("sqrt_rho0_dbar4_v", v_tan);
  rep.E_gamma_components.emplace_back("eta_H4", eta_norm);
  rep.E_gamma_components.emplace_back("rho0_dbar4_Deta", rho0_dbar_Deta);
  rep.E_gamma_components.emplace_back("sqrt_rho0_dbar4_v", v_tan);
  rep.E_gamma_components.emplace_back("rho0_Jm2_H4", rho0_Jm2);

  if (options.time_levels == 2) {
    const auto idx = stencil_indices(window.size(), at);
    const double t0 = window[idx[0]].time, t1 = window[idx[1]].time, t2 = window[idx[2]].time;
    const auto w1 = first_derivative_weights(t0, t1, t2, s.time);
    const auto w2 = second_derivative_weights(t0, t1, t2);
    const VectorField vt = combine(window, idx, w1, &FlowState::v);   // d_t^2 eta
    const VectorField vtt = combine(window, idx, w2, &FlowState::v);  // d_t^2 v
    const TensorField Dvt = jacobian(vt);
    std::array<ScalarField, 3> jm2;
    for (std::size_t m = 0; m < 3; ++m) {
      const GeometrySnapshot sm = snapshot(window[idx[m]]);
      jm2[m] = map(sm.J, [](double J) { return 1.0 / (J * J); });
    }
    const ScalarField Jm2_tt = combine(jm2, w2);

    const double vt_norm = sobolev_norm_sq(vt, S3);
    const double rho0_Dvt = sum_sobolev(weighted_components(Dvt, rho0), S3, false);
    const double vtt_tan = sobolev_norm_sq(vtt, S3, true, &rho0, 1.0);
    const double rho0_dbar_Dvt = sum_sobolev(components(Dvt), S3, true, &rho0, 2.0);
    const double rho0_Jm2_tt = sobolev_norm_sq(Jm2_tt * rho0, S3);

    rep.E_components.emplace_back("vt_H3", vt_norm);
    rep.E_components.emplace_back("rho0_Dvt_H3", rho0_Dvt);
    rep.E_components.emplace_back("sqrt_rho0_dbar3_vtt", vtt_tan);
    rep.E_gamma_components.emplace_back("vt_H3", vt_norm);
    rep.E_gamma_components.emplace_back("rho0_dbar3_Dvt", rho0_dbar_Dvt);
    rep.E_gamma_components.emplace_back("sqrt_rho0_dbar3_vtt", vtt_tan);
    rep.E_gamma_components.emplace_back("rho0_Jm2tt_H3", rho0_Jm2_tt);
    rep.curl_residual = curl_transport_residual(window, at, profile, kappa);
  }

  if (options.include_curl) {
    const VectorField curl = lagrangian_curl(snap, s.v);
    const double curl_H3 = sobolev_norm_sq(curl, S3);
    const double curl_tan = sobolev_norm_sq(curl, S4, true, &rho0, 2.0);
    rep.E_components.emplace_back("curl_H3", curl_H3);
    rep.E_components.emplace_back("rho0_dbar4_curl", curl_tan);
    rep.E_gamma_components.emplace_back("curl_H3", curl_H3);
    rep.E_gamma_components.emplace_back("rho0_dbar4_curl", curl_tan);
  }

  rep.E_total = total(rep.E_components);
  rep.E_gamma_total = total(rep.E_gamma_components);
  return rep;
}

BoundaryTrace boundary_trace(const FlowState& state) {
  const GeometrySnapshot snap = snapshot(state);
  const DiscreteDomain& dom = state.eta.domain();
  BoundaryTrace tr;
  tr.t = state.time;
  for (std::size_t m = 0; m < snap.n.nodes.size(); ++m) {
    const std::size_t node = snap.n.nodes[m];
    Point pos{0.0, 0.0, 0.0};
    double vn = 0.0;
    for (int c = 0; c < dom.dim(); ++c) {
      pos[static_cast<std::size_t>(c)] = state.eta[c][node];
      vn += state.v[c][node] * snap.n.values[m][static_cast<std::size_t>(c)];
    }
    tr.face.push_back(snap.n.face[m]);
    tr.positions.push_back(pos);
    tr.normal_velocity.push_back(vn);
  }
  return tr;
}

PolynomialBoundFit fit_polynomial_bound(std::span<const double> times,
                                        std::span<const double> energies, int degree) {
  if (times.size() != energies.size() || times.empty()) {
    throw std::invalid_argument("fit_polynomial_bound: mismatched or empty history");
  }
  if (degree < 1) throw std::invalid_argument("fit_polynomial_bound: degree must be >= 1");
  PolynomialBoundFit fit;
  fit.degree = degree;
  fit.M0 = energies[0];
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double dt = times[k] - times[0];
    if (dt <= 0.0) continue;
    const double p = std::pow(energies[k], degree);
    if (p <= 0.0) continue;
    fit.C = std::max(fit.C, (energies[k] - fit.M0) / (dt * p));
  }
  return fit;
}

}  // namespace vacflow
