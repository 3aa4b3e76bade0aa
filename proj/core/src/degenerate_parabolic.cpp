#include "vacflow/degenerate_parabolic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "vacflow/diagnostics.hpp"
#include "vacflow/errors.hpp"

namespace vacflow {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;
using SmallMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;

double rho_between(const XProblem& p, std::size_t n, std::size_t m, int axis) {
  const DiscreteDomain& dom = p.rho0.domain();
  if (axis == dom.vertical_axis() && p.rho0_analytic) {
    const double x = 0.5 * (dom.coord(n)[axis] + dom.coord(m)[axis]);
    return p.rho0_analytic->rho(x);
  }
  return 0.5 * (p.rho0[n] + p.rho0[m]);
}

std::vector<long> unknown_map(const DiscreteDomain& dom, std::vector<std::size_t>& nodes) {
  std::vector<long> map(dom.size(), -1);
  for (std::size_t n = 0; n < dom.size(); ++n) {
    if (dom.on_boundary(n)) continue;
    map[n] = static_cast<long>(nodes.size());
    nodes.push_back(n);
  }
  return map;
}

/// Cell corners: bit `axis` of c selects the upper node along `axis`.
std::vector<std::size_t> cell_corners(const DiscreteDomain& dom, std::size_t lower) {
  const int dim = dom.dim();
  std::vector<std::size_t> corners(std::size_t{1} << dim);
  for (std::size_t c = 0; c < corners.size(); ++c) {
    std::size_t node = lower;
    for (int a = 0; a < dim; ++a) {
      if (c & (std::size_t{1} << a)) node = dom.shifted(node, a, 1);
    }
    corners[c] = node;
  }
  return corners;
}

/// Node-level stiffness S with b(Y, Z) = Z^T S Y approximating
/// 2 kappa int (B^{jk}/rho0) Y,_k Z,_j.
void assemble_node_stiffness(const XProblem& p, Triplets& out) {
  const DiscreteDomain& dom = p.rho0.domain();
  const int dim = dom.dim();
  const int vax = dom.vertical_axis();
  const int nv = dom.n_vertical();
  double h_horizontal = 1.0;
  for (int a = 0; a < dim - 1; ++a) h_horizontal *= dom.spacing(a);

  for (int j = 0; j < dim; ++j) {
    const double h = dom.spacing(j);
    for (std::size_t n = 0; n < dom.size(); ++n) {
      const int iv = dom.vertical_index(n);
      if (j == vax && iv == nv - 1) continue;
      if (j != vax && dom.on_boundary(n)) continue;
      const std::size_t m = dom.shifted(n, j, 1);
      const double rho = rho_between(p, n, m, j);
      if (!(rho > 0.0)) continue;
      const double weight = j == vax ? h_horizontal * h : dom.quad_weight(n);
      const double b = 0.5 * (p.B(j, j)[n] + p.B(j, j)[m]);
      const double c = 2.0 * p.kappa * b / rho * weight / (h * h);
      out.emplace_back(static_cast<int>(n), static_cast<int>(n), c);
      out.emplace_back(static_cast<int>(m), static_cast<int>(m), c);
      out.emplace_back(static_cast<int>(n), static_cast<int>(m), -c);
      out.emplace_back(static_cast<int>(m), static_cast<int>(n), -c);
    }
  }
  if (dim == 1) return;

  double volume = 1.0;
  for (int a = 0; a < dim; ++a) volume *= dom.spacing(a);
  const double scale = 1.0 / static_cast<double>(std::size_t{1} << (dim - 1));
  for (std::size_t lower = 0; lower < dom.size(); ++lower) {
    if (dom.vertical_index(lower) == nv - 1) continue;
    const std::vector<std::size_t> corners = cell_corners(dom, lower);
    const double inv = 1.0 / static_cast<double>(corners.size());
    SmallMatrix Bc = SmallMatrix::Zero(dim, dim);
    double off = 0.0;
    for (int j = 0; j < dim; ++j) {
      for (int k = 0; k < dim; ++k) {
        if (j == k) continue;
        for (std::size_t c : corners) Bc(j, k) += inv * p.B(j, k)[c];
        off += std::abs(Bc(j, k));
      }
    }
    if (off == 0.0) continue;
    double rho = 0.0;
    if (p.rho0_analytic) {
      rho = p.rho0_analytic->rho(dom.coord(lower)[vax] + 0.5 * dom.spacing(vax));
    } else {
      for (std::size_t c : corners) rho += inv * p.rho0[c];
    }
    if (!(rho > 0.0)) continue;
    const double coef = 2.0 * p.kappa * volume / rho;
    // s(a, c): weight of corner c in the cell gradient along axis a.
    auto s = [&](int a, std::size_t c) {
      const double sign = (c & (std::size_t{1} << a)) ? 1.0 : -1.0;
      return sign * scale / dom.spacing(a);
    };
    for (std::size_t cz = 0; cz < corners.size(); ++cz) {
      for (std::size_t cy = 0; cy < corners.size(); ++cy) {
        double value = 0.0;
        for (int j = 0; j < dim; ++j) {
          for (int k = 0; k < dim; ++k) {
            if (j != k) value += Bc(j, k) * s(j, cz) * s(k, cy);
          }
        }
        if (value != 0.0) {
          out.emplace_back(static_cast<int>(corners[cz]), static_cast<int>(corners[cy]), coef * value);
        }
      }
    }
  }
}

double interior_weighted_norm(const ScalarField& X, const ScalarField& rho0) {
  const DiscreteDomain& dom = X.domain();
  double s = 0.0;
  for (std::size_t n = 0; n < dom.size(); ++n) {
    if (dom.on_boundary(n) || !(rho0[n] > 0.0)) continue;
    s += dom.quad_weight(n) * X[n] * X[n] / rho0[n];
  }
  return std::sqrt(s);
}

void record(XSolution& sol, double t, ScalarField X, const ScalarField& rho0) {
  sol.times.push_back(t);
  sol.weighted_norm.push_back(interior_weighted_norm(X, rho0));
  sol.gradient_norm.push_back(l2_norm(gradient(X)));
  sol.X.push_back(std::move(X));
}

/// Gauss-Legendre nodes and weights on [0, 1] (Golub-Welsch).
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    T(k, k - 1) = b;
    T(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
  std::vector<double> x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    x[static_cast<std::size_t>(k)] = 0.5 * (es.eigenvalues()(k) + 1.0);
    const double v0 = es.eigenvectors()(0, k);
    w[static_cast<std::size_t>(k)] = v0 * v0;
  }
  return {x, w};
}

/// Piecewise-linear interpolation of a 1-D nodal field.
double interpolate(const ScalarField& f, double x) {
  const int nv = f.domain().n_vertical();
  const double h = f.domain().spacing(0);
  const int i = std::clamp(static_cast<int>(x / h), 0, nv - 2);
  const double s = x / h - i;
  return (1.0 - s) * f[static_cast<std::size_t>(i)] + s * f[static_cast<std::size_t>(i + 1)];
}

double interpolate_slope(const ScalarField& f, double x) {
  const int nv = f.domain().n_vertical();
  const double h = f.domain().spacing(0);
  const int i = std::clamp(static_cast<int>(x / h), 0, nv - 2);
  return (f[static_cast<std::size_t>(i + 1)] - f[static_cast<std::size_t>(i)]) / h;
}

XSolution solve_galerkin(const XProblem& p, double dt, int steps, const XSolveOptions& opt) {
  const DiscreteDomain& dom = p.rho0.domain();
  if (dom.dim() != 1) throw ValidationError("solve_x: the Galerkin mode is 1-D only");
  if (opt.galerkin_modes < 1 || opt.quadrature_points < 2) {
    throw ValidationError("solve_x: galerkin_modes >= 1 and quadrature_points >= 2 required");
  }
  const int L = opt.galerkin_modes;
  const auto [xq, wq] = gauss_legendre(opt.quadrature_points);
  const std::size_t Q = xq.size();
  const double pi = std::numbers::pi;

  auto phi = [&](int l, double x) { return std::sqrt(2.0) * std::sin(l * pi * x); };
  auto dphi = [&](int l, double x) { return std::sqrt(2.0) * l * pi * std::cos(l * pi * x); };
  auto rho = [&](double x) { return p.rho0_analytic ? p.rho0_analytic->rho(x) : interpolate(p.rho0, x); };
  auto drho = [&](double x) {
    return p.rho0_analytic ? p.rho0_analytic->drho(x) : interpolate_slope(p.rho0, x);
  };

  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(L, L), K = Eigen::MatrixXd::Zero(L, L);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(L);
  for (std::size_t q = 0; q < Q; ++q) {
    const double x = xq[q], w = wq[q];
    const double r = rho(x), dr = drho(x);
    const double J3 = interpolate(p.Jcubed, x), B = interpolate(p.B(0, 0), x);
    const double X0 = interpolate(p.X0, x);
    for (int m = 0; m < L; ++m) {
      c(m) += w * X0 * phi(m + 1, x);
      for (int l = 0; l < L; ++l) {
        M(m, l) += w * J3 * phi(l + 1, x) * phi(m + 1, x) / r;
        K(m, l) += w * 2.0 * p.kappa * B * (dr / r * phi(l + 1, x) + dphi(l + 1, x)) * dphi(m + 1, x);
      }
    }
  }
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(M + dt * K);

  auto to_grid = [&](const Eigen::VectorXd& coeff) {
    ScalarField X(dom);
    for (std::size_t n = 0; n < dom.size(); ++n) {
      const double x = dom.coord(n)[0];
      double s = 0.0;
      for (int l = 0; l < L; ++l) s += coeff(l) * phi(l + 1, x);
      X[n] = s;
    }
    for (std::size_t n : dom.face_nodes(0)) X[n] = 0.0;
    for (std::size_t n : dom.face_nodes(1)) X[n] = 0.0;
    return X;
  };

  XSolution sol;
  record(sol, 0.0, to_grid(c), p.rho0);
  for (int s = 1; s <= steps; ++s) {
    const double t = s * dt;
    Eigen::VectorXd rhs = M * c;
    if (p.G) {
      const ScalarField G = p.G(t);
      for (std::size_t q = 0; q < Q; ++q) {
        const double g = interpolate(G, xq[q]);
        for (int m = 0; m < L; ++m) rhs(m) += dt * wq[q] * g * phi(m + 1, xq[q]);
      }
    }
    c = lu.solve(rhs);
    if (!c.allFinite()) throw std::runtime_error("solve_x: Galerkin solve produced non-finite values");
    record(sol, t, to_grid(c), p.rho0);
  }
  return sol;
}

}  // namespace

XProblem frozen_x_problem(const FlowState& state, const DensityProfile& profile, double kappa,
                          XForcing G, const ScalarField& X0) {
  const GeometrySnapshot snap = snapshot(state);
  if (!snap.valid) throw ValidationError("frozen_x_problem: invalid geometry (J <= 0)");
  const DiscreteDomain& dom = state.eta.domain();
  const int dim = dom.dim();
  XProblem p;
  p.B = TensorField(dom);
  for (int j = 0; j < dim; ++j) {
    for (int k = 0; k < dim; ++k) {
      for (int i = 0; i < dim; ++i) p.B(j, k) += snap.a(j, i) * snap.a(k, i);
    }
  }
  p.Jcubed = snap.J * snap.J * snap.J;
  p.rho0 = profile.rho0;
  p.rho0_analytic = profile.analytic;
  p.G = std::move(G);
  p.kappa = kappa;
  p.X0 = X0;
  return p;
}

double min_eigenvalue(const TensorField& B) {
  const DiscreteDomain& dom = B.domain();
  const int dim = dom.dim();
  double lambda = std::numeric_limits<double>::infinity();
  SmallMatrix m(dim, dim);
  for (std::size_t n = 0; n < dom.size(); ++n) {
    for (int j = 0; j < dim; ++j) {
      for (int k = 0; k < dim; ++k) m(j, k) = 0.5 * (B(j, k)[n] + B(k, j)[n]);
    }
    Eigen::SelfAdjointEigenSolver<SmallMatrix> es(m, Eigen::EigenvaluesOnly);
    lambda = std::min(lambda, es.eigenvalues()(0));
  }
  return lambda;
}

void validate(const XProblem& p) {
  const DiscreteDomain& dom = p.rho0.domain();
  if (!(p.kappa > 0.0)) throw ValidationError("XProblem: kappa must be > 0");
  if (!(p.B.domain() == dom && p.Jcubed.domain() == dom && p.X0.domain() == dom)) {
    throw ValidationError("XProblem: fields live on different grids");
  }
  const double lambda = min_eigenvalue(p.B);
  if (!(lambda > 0.0)) {
    throw ValidationError("XProblem: B is not positive definite (min eigenvalue " +
                          std::to_string(lambda) + ")");
  }
  if (!(p.Jcubed.min() > 0.0)) throw ValidationError("XProblem: J^3 must be positive");
  const double tol = 1e-12 * std::max(1.0, p.X0.max_abs());
  for (int face = 0; face < 2; ++face) {
    for (std::size_t n : dom.face_nodes(face)) {
      if (std::abs(p.X0[n]) > tol) throw ValidationError("XProblem: X0 must vanish on Gamma");
    }
  }
}

XOperator assemble_x_operator(const XProblem& p) {
  const DiscreteDomain& dom = p.rho0.domain();
  XOperator op;
  const std::vector<long> map = unknown_map(dom, op.nodes);
  const auto n_unknowns = static_cast<Eigen::Index>(op.nodes.size());

  op.mass.resize(n_unknowns);
  for (Eigen::Index u = 0; u < n_unknowns; ++u) {
    const std::size_t n = op.nodes[static_cast<std::size_t>(u)];
    op.mass(u) = p.Jcubed[n] * dom.quad_weight(n);
  }

  Triplets node_level;
  assemble_node_stiffness(p, node_level);
  Triplets reduced;
  reduced.reserve(node_level.size());
  for (const auto& t : node_level) {
    const long r = map[static_cast<std::size_t>(t.row())];
    const long c = map[static_cast<std::size_t>(t.col())];
    if (r < 0 || c < 0) continue;
    const double value = p.rho0[static_cast<std::size_t>(t.row())] * t.value() *
                         p.rho0[static_cast<std::size_t>(t.col())];
    reduced.emplace_back(static_cast<int>(r), static_cast<int>(c), value);
  }
  op.stiffness.resize(n_unknowns, n_unknowns);
  op.stiffness.setFromTriplets(reduced.begin(), reduced.end());
  return op;
}

XSolution solve_x(const XProblem& p, double dt, double t_end, const XSolveOptions& options) {
  validate(p);
  if (!(dt > 0.0)) throw ValidationError("solve_x: dt must be > 0");
  if (!(t_end >= 0.0)) throw ValidationError("solve_x: t_end must be >= 0");
  const int steps = t_end > 0.0 ? static_cast<int>(std::ceil(t_end / dt - 1e-9)) : 0;
  const double h = steps > 0 ? t_end / steps : dt;

  if (options.method == XMethod::galerkin) return solve_galerkin(p, h, steps, options);

  const DiscreteDomain& dom = p.rho0.domain();
  const XOperator op = assemble_x_operator(p);
  const auto n_unknowns = static_cast<Eigen::Index>(op.nodes.size());

  Eigen::SparseMatrix<double> system = op.stiffness * h;
  for (Eigen::Index u = 0; u < n_unknowns; ++u) system.coeffRef(u, u) += op.mass(u);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(system);
  if (solver.info() != Eigen::Success) throw std::runtime_error("solve_x: factorization failed");

  Eigen::VectorXd X(n_unknowns);
  for (Eigen::Index u = 0; u < n_unknowns; ++u) X(u) = p.X0[op.nodes[static_cast<std::size_t>(u)]];

  auto to_field = [&](const Eigen::VectorXd& values) {
    ScalarField f(dom);
    for (Eigen::Index u = 0; u < n_unknowns; ++u) f[op.nodes[static_cast<std::size_t>(u)]] = values(u);
    return f;
  };

  XSolution sol;
  record(sol, 0.0, to_field(X), p.rho0);
  for (int s = 1; s <= steps; ++s) {
    const double t = s * h;
    Eigen::VectorXd rhs = op.mass.cwiseProduct(X);
    if (p.G) {
      const ScalarField G = p.G(t);
      for (Eigen::Index u = 0; u < n_unknowns; ++u) {
        const std::size_t n = op.nodes[static_cast<std::size_t>(u)];
        rhs(u) += h * p.rho0[n] * G[n] * dom.quad_weight(n);
      }
    }
    X = solver.solve(rhs);
    if (solver.info() != Eigen::Success || !X.allFinite()) {
      throw std::runtime_error("solve_x: linear solve failed at t = " + std::to_string(t));
    }
    record(sol, t, to_field(X), p.rho0);
  }
  return sol;
}

ScalarField x_from_flow(const FlowState& state, const DensityProfile& profile) {
  const GeometrySnapshot snap = snapshot(state);
  if (!snap.valid) throw ValidationError("x_from_flow: invalid geometry (J <= 0)");
  const ScalarField Jt = jacobian_rate(snap, state.v);
  ScalarField X(state.eta.domain());
  for (std::size_t n = 0; n < X.domain().size(); ++n) {
    X[n] = profile.rho0[n] * Jt[n] / (snap.J[n] * snap.J[n] * snap.J[n]);
  }
  return X;
}

std::vector<double> consistency_check(std::span<const FlowState> samples,
                                      const DensityProfile& profile, double kappa) {
  if (samples.size() < 3) throw std::invalid_argument("consistency_check: needs >= 3 samples");
  const DiscreteDomain& dom = profile.domain();
  const int dim = dom.dim();
  const std::size_t N = dom.size();
  const ScalarField& rho0 = profile.rho0;

  std::vector<ScalarField> X;
  X.reserve(samples.size());
  for (const FlowState& s : samples) X.push_back(x_from_flow(s, profile));

  std::vector<double> out;
  out.reserve(samples.size());
  for (std::size_t at = 0; at < samples.size(); ++at) {
    const auto idx = stencil_indices(samples.size(), at);
    const auto w = first_derivative_weights(samples[idx[0]].time, samples[idx[1]].time,
                                            samples[idx[2]].time, samples[at].time);
    ScalarField Xt = X[idx[0]] * w[0] + X[idx[1]] * w[1] + X[idx[2]] * w[2];

    const FlowState& s = samples[at];
    const GeometrySnapshot snap = snapshot(s);
    const ScalarField Jt = jacobian_rate(snap, s.v);
    const TensorField adot = cofactor_rate(snap, s.v);
    const TensorField Dv = jacobian(s.v);

    ScalarField rhoX = rho0 * X[at];
    ScalarField pressure_like(dom), f(dom);
    for (std::size_t n = 0; n < N; ++n) {
      pressure_like[n] = rho0[n] * rho0[n] / (snap.J[n] * snap.J[n]);
      f[n] = rho0[n] / snap.J[n];
    }
    std::vector<ScalarField> Q, P, Df;
    for (int k = 0; k < dim; ++k) {
      Q.push_back(divide_vanishing(diff(rhoX, k), rho0));
      P.push_back(divide_vanishing(diff(pressure_like, k), rho0));
      Df.push_back(diff(f, k));
    }

    // sum_j d_j of the three fluxes, combined with their coefficients.
    ScalarField flux_div(dom);
    for (int j = 0; j < dim; ++j) {
      ScalarField flux(dom);
      for (int k = 0; k < dim; ++k) {
        for (int i = 0; i < dim; ++i) {
          const ScalarField& aj = snap.a(j, i);
          for (std::size_t n = 0; n < N; ++n) {
            flux[n] += -2.0 * kappa * aj[n] * snap.a(k, i)[n] * Q[static_cast<std::size_t>(k)][n] +
                       kappa * aj[n] * adot(k, i)[n] * P[static_cast<std::size_t>(k)][n] +
                       2.0 * aj[n] * snap.A(k, i)[n] * Df[static_cast<std::size_t>(k)][n];
          }
        }
      }
      flux_div += diff(flux, j);
    }

    double sum = 0.0;
    for (std::size_t n = 0; n < N; ++n) {
      if (dom.on_boundary(n)) continue;
      const double J = snap.J[n];
      double source = -3.0 * Jt[n] * Jt[n] / J;
      for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) source += adot(j, i)[n] * Dv(i, j)[n];
      }
      const double R = J * J * J * Xt[n] / rho0[n] + flux_div[n] - source;
      sum += dom.quad_weight(n) * std::pow(rho0[n] * R, 2);
    }
    out.push_back(std::sqrt(sum));
  }
  return out;
}

std::vector<double> consistency_check(const Trajectory& trajectory, const DensityProfile& profile,
                                      double kappa) {
  return consistency_check(std::span<const FlowState>(trajectory.samples), profile, kappa);
}

}  // namespace vacflow
