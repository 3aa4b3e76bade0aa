#include "vacflow/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace vacflow {

namespace {

using Mat = std::array<std::array<double, 3>, 3>;

// Cofactor matrix a from explicit minors.
Mat adjugate(const Mat& F, int dim) {
  Mat a{};
  if (dim == 1) {
    a[0][0] = 1.0;
  } else if (dim == 2) {
    a[0][0] = F[1][1];
    a[0][1] = -F[0][1];
    a[1][0] = -F[1][0];
    a[1][1] = F[0][0];
  } else {
    a[0][0] = F[1][1] * F[2][2] - F[1][2] * F[2][1];
    a[0][1] = F[0][2] * F[2][1] - F[0][1] * F[2][2];
    a[0][2] = F[0][1] * F[1][2] - F[0][2] * F[1][1];
    a[1][0] = F[1][2] * F[2][0] - F[1][0] * F[2][2];
    a[1][1] = F[0][0] * F[2][2] - F[0][2] * F[2][0];
    a[1][2] = F[0][2] * F[1][0] - F[0][0] * F[1][2];
    a[2][0] = F[1][0] * F[2][1] - F[1][1] * F[2][0];
    a[2][1] = F[0][1] * F[2][0] - F[0][0] * F[2][1];
    a[2][2] = F[0][0] * F[1][1] - F[0][1] * F[1][0];
  }
  return a;
}

double determinant(const Mat& F, const Mat& adj, int dim) {
  double J = 0.0;
  for (int i = 0; i < dim; ++i) J += F[0][static_cast<std::size_t>(i)] * adj[static_cast<std::size_t>(i)][0];
  return J;
}

constexpr int levi_civita(int i, int j, int k) {
  if (i == j || j == k || i == k) return 0;
  return ((i == 0 && j == 1) || (i == 1 && j == 2) || (i == 2 && j == 0)) ? 1 : -1;
}

}  // namespace

VectorField identity_map(const DiscreteDomain& domain) {
  return VectorField::from_function(domain, [](const Point& x) { return x; });
}

VectorField displacement(const VectorField& eta) {
  return eta - identity_map(eta.domain());
}

TensorField deformation_gradient(const VectorField& eta) {
  TensorField F = jacobian(displacement(eta));
  for (int i = 0; i < eta.domain().dim(); ++i) {
    ScalarField& c = F(i, i);
    for (std::size_t k = 0; k < c.domain().size(); ++k) c[k] += 1.0;
  }
  return F;
}

FlowState initial_state(const VectorField& u0) {
  return FlowState{identity_map(u0.domain()), u0, 0.0};
}

GeometrySnapshot snapshot(const VectorField& eta) {
  const DiscreteDomain& dom = eta.domain();
  const int dim = dom.dim();
  GeometrySnapshot s;
  s.D_eta = deformation_gradient(eta);
  s.J = ScalarField(dom);
  s.A = TensorField(dom);
  s.a = TensorField(dom);
  s.valid = true;
  s.J_min = std::numeric_limits<double>::infinity();
  s.J_max = -std::numeric_limits<double>::infinity();

  for (std::size_t k = 0; k < dom.size(); ++k) {
    Mat F{};
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) F[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = s.D_eta(i, j)[k];
    }
    const Mat adj = adjugate(F, dim);
    const double J = determinant(F, adj, dim);
    s.J[k] = J;
    s.J_min = std::min(s.J_min, J);
    s.J_max = std::max(s.J_max, J);
    if (!(J > 0.0)) s.valid = false;
    for (int r = 0; r < dim; ++r) {
      for (int c = 0; c < dim; ++c) {
        const double val = adj[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        s.a(r, c)[k] = val;
        s.A(r, c)[k] = J > 0.0 ? val / J : std::numeric_limits<double>::quiet_NaN();
      }
    }
  }

  const int v = dom.vertical_axis();
  for (int face = 0; face < 2; ++face) {
    const double sign = face == 0 ? -1.0 : 1.0;
    for (std::size_t node : dom.face_nodes(face)) {
      double g2 = 0.0;
      for (int i = 0; i < dim; ++i) g2 += s.a(v, i)[node] * s.a(v, i)[node];
      const double sqrt_g = std::sqrt(g2);
      Point n{0.0, 0.0, 0.0};
      for (int i = 0; i < dim; ++i) n[static_cast<std::size_t>(i)] = sign * s.a(v, i)[node] / sqrt_g;
      s.sqrt_g.nodes.push_back(node);
      s.sqrt_g.face.push_back(face);
      s.sqrt_g.values.push_back(sqrt_g);
      s.n.nodes.push_back(node);
      s.n.face.push_back(face);
      s.n.values.push_back(n);
    }
  }
  return s;
}

GeometrySnapshot snapshot(const FlowState& state) { return snapshot(state.eta); }

VectorField piola_residual(const GeometrySnapshot& snap) {
  const DiscreteDomain& dom = snap.J.domain();
  VectorField out(dom);
  for (int i = 0; i < dom.dim(); ++i) {
    for (int k = 0; k < dom.dim(); ++k) out[i] += diff(snap.a(k, i), k, 1);
  }
  return out;
}

ScalarField lagrangian_div(const GeometrySnapshot& snap, const VectorField& w) {
  const DiscreteDomain& dom = w.domain();
  const TensorField Dw = jacobian(w);
  ScalarField out(dom);
  for (int i = 0; i < dom.dim(); ++i) {
    for (int j = 0; j < dom.dim(); ++j) out += snap.A(j, i) * Dw(i, j);
  }
  return out;
}

namespace {

// Eulerian gradient of each component, pulled back: G(k, j) = A^s_j w^k,_s.
TensorField pulled_back_gradient(const GeometrySnapshot& snap, const TensorField& Dw) {
  const DiscreteDomain& dom = Dw.domain();
  const int dim = dom.dim();
  TensorField G(dom);
  for (std::size_t n = 0; n < dom.size(); ++n) {
    for (int k = 0; k < dim; ++k) {
      for (int j = 0; j < dim; ++j) {
        double sum = 0.0;
        for (int s = 0; s < dim; ++s) sum += snap.A(s, j)[n] * Dw(k, s)[n];
        G(k, j)[n] = sum;
      }
    }
  }
  return G;
}

VectorField curl_from_gradient(const TensorField& G) {
  const DiscreteDomain& dom = G.domain();
  const int dim = dom.dim();
  VectorField out(dom);
  if (dim == 1) return out;
  if (dim == 2) {
    out[1] = G(1, 0) - G(0, 1);
    return out;
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) {
        const int e = levi_civita(i, j, k);
        if (e == 0) continue;
        if (e > 0) {
          out[i] += G(k, j);
        } else {
          out[i] -= G(k, j);
        }
      }
    }
  }
  return out;
}

}  // namespace

VectorField lagrangian_curl(const GeometrySnapshot& snap, const VectorField& w) {
  if (w.dim() == 1) return VectorField(w.domain());
  return curl_from_gradient(pulled_back_gradient(snap, jacobian(w)));
}

TensorField cofactor_rate(const GeometrySnapshot& snap, const VectorField& v) {
  const DiscreteDomain& dom = v.domain();
  const int dim = dom.dim();
  const TensorField Dv = jacobian(v);
  TensorField out(dom);
  for (std::size_t n = 0; n < dom.size(); ++n) {
    const double Jinv = 1.0 / snap.J[n];
    for (int k = 0; k < dim; ++k) {
      for (int i = 0; i < dim; ++i) {
        double sum = 0.0;
        for (int r = 0; r < dim; ++r) {
          for (int s = 0; s < dim; ++s) {
            sum += Dv(r, s)[n] * (snap.a(s, r)[n] * snap.a(k, i)[n] - snap.a(s, i)[n] * snap.a(k, r)[n]);
          }
        }
        out(k, i)[n] = sum * Jinv;
      }
    }
  }
  return out;
}

TensorField inverse_rate(const GeometrySnapshot& snap, const VectorField& v) {
  const DiscreteDomain& dom = v.domain();
  const int dim = dom.dim();
  const TensorField Dv = jacobian(v);
  TensorField out(dom);
  for (std::size_t n = 0; n < dom.size(); ++n) {
    for (int k = 0; k < dim; ++k) {
      for (int i = 0; i < dim; ++i) {
        double sum = 0.0;
        for (int r = 0; r < dim; ++r) {
          for (int s = 0; s < dim; ++s) sum += snap.A(k, r)[n] * Dv(r, s)[n] * snap.A(s, i)[n];
        }
        out(k, i)[n] = -sum;
      }
    }
  }
  return out;
}

ScalarField jacobian_rate(const GeometrySnapshot& snap, const VectorField& v) {
  const DiscreteDomain& dom = v.domain();
  const TensorField Dv = jacobian(v);
  ScalarField out(dom);
  for (int r = 0; r < dom.dim(); ++r) {
    for (int s = 0; s < dom.dim(); ++s) out += snap.a(s, r) * Dv(r, s);
  }
  return out;
}

VectorField curlcurl_identity_residual(const GeometrySnapshot& snap, const VectorField& v) {
  const DiscreteDomain& dom = v.domain();
  const int dim = dom.dim();
  const auto N = dom.size();
  const TensorField rate = cofactor_rate(snap, v);
  const TensorField Dv = jacobian(v);

  // Second derivatives v^r,_{sj} composed from first-derivative stencils.
  std::vector<ScalarField> D2v(static_cast<std::size_t>(dim * dim * dim));
  auto d2 = [&](int r, int s, int j) -> ScalarField& {
    return D2v[static_cast<std::size_t>((r * dim + s) * dim + j)];
  };
  for (int r = 0; r < dim; ++r) {
    for (int s = 0; s < dim; ++s) {
      for (int j = 0; j < dim; ++j) d2(r, s, j) = diff(Dv(r, s), j, 1);
    }
  }

  VectorField residual(dom);
  for (int k = 0; k < dim; ++k) {
    ScalarField lhs(dom);
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) lhs += diff(rate(k, i), j, 1) * snap.a(j, i);
    }

    // curl curl v = D div v - Laplacian v
    ScalarField curlcurl(dom);
    for (int r = 0; r < dim; ++r) curlcurl += d2(r, r, k);
    for (int j = 0; j < dim; ++j) curlcurl -= d2(k, j, j);

    ScalarField deviation(dom);
    ScalarField lower(dom);
    for (int r = 0; r < dim; ++r) {
      for (int s = 0; s < dim; ++s) {
        for (int i = 0; i < dim; ++i) {
          // C = J^{-1}[a^s_r a^k_i - a^s_i a^k_r]
          ScalarField C(dom);
          for (std::size_t n = 0; n < N; ++n) {
            C[n] = (snap.a(s, r)[n] * snap.a(k, i)[n] - snap.a(s, i)[n] * snap.a(k, r)[n]) / snap.J[n];
          }
          const double flat = (r == s && k == i ? 1.0 : 0.0) - (s == i && k == r ? 1.0 : 0.0);
          for (int j = 0; j < dim; ++j) {
            const double delta_ji = j == i ? 1.0 : 0.0;
            const ScalarField dC = diff(C, j, 1);
            const ScalarField& vrsj = d2(r, s, j);
            const ScalarField& vrs = Dv(r, s);
            const ScalarField& aji = snap.a(j, i);
            for (std::size_t n = 0; n < N; ++n) {
              deviation[n] += vrsj[n] * (C[n] * aji[n] - flat * delta_ji);
              lower[n] += vrs[n] * dC[n] * aji[n];
            }
          }
        }
      }
    }
    residual[k] = lhs - curlcurl - deviation - lower;
  }
  return residual;
}

double cofactor_identity_defect(const GeometrySnapshot& snap) {
  const DiscreteDomain& dom = snap.J.domain();
  const int dim = dom.dim();
  double worst = 0.0;
  for (std::size_t n = 0; n < dom.size(); ++n) {
    const double scale = std::max(1.0, std::abs(snap.J[n]));
    for (int r = 0; r < dim; ++r) {
      for (int c = 0; c < dim; ++c) {
        // a^r_m eta^m,_c = J delta^r_c
        double sum = 0.0;
        for (int m = 0; m < dim; ++m) sum += snap.a(r, m)[n] * snap.D_eta(m, c)[n];
        const double target = r == c ? snap.J[n] : 0.0;
        worst = std::max(worst, std::abs(sum - target) / scale);
      }
    }
  }
  return worst;
}

}  // namespace vacflow
