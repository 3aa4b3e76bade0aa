#pragma once

#include <cstddef>
#include <vector>

#include "vacflow/grid.hpp"

namespace vacflow {

/// Flow map and velocity on the reference grid at one time level.
struct FlowState {
  VectorField eta;  ///< particle positions eta(x, t)
  VectorField v;    ///< velocity eta_t
  double time = 0.0;
};

/// The identity map e(x) = x.
VectorField identity_map(const DiscreteDomain& domain);

/// eta - e. Periodic in the horizontal directions, so it is the quantity that
/// is differentiated; horizontal stencils on eta itself would wrap.
VectorField displacement(const VectorField& eta);

/// D eta = I + D(eta - e).
TensorField deformation_gradient(const VectorField& eta);

/// State at t = 0: eta = e, v = u0.
FlowState initial_state(const VectorField& u0);

/// Scalar samples on the two vertical faces: bottom face first, then top,
/// each in row-major horizontal order (see DiscreteDomain::face_nodes).
struct BoundaryScalarField {
  std::vector<std::size_t> nodes;
  std::vector<int> face;
  std::vector<double> values;
};

struct BoundaryVectorField {
  std::vector<std::size_t> nodes;
  std::vector<int> face;
  std::vector<Point> values;
};

/// Lagrangian geometry derived from a FlowState.
///
/// Index conventions: D_eta(i, j) = d eta^i / d x_j, and A(k, i), a(k, i)
/// hold A^k_i, a^k_i so that the Eulerian derivative d/dy_i = A^k_i d/dx_k.
/// The cofactor a is assembled from explicit minors of D_eta, and A = a / J.
struct GeometrySnapshot {
  TensorField D_eta;
  ScalarField J;
  TensorField A;
  TensorField a;
  BoundaryScalarField sqrt_g;  ///< |a^v_.| on each face
  BoundaryVectorField n;       ///< outward unit normal on eta(Gamma)
  bool valid = false;          ///< false if J <= 0 at some node
  double J_min = 0.0;
  double J_max = 0.0;
};

GeometrySnapshot snapshot(const FlowState& state);
/// Snapshot for a bare flow map (velocity not needed).
GeometrySnapshot snapshot(const VectorField& eta);

/// a^k_i,_k per component i. Zero for affine maps; O(dx^2) for smooth maps in 3-D.
VectorField piola_residual(const GeometrySnapshot& snap);

/// div_eta w = A^j_i w^i,_j.
ScalarField lagrangian_div(const GeometrySnapshot& snap, const VectorField& w);

/// [curl_eta w]_i = eps_{ijk} A^s_j w^k,_s. In 2-D the scalar curl is stored in
/// the last component (first component zero); in 1-D the result is zero.
VectorField lagrangian_curl(const GeometrySnapshot& snap, const VectorField& w);

/// Right side of d/dt a^k_i = v^r,_s J^{-1}[a^s_r a^k_i - a^s_i a^k_r].
TensorField cofactor_rate(const GeometrySnapshot& snap, const VectorField& v);

/// Time derivative of A^k_i along eta_t = v: -A^k_r v^r,_s A^s_i.
TensorField inverse_rate(const GeometrySnapshot& snap, const VectorField& v);

/// J_t = a^s_r v^r,_s.
ScalarField jacobian_rate(const GeometrySnapshot& snap, const VectorField& v);

/// Residual of the curl-curl identity: (d_t a^k_i),_j a^j_i minus
/// [curl curl v]^k, the deviation term and the lower-order term.
VectorField curlcurl_identity_residual(const GeometrySnapshot& snap, const VectorField& v);

/// Max over nodes of |a (D_eta)^T - J I| / max(1, |J|).
double cofactor_identity_defect(const GeometrySnapshot& snap);

}  // namespace vacflow
