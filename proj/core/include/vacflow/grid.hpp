#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace vacflow {

/// Coordinates of a node; unused trailing entries are zero.
using Point = std::array<double, 3>;
using MultiIndex = std::array<int, 3>;

/// Uniform tensor grid on T^{dim-1} x [0,1].
///
/// Axes 0..dim-2 are horizontal and periodic (no duplicated seam node);
/// axis dim-1 is vertical and carries endpoint nodes at 0 and 1. Nodes are
/// stored row-major with the vertical axis fastest.
class DiscreteDomain {
 public:
  DiscreteDomain() = default;

  int dim() const noexcept { return dim_; }
  int n_horizontal() const noexcept { return n_horizontal_; }
  int n_vertical() const noexcept { return n_vertical_; }
  int vertical_axis() const noexcept { return dim_ - 1; }

  std::size_t size() const noexcept { return size_; }
  int extent(int axis) const;
  double spacing(int axis) const;
  double min_spacing() const;
  bool periodic(int axis) const { return axis < dim_ - 1; }
  std::size_t stride(int axis) const;

  MultiIndex index(std::size_t node) const;
  std::size_t node(const MultiIndex& idx) const;
  /// Neighbor of `node` shifted by `offset` along `axis`; wraps horizontally.
  /// The caller guarantees the vertical target exists.
  std::size_t shifted(std::size_t node, int axis, int offset) const;

  Point coord(std::size_t node) const;
  int vertical_index(std::size_t node) const;
  bool on_boundary(std::size_t node) const;

  double quad_weight(std::size_t node) const;
  std::vector<double> quadrature_weights() const;

  /// Nodes of the bottom (face 0, x_v = 0) or top (face 1, x_v = 1) face,
  /// in row-major horizontal order.
  std::vector<std::size_t> face_nodes(int face) const;
  std::size_t face_size() const noexcept { return size_ / static_cast<std::size_t>(n_vertical_); }

  /// Number of nodes strictly inside (0,1) vertically.
  std::size_t interior_size() const noexcept { return size_ - 2 * face_size(); }

  friend bool operator==(const DiscreteDomain&, const DiscreteDomain&) = default;

 private:
  friend DiscreteDomain build_domain(int dim, int n_horizontal, int n_vertical);

  int dim_ = 1;
  int n_horizontal_ = 1;
  int n_vertical_ = 0;
  std::size_t size_ = 0;
};

/// Uniform grid; n_horizontal is ignored for dim == 1.
/// Throws ValidationError for dim outside {1,2,3}, n_vertical < 4, or
/// n_horizontal < 4 when dim > 1.
DiscreteDomain build_domain(int dim, int n_horizontal, int n_vertical);

class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const DiscreteDomain& domain, double fill = 0.0);
  ScalarField(const DiscreteDomain& domain, std::vector<double> values);

  static ScalarField from_function(const DiscreteDomain& domain,
                                   const std::function<double(const Point&)>& f);

  const DiscreteDomain& domain() const noexcept { return domain_; }
  std::size_t size() const noexcept { return values_.size(); }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  bool all_finite() const;
  double max_abs() const;
  double min() const;
  double max() const;

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double s);
  /// Nodewise product.
  ScalarField& operator*=(const ScalarField& o);

 private:
  DiscreteDomain domain_;
  std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(ScalarField a, double s);
ScalarField operator*(double s, ScalarField a);
ScalarField operator*(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a);

/// Applies `f` nodewise.
ScalarField map(const ScalarField& a, const std::function<double(double)>& f);

/// dim components, each a ScalarField on the same domain.
class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(const DiscreteDomain& domain, double fill = 0.0);

  static VectorField from_function(const DiscreteDomain& domain,
                                   const std::function<Point(const Point&)>& f);

  const DiscreteDomain& domain() const noexcept { return domain_; }
  int dim() const noexcept { return domain_.dim(); }
  std::size_t size() const noexcept { return domain_.size(); }

  ScalarField& operator[](int c) { return comps_[static_cast<std::size_t>(c)]; }
  const ScalarField& operator[](int c) const { return comps_[static_cast<std::size_t>(c)]; }

  bool all_finite() const;
  double max_abs() const;

  VectorField& operator+=(const VectorField& o);
  VectorField& operator-=(const VectorField& o);
  VectorField& operator*=(double s);

 private:
  DiscreteDomain domain_;
  std::vector<ScalarField> comps_;
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(VectorField a, double s);
VectorField operator*(double s, VectorField a);

/// dim x dim components; (r, c) addresses row r, column c.
class TensorField {
 public:
  TensorField() = default;
  explicit TensorField(const DiscreteDomain& domain, double fill = 0.0);

  const DiscreteDomain& domain() const noexcept { return domain_; }
  int dim() const noexcept { return domain_.dim(); }
  std::size_t size() const noexcept { return domain_.size(); }

  ScalarField& operator()(int r, int c) { return comps_[flat(r, c)]; }
  const ScalarField& operator()(int r, int c) const { return comps_[flat(r, c)]; }

  bool all_finite() const;
  double max_abs() const;

 private:
  std::size_t flat(int r, int c) const {
    return static_cast<std::size_t>(r * domain_.dim() + c);
  }

  DiscreteDomain domain_;
  std::vector<ScalarField> comps_;
};

/// Second-order finite difference along `axis`: centered in the interior,
/// periodic horizontally, one-sided second-order at the vertical endpoints.
/// order 1 uses (-3,4,-1)/2h at the ends; order 2 uses (2,-5,4,-1)/h^2.
ScalarField diff(const ScalarField& f, int axis, int order = 1);
VectorField diff(const VectorField& f, int axis, int order = 1);

/// D^alpha f built from the diff stencils: per axis, floor(m/2) applications
/// of the second-derivative stencil followed by m mod 2 first derivatives.
ScalarField derivative(const ScalarField& f, const MultiIndex& alpha);

/// Gradient: component j is diff(f, j).
VectorField gradient(const ScalarField& f);
/// Jacobian: (i, j) = d f^i / d x_j.
TensorField jacobian(const VectorField& f);

/// All multi-indices with |alpha| <= max_order over the first `dim` axes,
/// ordered by total order then lexicographically. If `horizontal_only`, the
/// vertical axis is excluded.
std::vector<MultiIndex> multi_indices(int dim, int max_order, bool horizontal_only = false);

/// Quadrature: trapezoid vertically, rectangle rule horizontally. Sums are
/// accumulated in node order so repeated calls are bit-identical.
double integrate(const ScalarField& f);
double inner(const ScalarField& f, const ScalarField& g);
double l2_norm(const ScalarField& f);
double l2_norm(const VectorField& f);

/// (sum_nodes sum_{|alpha|<=order} weight^power |D^alpha f|^2 quad)^{1/2}.
/// Requires derivative_order <= 2 and non-negative weights.
double weighted_norm(const ScalarField& f, const ScalarField& weight, int weight_power,
                     int derivative_order);
double weighted_norm(const VectorField& f, const ScalarField& weight, int weight_power,
                     int derivative_order);

/// Squared Sobolev-type norm sum_{|alpha|<=order} int w^p |D^alpha f|^2 with
/// no cap on `order` (derivatives composed from the stencils). With
/// `horizontal_only` only tangential multi-indices enter.
double sobolev_norm_sq(const ScalarField& f, int order, bool horizontal_only = false,
                       const ScalarField* weight = nullptr, double weight_power = 0.0);
double sobolev_norm_sq(const VectorField& f, int order, bool horizontal_only = false,
                       const ScalarField* weight = nullptr, double weight_power = 0.0);

/// num / den where den may vanish on the vertical boundary. Boundary nodes
/// with den = 0 use the one-sided derivative quotient (d_v num)/(d_v den),
/// i.e. the L'Hopital limit; all other nodes use the plain quotient.
ScalarField divide_vanishing(const ScalarField& num, const ScalarField& den);

}  // namespace vacflow
