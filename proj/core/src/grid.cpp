#include "vacflow/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "vacflow/errors.hpp"

namespace vacflow {

DiscreteDomain build_domain(int dim, int n_horizontal, int n_vertical) {
  if (dim < 1 || dim > 3) {
    throw ValidationError("build_domain: dim must be 1, 2 or 3 (got " + std::to_string(dim) + ")");
  }
  if (n_vertical < 4) {
    throw ValidationError("build_domain: n_vertical must be >= 4 (got " +
                          std::to_string(n_vertical) + ")");
  }
  if (dim > 1 && n_horizontal < 4) {
    throw ValidationError("build_domain: n_horizontal must be >= 4 (got " +
                          std::to_string(n_horizontal) + ")");
  }
  DiscreteDomain d;
  d.dim_ = dim;
  d.n_horizontal_ = dim > 1 ? n_horizontal : 1;
  d.n_vertical_ = n_vertical;
  std::size_t size = static_cast<std::size_t>(n_vertical);
  for (int a = 0; a < dim - 1; ++a) size *= static_cast<std::size_t>(n_horizontal);
  d.size_ = size;
  return d;
}

int DiscreteDomain::extent(int axis) const {
  if (axis < 0 || axis >= dim_) throw std::out_of_range("DiscreteDomain: invalid axis");
  return axis == dim_ - 1 ? n_vertical_ : n_horizontal_;
}

double DiscreteDomain::spacing(int axis) const {
  if (axis < 0 || axis >= dim_) throw std::out_of_range("DiscreteDomain: invalid axis");
  return axis == dim_ - 1 ? 1.0 / (n_vertical_ - 1) : 1.0 / n_horizontal_;
}

double DiscreteDomain::min_spacing() const {
  double h = spacing(vertical_axis());
  for (int a = 0; a < dim_ - 1; ++a) h = std::min(h, spacing(a));
  return h;
}

std::size_t DiscreteDomain::stride(int axis) const {
  std::size_t s = 1;
  for (int a = dim_ - 1; a > axis; --a) s *= static_cast<std::size_t>(extent(a));
  return s;
}

MultiIndex DiscreteDomain::index(std::size_t node) const {
  MultiIndex idx{0, 0, 0};
  for (int a = dim_ - 1; a >= 0; --a) {
    const auto n = static_cast<std::size_t>(extent(a));
    idx[static_cast<std::size_t>(a)] = static_cast<int>(node % n);
    node /= n;
  }
  return idx;
}

std::size_t DiscreteDomain::node(const MultiIndex& idx) const {
  std::size_t k = 0;
  for (int a = 0; a < dim_; ++a) {
    k = k * static_cast<std::size_t>(extent(a)) + static_cast<std::size_t>(idx[static_cast<std::size_t>(a)]);
  }
  return k;
}

std::size_t DiscreteDomain::shifted(std::size_t node, int axis, int offset) const {
  const int n = extent(axis);
  const std::size_t s = stride(axis);
  const int i = static_cast<int>((node / s) % static_cast<std::size_t>(n));
  int j = i + offset;
  if (periodic(axis)) j = ((j % n) + n) % n;
  return node + s * static_cast<std::size_t>(j) - s * static_cast<std::size_t>(i);
}

Point DiscreteDomain::coord(std::size_t node) const {
  const MultiIndex idx = index(node);
  Point x{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) x[static_cast<std::size_t>(a)] = idx[static_cast<std::size_t>(a)] * spacing(a);
  return x;
}

int DiscreteDomain::vertical_index(std::size_t node) const {
  return static_cast<int>(node % static_cast<std::size_t>(n_vertical_));
}

bool DiscreteDomain::on_boundary(std::size_t node) const {
  const int k = vertical_index(node);
  return k == 0 || k == n_vertical_ - 1;
}

double DiscreteDomain::quad_weight(std::size_t node) const {
  double w = spacing(vertical_axis());
  if (on_boundary(node)) w *= 0.5;
  for (int a = 0; a < dim_ - 1; ++a) w *= spacing(a);
  return w;
}

std::vector<double> DiscreteDomain::quadrature_weights() const {
  std::vector<double> w(size_);
  for (std::size_t k = 0; k < size_; ++k) w[k] = quad_weight(k);
  return w;
}

std::vector<std::size_t> DiscreteDomain::face_nodes(int face) const {
  std::vector<std::size_t> out;
  out.reserve(face_size());
  const std::size_t offset = face == 0 ? 0 : static_cast<std::size_t>(n_vertical_ - 1);
  for (std::size_t k = 0; k < face_size(); ++k) {
    out.push_back(k * static_cast<std::size_t>(n_vertical_) + offset);
  }
  return out;
}

// ---------------------------------------------------------------------------

ScalarField::ScalarField(const DiscreteDomain& domain, double fill)
    : domain_(domain), values_(domain.size(), fill) {}

ScalarField::ScalarField(const DiscreteDomain& domain, std::vector<double> values)
    : domain_(domain), values_(std::move(values)) {
  if (values_.size() != domain_.size()) {
    throw std::invalid_argument("ScalarField: value count does not match domain");
  }
}

ScalarField ScalarField::from_function(const DiscreteDomain& domain,
                                       const std::function<double(const Point&)>& f) {
  ScalarField out(domain);
  for (std::size_t k = 0; k < domain.size(); ++k) out.values_[k] = f(domain.coord(k));
  return out;
}

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double x : values_) m = std::max(m, std::abs(x));
  return m;
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

namespace {
void check_same(const DiscreteDomain& a, const DiscreteDomain& b) {
  if (!(a == b)) throw std::invalid_argument("field domains do not match");
}
}  // namespace

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  check_same(domain_, o.domain_);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
  check_same(domain_, o.domain_);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
  return *this;
}

ScalarField& ScalarField::operator*=(double s) {
  for (double& x : values_) x *= s;
  return *this;
}

ScalarField& ScalarField::operator*=(const ScalarField& o) {
  check_same(domain_, o.domain_);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] *= o.values_[k];
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(ScalarField a, double s) { return a *= s; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }
ScalarField operator*(ScalarField a, const ScalarField& b) { return a *= b; }
ScalarField operator-(ScalarField a) { return a *= -1.0; }

ScalarField map(const ScalarField& a, const std::function<double(double)>& f) {
  ScalarField out(a.domain());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = f(a[k]);
  return out;
}

VectorField::VectorField(const DiscreteDomain& domain, double fill)
    : domain_(domain), comps_(static_cast<std::size_t>(domain.dim()), ScalarField(domain, fill)) {}

VectorField VectorField::from_function(const DiscreteDomain& domain,
                                       const std::function<Point(const Point&)>& f) {
  VectorField out(domain);
  for (std::size_t k = 0; k < domain.size(); ++k) {
    const Point p = f(domain.coord(k));
    for (int c = 0; c < domain.dim(); ++c) out[c][k] = p[static_cast<std::size_t>(c)];
  }
  return out;
}

bool VectorField::all_finite() const {
  return std::all_of(comps_.begin(), comps_.end(), [](const ScalarField& c) { return c.all_finite(); });
}

double VectorField::max_abs() const {
  double m = 0.0;
  for (const auto& c : comps_) m = std::max(m, c.max_abs());
  return m;
}

VectorField& VectorField::operator+=(const VectorField& o) {
  for (std::size_t c = 0; c < comps_.size(); ++c) comps_[c] += o.comps_[c];
  return *this;
}

VectorField& VectorField::operator-=(const VectorField& o) {
  for (std::size_t c = 0; c < comps_.size(); ++c) comps_[c] -= o.comps_[c];
  return *this;
}

VectorField& VectorField::operator*=(double s) {
  for (auto& c : comps_) c *= s;
  return *this;
}

VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator*(VectorField a, double s) { return a *= s; }
VectorField operator*(double s, VectorField a) { return a *= s; }

TensorField::TensorField(const DiscreteDomain& domain, double fill)
    : domain_(domain),
      comps_(static_cast<std::size_t>(domain.dim() * domain.dim()), ScalarField(domain, fill)) {}

bool TensorField::all_finite() const {
  return std::all_of(comps_.begin(), comps_.end(), [](const ScalarField& c) { return c.all_finite(); });
}

double TensorField::max_abs() const {
  double m = 0.0;
  for (const auto& c : comps_) m = std::max(m, c.max_abs());
  return m;
}

// ---------------------------------------------------------------------------

ScalarField diff(const ScalarField& f, int axis, int order) {
  const DiscreteDomain& dom = f.domain();
  if (axis < 0 || axis >= dom.dim()) {
    throw std::invalid_argument("diff: axis " + std::to_string(axis) + " invalid for dim " +
                                std::to_string(dom.dim()));
  }
  if (order != 1 && order != 2) throw std::invalid_argument("diff: order must be 1 or 2");

  const double h = dom.spacing(axis);
  const int n = dom.extent(axis);
  const std::size_t s = dom.stride(axis);
  const bool periodic = dom.periodic(axis);
  ScalarField out(dom);

  for (std::size_t k = 0; k < dom.size(); ++k) {
    const int i = static_cast<int>((k / s) % static_cast<std::size_t>(n));
    const std::size_t base = k - s * static_cast<std::size_t>(i);
    auto at = [&](int j) {
      if (periodic) j = ((j % n) + n) % n;
      return f[base + s * static_cast<std::size_t>(j)];
    };
    double val;
    if (periodic || (i > 0 && i < n - 1)) {
      val = order == 1 ? (at(i + 1) - at(i - 1)) / (2.0 * h)
                       : (at(i + 1) - 2.0 * at(i) + at(i - 1)) / (h * h);
    } else if (i == 0) {
      val = order == 1 ? (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h)
                       : (2.0 * at(0) - 5.0 * at(1) + 4.0 * at(2) - at(3)) / (h * h);
    } else {
      val = order == 1 ? (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h)
                       : (2.0 * at(n - 1) - 5.0 * at(n - 2) + 4.0 * at(n - 3) - at(n - 4)) / (h * h);
    }
    out[k] = val;
  }
  return out;
}

VectorField diff(const VectorField& f, int axis, int order) {
  VectorField out(f.domain());
  for (int c = 0; c < f.dim(); ++c) out[c] = diff(f[c], axis, order);
  return out;
}

ScalarField derivative(const ScalarField& f, const MultiIndex& alpha) {
  ScalarField out = f;
  for (int a = 0; a < f.domain().dim(); ++a) {
    const int m = alpha[static_cast<std::size_t>(a)];
    for (int r = 0; r < m / 2; ++r) out = diff(out, a, 2);
    if (m % 2 == 1) out = diff(out, a, 1);
  }
  return out;
}

VectorField gradient(const ScalarField& f) {
  VectorField out(f.domain());
  for (int j = 0; j < f.domain().dim(); ++j) out[j] = diff(f, j, 1);
  return out;
}

TensorField jacobian(const VectorField& f) {
  TensorField out(f.domain());
  for (int j = 0; j < f.dim(); ++j) {
    for (int i = 0; i < f.dim(); ++i) out(i, j) = diff(f[i], j, 1);
  }
  return out;
}

std::vector<MultiIndex> multi_indices(int dim, int max_order, bool horizontal_only) {
  const int axes = horizontal_only ? dim - 1 : dim;
  std::vector<MultiIndex> out;
  for (int total = 0; total <= max_order; ++total) {
    // lexicographic enumeration of alpha with |alpha| == total over `axes` axes
    MultiIndex a{0, 0, 0};
    auto rec = [&](auto&& self, int axis, int remaining) -> void {
      if (axis == axes - 1 || axes == 0) {
        if (axes == 0) {
          if (remaining == 0) out.push_back(a);
          return;
        }
        a[static_cast<std::size_t>(axis)] = remaining;
        out.push_back(a);
        a[static_cast<std::size_t>(axis)] = 0;
        return;
      }
      for (int m = remaining; m >= 0; --m) {
        a[static_cast<std::size_t>(axis)] = m;
        self(self, axis + 1, remaining - m);
      }
      a[static_cast<std::size_t>(axis)] = 0;
    };
    rec(rec, 0, total);
  }
  return out;
}

double integrate(const ScalarField& f) {
  const DiscreteDomain& dom = f.domain();
  double sum = 0.0;
  for (std::size_t k = 0; k < dom.size(); ++k) sum += f[k] * dom.quad_weight(k);
  return sum;
}

double inner(const ScalarField& f, const ScalarField& g) {
  const DiscreteDomain& dom = f.domain();
  double sum = 0.0;
  for (std::size_t k = 0; k < dom.size(); ++k) sum += f[k] * g[k] * dom.quad_weight(k);
  return sum;
}

double l2_norm(const ScalarField& f) { return std::sqrt(inner(f, f)); }

double l2_norm(const VectorField& f) {
  double s = 0.0;
  for (int c = 0; c < f.dim(); ++c) s += inner(f[c], f[c]);
  return std::sqrt(s);
}

namespace {

double weighted_sq(const ScalarField& f, const ScalarField* weight, double power) {
  const DiscreteDomain& dom = f.domain();
  double sum = 0.0;
  for (std::size_t k = 0; k < dom.size(); ++k) {
    double w = 1.0;
    if (weight != nullptr && power != 0.0) w = std::pow((*weight)[k], power);
    sum += w * f[k] * f[k] * dom.quad_weight(k);
  }
  return sum;
}

void check_weight(const ScalarField& weight) {
  for (double w : weight.values()) {
    if (w < 0.0) throw std::invalid_argument("weighted_norm: negative weight entry");
  }
}

}  // namespace

double sobolev_norm_sq(const ScalarField& f, int order, bool horizontal_only,
                       const ScalarField* weight, double weight_power) {
  if (order < 0) throw std::invalid_argument("sobolev_norm_sq: negative order");
  double sum = 0.0;
  for (const MultiIndex& alpha : multi_indices(f.domain().dim(), order, horizontal_only)) {
    sum += weighted_sq(derivative(f, alpha), weight, weight_power);
  }
  return sum;
}

double sobolev_norm_sq(const VectorField& f, int order, bool horizontal_only,
                       const ScalarField* weight, double weight_power) {
  double sum = 0.0;
  for (int c = 0; c < f.dim(); ++c) sum += sobolev_norm_sq(f[c], order, horizontal_only, weight, weight_power);
  return sum;
}

double weighted_norm(const ScalarField& f, const ScalarField& weight, int weight_power,
                     int derivative_order) {
  if (weight_power < 0) throw std::invalid_argument("weighted_norm: weight_power must be >= 0");
  if (derivative_order < 0 || derivative_order > 2) {
    throw std::invalid_argument("weighted_norm: derivative_order must be in [0, 2]");
  }
  check_weight(weight);
  return std::sqrt(sobolev_norm_sq(f, derivative_order, false, &weight, weight_power));
}

double weighted_norm(const VectorField& f, const ScalarField& weight, int weight_power,
                     int derivative_order) {
  if (weight_power < 0) throw std::invalid_argument("weighted_norm: weight_power must be >= 0");
  if (derivative_order < 0 || derivative_order > 2) {
    throw std::invalid_argument("weighted_norm: derivative_order must be in [0, 2]");
  }
  check_weight(weight);
  return std::sqrt(sobolev_norm_sq(f, derivative_order, false, &weight, weight_power));
}

ScalarField divide_vanishing(const ScalarField& num, const ScalarField& den) {
  const DiscreteDomain& dom = num.domain();
  const int v = dom.vertical_axis();
  const ScalarField dnum = diff(num, v, 1);
  const ScalarField dden = diff(den, v, 1);
  ScalarField out(dom);
  for (std::size_t k = 0; k < dom.size(); ++k) {
    out[k] = dom.on_boundary(k) && den[k] == 0.0 ? dnum[k] / dden[k] : num[k] / den[k];
  }
  return out;
}

}  // namespace vacflow
