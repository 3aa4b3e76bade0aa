#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "vacflow/grid.hpp"

namespace vacflow {

/// p = c_gamma rho^gamma.
struct EosParams {
  double gamma = 2.0;
  double c_gamma = 1.0;
};

enum class ProfileKind { parabolic, linear_ramp, custom };

const char* to_string(ProfileKind kind);
ProfileKind profile_kind_from_string(const std::string& name);

struct ProfileParams {
  double gamma = 2.0;
  /// Slope of rho0^{gamma-1} at the faces (parabolic: rho0^{gamma-1} = c x(1-x)).
  double c = 1.0;
  /// parabolic only: rho0 = (c x(1-x))^{degeneracy/(gamma-1)}. Values other
  /// than 1 violate the physical vacuum condition (0: no vacuum, 2: too fast).
  double degeneracy = 1.0;
  /// linear_ramp: rho0^{gamma-1} = c min(d, width).
  double width = 0.25;
  /// custom: rho0 as a function of the node coordinates.
  std::function<double(const Point&)> custom;
};

/// Closed-form vertical profile rho0(x_v) and its derivative, available for
/// the built-in kinds. drho may be unbounded at the faces when gamma > 2.
struct AnalyticProfile {
  std::function<double(double)> rho;
  std::function<double(double)> drho;
};

/// Result of the physical-vacuum check on one face.
struct VacuumFaceReport {
  int face = 0;
  /// min over the two nearest node layers of rho0^{gamma-1} / d.
  double constant_estimate = 0.0;
  /// log2(q(2h)/q(h)) for q = rho0^{gamma-1}, face-maximum: 1 for linear
  /// vanishing. Faces are accepted for orders in [0.5, 1.5].
  double vanishing_order = 0.0;
  /// Outward normal derivative of rho0^{gamma-1} (one-sided stencil), face-maximum.
  double normal_derivative = 0.0;
  bool ok = false;
  std::string failure;
};

/// Initial density with distance function and adiabatic exponent.
///
/// Invariants (checked by density_profile / check_physical_vacuum):
/// rho0 > 0 inside, rho0 = 0 on Gamma, rho0^{gamma-1} vanishes linearly in d
/// with d(rho0^{gamma-1})/dN < 0 on both faces.
struct DensityProfile {
  ScalarField rho0;
  VectorField grad_rho0;
  ScalarField d;
  double gamma = 2.0;
  ProfileKind kind = ProfileKind::custom;
  std::optional<AnalyticProfile> analytic;

  const DiscreteDomain& domain() const { return rho0.domain(); }

  /// rho0 at an arbitrary vertical coordinate (analytic when available,
  /// otherwise linear interpolation of the nodal values along the column of
  /// `node`).
  double rho_at(std::size_t node, double x_vertical) const;
};

/// Builds and validates a profile; throws ValidationError naming the failing
/// face if the physical vacuum condition is violated.
DensityProfile density_profile(ProfileKind kind, const ProfileParams& params,
                               const DiscreteDomain& domain);

/// Validated profile from a nodal density field (kind custom).
DensityProfile profile_from_field(const ScalarField& rho0, double gamma);

/// Wraps a user density field without validation (tests and diagnostics on
/// non-vacuum states).
DensityProfile unchecked_profile(const ScalarField& rho0, double gamma);

/// Nonthrowing validator; one report per face.
std::pair<VacuumFaceReport, VacuumFaceReport> check_physical_vacuum(const ScalarField& rho0,
                                                                    double gamma);
/// Throws ValidationError if either face fails.
void require_physical_vacuum(const ScalarField& rho0, double gamma);

/// Exact slab distance d = min(x_v, 1 - x_v).
ScalarField distance_to_boundary(const DiscreteDomain& domain);

double pressure(double rho, const EosParams& eos);
ScalarField pressure(const ScalarField& rho, const EosParams& eos);
double sound_speed_sq(double rho, const EosParams& eos);
ScalarField sound_speed_sq(const ScalarField& rho, const EosParams& eos);

/// Gaussian smoothing (standard deviation `radius`) of the initial data:
/// periodic horizontally; vertically u0 is reflected evenly and
/// rho0^{gamma-1} oddly, so the smoothed density still vanishes linearly.
/// The smoothed rho0 is clamped to 0 on Gamma and revalidated.
std::pair<VectorField, ScalarField> mollify_initial_data(const VectorField& u0,
                                                         const ScalarField& rho0, double radius,
                                                         double gamma = 2.0);

}  // namespace vacflow
