#include <cmath>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "vacflow/geometry.hpp"
#include "vacflow/harness.hpp"

using namespace vacflow;

namespace {

/// Maps such as 2x_1 are not maps of the torus; their horizontal stencils are
/// only meaningful away from the seam.
bool away_from_seam(const DiscreteDomain& dom, std::size_t node) {
  const MultiIndex idx = dom.index(node);
  for (int a = 0; a < dom.dim() - 1; ++a) {
    if (idx[a] == 0 || idx[a] == dom.extent(a) - 1) return false;
  }
  return true;
}

VectorField map_of(const DiscreteDomain& dom, const std::function<Point(const Point&)>& f) {
  return VectorField::from_function(dom, f);
}

}  // namespace

TEST(Geometry, IdentitySnapshot) {
  const DiscreteDomain dom = build_domain(3, 8, 9);
  const GeometrySnapshot s = snapshot(identity_map(dom));
  ASSERT_TRUE(s.valid);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double expected = i == j ? 1.0 : 0.0;
      for (std::size_t n = 0; n < dom.size(); ++n) {
        ASSERT_NEAR(s.D_eta(i, j)[n], expected, 1e-13);
        ASSERT_NEAR(s.a(i, j)[n], expected, 1e-13);
        ASSERT_NEAR(s.A(i, j)[n], expected, 1e-13);
      }
    }
  }
  EXPECT_NEAR(s.J_min, 1.0, 1e-13);
  EXPECT_NEAR(s.J_max, 1.0, 1e-13);
}

TEST(Geometry, DiagonalScaling) {
  const DiscreteDomain dom = build_domain(3, 8, 9);
  const GeometrySnapshot s =
      snapshot(map_of(dom, [](const Point& x) { return Point{2 * x[0], 3 * x[1], 4 * x[2]}; }));
  const double diag[] = {12.0, 8.0, 6.0};
  for (std::size_t n = 0; n < dom.size(); ++n) {
    if (!away_from_seam(dom, n)) continue;
    ASSERT_NEAR(s.J[n], 24.0, 1e-12);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) ASSERT_NEAR(s.a(i, j)[n], i == j ? diag[i] : 0.0, 1e-12);
    }
  }
}

TEST(Geometry, JacobianMatchesDeterminantOracle) {
  const DiscreteDomain dom = build_domain(3, 16, 17);
  const VectorField eta = map_of(dom, [](const Point& x) {
    return Point{x[0] + 0.01 * std::sin(2 * M_PI * x[0]) + 0.02 * x[2] * x[2], x[1] + 0.03 * std::cos(2 * M_PI * x[0]),
                 x[2] + 0.05 * x[2] * (1 - x[2]) * std::sin(2 * M_PI * x[1])};
  });
  const GeometrySnapshot s = snapshot(eta);
  for (std::size_t n = 0; n < dom.size(); ++n) {
    Eigen::Matrix3d M;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) M(i, j) = s.D_eta(i, j)[n];
    }
    ASSERT_NEAR(s.J[n], M.determinant(), 1e-13);
    const Eigen::Matrix3d inv = M.inverse();
    for (int k = 0; k < 3; ++k) {
      for (int i = 0; i < 3; ++i) ASSERT_NEAR(s.A(k, i)[n], inv(k, i), 1e-12);
    }
  }
  EXPECT_LT(cofactor_identity_defect(s), 1e-14);
}

TEST(Geometry, PiolaVanishesForAffineMaps) {
  const DiscreteDomain dom = build_domain(3, 8, 9);
  const GeometrySnapshot id = snapshot(identity_map(dom));
  EXPECT_LT(piola_residual(id).max_abs(), 1e-12);
  const GeometrySnapshot shear = snapshot(map_of(dom, [](const Point& x) {
    return Point{x[0] + 0.3 * x[2] + 0.1, x[1] - 0.2 * x[2], 1.5 * x[2] + 0.25};
  }));
  EXPECT_LT(piola_residual(shear).max_abs(), 1e-11);
}

TEST(Geometry, PiolaResidualSecondOrder) {
  double err[3];
  double h[3];
  for (int k = 0; k < 3; ++k) {
    const int n = 12 << k;
    const DiscreteDomain dom = build_domain(3, n, n + 1);
    err[k] = l2_norm(piola_residual(snapshot(smooth_test_map(dom, 0.05))));
    h[k] = 1.0 / n;
  }
  EXPECT_GT(err[0], 1e-6);
  EXPECT_GE(fit_order(h, err), 1.8);
}

TEST(Geometry, PiolaVanishesForTwoVariableMaps) {
  const DiscreteDomain dom = build_domain(3, 16, 17);
  const VectorField eta = map_of(dom, [](const Point& x) {
    return Point{x[0] + 0.05 * std::sin(2 * M_PI * x[0]) * x[2] * (1 - x[2]), x[1], x[2] + 0.05 * std::sin(2 * M_PI * x[0])};
  });
  EXPECT_LT(piola_residual(snapshot(eta)).max_abs(), 1e-12);
}

TEST(Geometry, LagrangianDivergence) {
  const DiscreteDomain dom = build_domain(3, 8, 9);
  const GeometrySnapshot id = snapshot(identity_map(dom));
  const VectorField w = map_of(dom, [](const Point& x) { return x; });
  const ScalarField div = lagrangian_div(id, w);
  for (std::size_t n = 0; n < dom.size(); ++n) {
    if (away_from_seam(dom, n)) {
      ASSERT_NEAR(div[n], 3.0, 1e-12);
    }
  }
  const GeometrySnapshot twice = snapshot(map_of(dom, [](const Point& x) { return Point{2 * x[0], 2 * x[1], 2 * x[2]}; }));
  const VectorField w1 = map_of(dom, [](const Point& x) { return Point{x[0], 0, 0}; });
  const ScalarField half = lagrangian_div(twice, w1);
  for (std::size_t n = 0; n < dom.size(); ++n) {
    if (away_from_seam(dom, n)) {
      ASSERT_NEAR(half[n], 0.5, 1e-12);
    }
  }
}

TEST(Geometry, LagrangianDivergenceMatchesEulerianAtIdentity) {
  const DiscreteDomain dom = build_domain(2, 16, 17);
  const VectorField w = map_of(dom, [](const Point& x) {
    return Point{std::sin(2 * M_PI * x[0]) * x[1], x[1] * x[1] * std::cos(2 * M_PI * x[0]), 0};
  });
  const ScalarField div = lagrangian_div(snapshot(identity_map(dom)), w);
  const ScalarField euler = diff(w[0], 0) + diff(w[1], 1);
  EXPECT_LT((div - euler).max_abs(), 1e-13);
}

TEST(Geometry, LagrangianCurlOfRotation) {
  const DiscreteDomain dom = build_domain(3, 8, 9);
  const VectorField w = map_of(dom, [](const Point& x) { return Point{-x[1], x[0], 0}; });
  const VectorField c1 = lagrangian_curl(snapshot(identity_map(dom)), w);
  const VectorField c2 =
      lagrangian_curl(snapshot(map_of(dom, [](const Point& x) { return Point{2 * x[0], 2 * x[1], 2 * x[2]}; })), w);
  for (std::size_t n = 0; n < dom.size(); ++n) {
    if (!away_from_seam(dom, n)) continue;
    ASSERT_NEAR(c1[0][n], 0.0, 1e-12);
    ASSERT_NEAR(c1[1][n], 0.0, 1e-12);
    ASSERT_NEAR(c1[2][n], 2.0, 1e-12);
    ASSERT_NEAR(c2[2][n], 1.0, 1e-12);
  }
}

TEST(Geometry, CurlOfGradientIsSecondOrderSmall) {
  double err[2];
  for (int k = 0; k < 2; ++k) {
    const int n = 16 << k;
    const DiscreteDomain dom = build_domain(3, n, n + 1);
    const auto phi = ScalarField::from_function(dom, [](const Point& x) { return std::sin(2 * M_PI * x[0]); });
    err[k] = l2_norm(lagrangian_curl(snapshot(identity_map(dom)), gradient(phi)));
  }
  EXPECT_LT(err[0], 1e-12);
  EXPECT_LT(err[1], 1e-12);
}

TEST(Geometry, CofactorRateExamples) {
  const DiscreteDomain dom = build_domain(3, 8, 9);
  const GeometrySnapshot id = snapshot(identity_map(dom));
  EXPECT_EQ(cofactor_rate(id, VectorField(dom)).max_abs(), 0.0);
  const VectorField v = map_of(dom, [](const Point& x) { return Point{x[0], 0, 0}; });
  const TensorField rate = cofactor_rate(id, v);
  const double diag[] = {0.0, 1.0, 1.0};
  for (std::size_t n = 0; n < dom.size(); ++n) {
    if (!away_from_seam(dom, n)) continue;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) ASSERT_NEAR(rate(i, j)[n], i == j ? diag[i] : 0.0, 1e-12);
    }
  }
}

TEST(Geometry, RatesMatchFiniteDifferenceInTime) {
  const DiscreteDomain dom = build_domain(3, 12, 13);
  const VectorField eta = smooth_test_map(dom, 0.05);
  const VectorField v = smooth_test_velocity(dom);
  const GeometrySnapshot s = snapshot(eta);
  const double tau = 1e-4;
  const GeometrySnapshot plus = snapshot(eta + tau * v);
  const GeometrySnapshot minus = snapshot(eta - tau * v);
  const TensorField arate = cofactor_rate(s, v);
  const TensorField Arate = inverse_rate(s, v);
  const ScalarField Jrate = jacobian_rate(s, v);
  double scale_a = 0.0;
  double err_a = 0.0;
  double err_A = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const ScalarField fd_a = (plus.a(i, j) - minus.a(i, j)) * (0.5 / tau);
      const ScalarField fd_A = (plus.A(i, j) - minus.A(i, j)) * (0.5 / tau);
      scale_a = std::max(scale_a, fd_a.max_abs());
      err_a = std::max(err_a, (fd_a - arate(i, j)).max_abs());
      err_A = std::max(err_A, (fd_A - Arate(i, j)).max_abs());
    }
  }
  const ScalarField fd_J = (plus.J - minus.J) * (0.5 / tau);
  EXPECT_LE(err_a / scale_a, 1e-5);
  EXPECT_LE(err_A / scale_a, 1e-5);
  EXPECT_LE((fd_J - Jrate).max_abs() / fd_J.max_abs(), 1e-5);
}

TEST(Geometry, CurlCurlResidual) {
  const DiscreteDomain dom0 = build_domain(3, 8, 9);
  EXPECT_EQ(curlcurl_identity_residual(snapshot(identity_map(dom0)), VectorField(dom0)).max_abs(), 0.0);
  for (int n : {8, 16, 32}) {
    const DiscreteDomain dom = build_domain(3, n, n + 1);
    const VectorField flat = curlcurl_identity_residual(snapshot(identity_map(dom)), smooth_test_velocity(dom));
    EXPECT_LT(flat[0].max_abs() + flat[1].max_abs() + flat[2].max_abs(), 1e-12) << "n=" << n;
  }
}

TEST(Geometry, IdentitySuitePasses) {
  for (const IdentityCheck& c : check_identities(3, 16)) {
    EXPECT_TRUE(c.pass) << c.name << " " << c.value << " " << c.detail;
  }
  for (const IdentityCheck& c : check_identities(2, 8)) {
    EXPECT_TRUE(c.pass) << c.name << " " << c.value << " " << c.detail;
  }
}

TEST(Geometry, BoundaryNormalsAtIdentity) {
  const DiscreteDomain dom = build_domain(2, 8, 9);
  const GeometrySnapshot s = snapshot(identity_map(dom));
  ASSERT_EQ(s.n.values.size(), 16u);
  for (std::size_t k = 0; k < s.n.values.size(); ++k) {
    const double expected = s.n.face[k] == 0 ? -1.0 : 1.0;
    EXPECT_NEAR(s.n.values[k][1], expected, 1e-14);
    EXPECT_NEAR(s.n.values[k][0], 0.0, 1e-14);
    EXPECT_NEAR(s.sqrt_g.values[k], 1.0, 1e-14);
  }
}
