#include <cmath>

#include <gtest/gtest.h>

#include "vacflow/degenerate_parabolic.hpp"
#include "vacflow/errors.hpp"
#include "vacflow/harness.hpp"

using namespace vacflow;

namespace {

DensityProfile parabolic(const DiscreteDomain& dom) {
  return density_profile(ProfileKind::parabolic, ProfileParams{}, dom);
}

/// X*(x, t) = exp(-t) x(1-x) solves the frozen problem at eta = e with
/// rho0 = x(1-x) when G = (8 kappa - 1) exp(-t).
double mms_error(int dim, int n, XMethod method) {
  const double kappa = 0.1;
  const DiscreteDomain dom = build_domain(dim, 8, n);
  const int v = dom.vertical_axis();
  const auto exact = [&](double t) {
    return ScalarField::from_function(dom, [&](const Point& x) { return std::exp(-t) * x[v] * (1 - x[v]); });
  };
  const XForcing G = [&](double t) { return ScalarField(dom, (8 * kappa - 1) * std::exp(-t)); };
  const XProblem problem = frozen_x_problem(initial_state(VectorField(dom)), parabolic(dom), kappa, G, exact(0.0));
  const double h = 1.0 / (n - 1);
  XSolveOptions options;
  options.method = method;
  const XSolution sol = solve_x(problem, 4 * h * h, 0.5, options);
  return l2_norm(sol.X.back() - exact(0.5));
}

}  // namespace

TEST(DegenerateParabolic, XFromFlowExamples) {
  const DiscreteDomain dom = build_domain(3, 8, 17);
  const DensityProfile p = parabolic(dom);
  FlowState s = initial_state(VectorField(dom));
  EXPECT_EQ(x_from_flow(s, p).max_abs(), 0.0);
  s.v = VectorField::from_function(dom, [](const Point& x) { return Point{0, 0, x[2]}; });
  const ScalarField X = x_from_flow(s, p);
  for (std::size_t n = 0; n < dom.size(); ++n) ASSERT_NEAR(X[n], p.rho0[n], 1e-13);
}

TEST(DegenerateParabolic, XFromAffineFlow) {
  const DiscreteDomain dom = build_domain(1, 1, 33);
  const DensityProfile p = parabolic(dom);
  const AffineReference ref = affine_oracle(1.0, 1.0, 0.3, 0.2, 1e-4);
  const FlowState s = ref.state(dom, 0.2);
  const auto [r, rdot] = ref.at(0.2);
  const ScalarField X = x_from_flow(s, p);
  for (std::size_t n = 0; n < dom.size(); ++n) ASSERT_NEAR(X[n], p.rho0[n] * rdot / (r * r * r), 1e-13);
  EXPECT_LT((X - ref.X(dom, 0.2)).max_abs(), 1e-13);
}

TEST(DegenerateParabolic, ZeroDataStaysZero) {
  const DiscreteDomain dom = build_domain(2, 8, 17);
  const XProblem problem = frozen_x_problem(initial_state(VectorField(dom)), parabolic(dom), 0.1, {}, ScalarField(dom));
  const XSolution sol = solve_x(problem, 1e-2, 0.1);
  ASSERT_EQ(sol.X.size(), 11u);
  for (const ScalarField& X : sol.X) EXPECT_EQ(X.max_abs(), 0.0);
}

TEST(DegenerateParabolic, ManufacturedSolutionSecondOrder) {
  for (int dim : {1, 2}) {
    const double e1 = mms_error(dim, 33, XMethod::finite_difference);
    const double e2 = mms_error(dim, 65, XMethod::finite_difference);
    EXPECT_GT(std::log2(e1 / e2), 1.8) << "dim " << dim << " errors " << e1 << " " << e2;
  }
}

TEST(DegenerateParabolic, GalerkinMatchesManufacturedSolution) {
  EXPECT_LT(mms_error(1, 65, XMethod::galerkin), 1e-3);
}

TEST(DegenerateParabolic, WeightedEnergyDecays) {
  const DiscreteDomain dom = build_domain(2, 16, 33);
  const ScalarField X0 = ScalarField::from_function(
      dom, [](const Point& x) { return std::sin(M_PI * x[1]) * (1 + 0.5 * std::cos(2 * M_PI * x[0])); });
  FlowState s = initial_state(VectorField(dom));
  s.eta = smooth_test_map(dom, 0.05);
  const XSolution sol = solve_x(frozen_x_problem(s, parabolic(dom), 0.05, {}, X0), 1e-3, 0.1);
  for (std::size_t k = 1; k < sol.weighted_norm.size(); ++k) {
    ASSERT_LE(sol.weighted_norm[k], sol.weighted_norm[k - 1] * (1 + 1e-14)) << "step " << k;
  }
  EXPECT_LT(sol.weighted_norm.back(), sol.weighted_norm.front());
}

TEST(DegenerateParabolic, OperatorIsSymmetricPositive) {
  const DiscreteDomain dom = build_domain(2, 8, 17);
  FlowState s = initial_state(VectorField(dom));
  s.eta = smooth_test_map(dom, 0.05);
  const XOperator op = assemble_x_operator(frozen_x_problem(s, parabolic(dom), 0.1, {}, ScalarField(dom)));
  const Eigen::SparseMatrix<double> K = op.stiffness;
  const Eigen::SparseMatrix<double> Kt = K.transpose();
  EXPECT_LT((K - Kt).norm(), 1e-12 * K.norm());
  EXPECT_EQ(op.nodes.size(), dom.interior_size());
  EXPECT_GT(op.mass.minCoeff(), 0.0);
  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(K.rows(), 1.0, 2.0);
  EXPECT_GT(x.dot(K * x), 0.0);
}

TEST(DegenerateParabolic, Validation) {
  const DiscreteDomain dom = build_domain(1, 1, 17);
  const DensityProfile p = parabolic(dom);
  const FlowState s = initial_state(VectorField(dom));
  EXPECT_THROW(validate(frozen_x_problem(s, p, 0.0, {}, ScalarField(dom))), ValidationError);
  EXPECT_THROW(validate(frozen_x_problem(s, p, 0.1, {}, ScalarField(dom, 1.0))), ValidationError);
  EXPECT_NO_THROW(validate(frozen_x_problem(s, p, 0.1, {}, ScalarField(dom))));
  EXPECT_NEAR(min_eigenvalue(frozen_x_problem(s, p, 0.1, {}, ScalarField(dom)).B), 1.0, 1e-14);
}

TEST(DegenerateParabolic, ConsistencyZeroForStationaryState) {
  const DiscreteDomain dom = build_domain(2, 8, 17);
  const DensityProfile uniform = unchecked_profile(ScalarField(dom, 1.0), 2.0);
  std::vector<FlowState> samples;
  for (int k = 0; k < 3; ++k) {
    FlowState s = initial_state(VectorField(dom));
    s.time = 0.1 * k;
    samples.push_back(s);
  }
  for (double r : consistency_check(samples, uniform, 0.1)) EXPECT_LT(r, 1e-13);
}

TEST(DegenerateParabolic, ConsistencySecondOrderOnAffineFlow) {
  for (double kappa : {0.0, 0.01}) {
    const AffineReference ref = affine_oracle(1.0, 1.0, 0.5, 0.2, 1e-4, kappa);
    double res[3];
    for (int k = 0; k < 3; ++k) {
      const int n = (16 << k) + 1;
      const DiscreteDomain dom = build_domain(1, 1, n);
      const double h = 1.0 / (n - 1);
      std::vector<FlowState> samples;
      for (int j = -1; j <= 1; ++j) samples.push_back(ref.state(dom, 0.1 + j * h));
      res[k] = consistency_check(samples, parabolic(dom), kappa)[1];
    }
    const double hs[] = {1.0 / 16, 1.0 / 32, 1.0 / 64};
    EXPECT_GT(fit_order(hs, res), 1.8) << "kappa " << kappa << " residuals " << res[0] << " " << res[1] << " " << res[2];
  }
}
