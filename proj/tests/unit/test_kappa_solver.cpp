#include <cmath>

#include <gtest/gtest.h>

#include "vacflow/errors.hpp"
#include "vacflow/harness.hpp"
#include "vacflow/kappa_solver.hpp"

using namespace vacflow;

namespace {

DensityProfile parabolic(const DiscreteDomain& dom, double gamma = 2.0) {
  ProfileParams params;
  params.gamma = gamma;
  return density_profile(ProfileKind::parabolic, params, dom);
}

}  // namespace

TEST(KappaSolver, ForceFieldAtIdentity) {
  const DiscreteDomain dom = build_domain(3, 8, 17);
  const DensityProfile p = parabolic(dom);
  const VectorField w = force_field(initial_state(VectorField(dom)), p);
  for (std::size_t n = 0; n < dom.size(); ++n) {
    const double x = dom.coord(n)[2];
    ASSERT_NEAR(w[0][n], 0.0, 1e-14);
    ASSERT_NEAR(w[1][n], 0.0, 1e-14);
    ASSERT_NEAR(w[2][n], 2 * x * (1 - x) * (1 - 2 * x), 0.02);
  }
}

TEST(KappaSolver, ForceFieldConvergesOnAffineMap) {
  double err[2];
  for (int k = 0; k < 2; ++k) {
    const int n = (32 << k) + 1;
    const DiscreteDomain dom = build_domain(1, 1, n);
    const DensityProfile p = parabolic(dom);
    const double r = 1.3;
    FlowState s = initial_state(VectorField(dom));
    s.eta = VectorField::from_function(dom, [r](const Point& x) { return Point{0.5 + r * (x[0] - 0.5), 0, 0}; });
    const VectorField w = force_field(s, p);
    double e = 0.0;
    for (std::size_t i = 0; i < dom.size(); ++i) {
      const double x = dom.coord(i)[0];
      e = std::max(e, std::abs(w[0][i] + 4 * x * (1 - x) * (x - 0.5) / (r * r)));
    }
    err[k] = e;
  }
  EXPECT_LT(err[1], err[0] / 3.5);
}

TEST(KappaSolver, ConstantDensityGivesZeroForce) {
  const DiscreteDomain dom = build_domain(2, 8, 9);
  const DensityProfile p = unchecked_profile(ScalarField(dom, 0.5), 2.0);
  EXPECT_LT(force_field(initial_state(VectorField(dom)), p).max_abs(), 1e-14);
}

TEST(KappaSolver, FirstStepFromRest) {
  const DiscreteDomain dom = build_domain(1, 1, 65);
  const DensityProfile p = parabolic(dom);
  SolverConfig cfg;
  const double dt = 1e-3;
  const FlowState s1 = step(initial_state(VectorField(dom)), p, cfg, dt);
  for (std::size_t n = 0; n < dom.size(); ++n) {
    const double x = dom.coord(n)[0];
    ASSERT_NEAR(s1.v[0][n], -dt * 2 * (1 - 2 * x), 1e-13);
  }
  EXPECT_GT(s1.v[0][64], 0.0);
  EXPECT_LT(s1.v[0][0], 0.0);
  EXPECT_DOUBLE_EQ(s1.time, dt);
}

TEST(KappaSolver, InitialAccelerationWithViscosity) {
  const double kappa = 0.05;
  double err[2];
  for (int k = 0; k < 2; ++k) {
    const DiscreteDomain dom = build_domain(1, 1, (64 << k) + 1);
    const DensityProfile p = parabolic(dom);
    const VectorField u0 =
        VectorField::from_function(dom, [](const Point& x) { return Point{0.1 * std::cos(M_PI * x[0]), 0, 0}; });
    const VectorField vt = acceleration(initial_state(u0), p, kappa);
    double e = 0.0;
    for (std::size_t n = 0; n < dom.size(); ++n) {
      const double x = dom.coord(n)[0];
      const double rho = x * (1 - x);
      const double drho = 1 - 2 * x;
      const double du = -0.1 * M_PI * std::sin(M_PI * x);
      const double ddu = -0.1 * M_PI * M_PI * std::cos(M_PI * x);
      const double expected = 4 * kappa * drho * du + 2 * kappa * rho * ddu - 2 * drho;
      e = std::max(e, std::abs(vt[0][n] - expected));
    }
    err[k] = e;
  }
  EXPECT_LT(err[0], 1e-2);
  EXPECT_GT(err[0] / err[1], 3.5);
}

TEST(KappaSolver, ForceFormsAgreeToSecondOrder) {
  double diff_[2];
  for (int k = 0; k < 2; ++k) {
    const DiscreteDomain dom = build_domain(2, 16 << k, (16 << k) + 1);
    const DensityProfile p = parabolic(dom);
    FlowState s = initial_state(VectorField(dom));
    s.eta = smooth_test_map(dom, 0.05);
    const VectorField a = acceleration(s, p, 0.0, ForceForm::divided);
    const VectorField b = acceleration(s, p, 0.0, ForceForm::conservative);
    diff_[k] = window_l2_norm(a - b, 0.25);
  }
  EXPECT_GT(diff_[0] / diff_[1], 3.0);
  EXPECT_EQ(force_form_from_string(to_string(ForceForm::conservative)), ForceForm::conservative);
  EXPECT_THROW(force_form_from_string("other"), ValidationError);
}

TEST(KappaSolver, StableDtExamples) {
  const DiscreteDomain dom = build_domain(1, 1, 101);
  const DensityProfile p = parabolic(dom);
  const FlowState s = initial_state(VectorField(dom));
  SolverConfig cfg;
  cfg.cfl_number = 0.5;
  EXPECT_NEAR(stable_dt(s, p, cfg), 0.5 * 0.01 / std::sqrt(0.5), 1e-15);
  cfg.kappa = 1.0;
  EXPECT_NEAR(stable_dt(s, p, cfg), 0.5 * 1e-4 / (2 * 1.0 * 0.5), 1e-17);
  cfg.kappa = 0.0;
  FlowState moving = s;
  moving.v = VectorField(dom, 3.0);
  EXPECT_EQ(stable_dt(moving, p, cfg), stable_dt(s, p, cfg));
}

TEST(KappaSolver, RunWithZeroEndTime) {
  const DiscreteDomain dom = build_domain(1, 1, 33);
  SolverConfig cfg;
  cfg.t_end = 0.0;
  const Trajectory tr = run(VectorField(dom), parabolic(dom), cfg);
  ASSERT_EQ(tr.samples.size(), 1u);
  EXPECT_EQ(tr.steps, 0u);
  EXPECT_EQ(tr.samples[0].time, 0.0);
  EXPECT_EQ(tr.reports.size(), 1u);
}

TEST(KappaSolver, SamplingStride) {
  const DiscreteDomain dom = build_domain(1, 1, 33);
  SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 0.01;
  cfg.snapshot_stride = 3;
  cfg.energy_reports = false;
  const Trajectory tr = run(VectorField(dom), parabolic(dom), cfg);
  EXPECT_EQ(tr.steps, 10u);
  ASSERT_EQ(tr.samples.size(), 5u);
  EXPECT_NEAR(tr.samples.back().time, 0.01, 1e-15);
  for (std::size_t k = 1; k < tr.samples.size(); ++k) EXPECT_GT(tr.samples[k].time, tr.samples[k - 1].time);
  EXPECT_TRUE(tr.reports.empty());
}

TEST(KappaSolver, AffineDataStaysAffine) {
  double err[2];
  for (int k = 0; k < 2; ++k) {
    const DiscreteDomain dom = build_domain(1, 1, (64 << k) + 1);
    const DensityProfile p = parabolic(dom);
    SolverConfig cfg;
    cfg.t_end = 0.1;
    cfg.energy_reports = false;
    const VectorField u0 = VectorField::from_function(dom, [](const Point& x) { return Point{0.5 * (x[0] - 0.5), 0, 0}; });
    const Trajectory tr = run(u0, p, cfg);
    const AffineReference ref = affine_oracle(1.0, 1.0, 0.5, 0.1, 1e-5);
    const FlowState exact = ref.state(dom, tr.samples.back().time);
    err[k] = l2_norm(tr.samples.back().eta - exact.eta);
  }
  EXPECT_LT(err[0], 1e-4);
  EXPECT_GT(err[0] / err[1], 3.5);
}

TEST(KappaSolver, AbortCarriesPartialTrajectory) {
  const DiscreteDomain dom = build_domain(1, 1, 33);
  SolverConfig cfg;
  cfg.dt = 0.5;
  cfg.t_end = 5.0;
  cfg.energy_reports = false;
  const VectorField u0 = VectorField::from_function(dom, [](const Point& x) { return Point{-4 * (x[0] - 0.5), 0, 0}; });
  try {
    run(u0, parabolic(dom), cfg);
    FAIL() << "expected SolverAbort";
  } catch (const SolverAbort& e) {
    ASSERT_NE(e.partial(), nullptr);
    EXPECT_GE(e.partial()->samples.size(), 1u);
    EXPECT_GT(e.time(), 0.0);
  }
}

TEST(KappaSolver, ConfigValidation) {
  SolverConfig cfg;
  EXPECT_NO_THROW(validate(cfg));
  cfg.kappa = -1;
  EXPECT_THROW(validate(cfg), ValidationError);
  cfg = {};
  cfg.gamma = 1.0;
  EXPECT_THROW(validate(cfg), ValidationError);
  cfg = {};
  cfg.cfl_number = 1.5;
  EXPECT_THROW(validate(cfg), ValidationError);
  cfg = {};
  cfg.snapshot_stride = 0;
  EXPECT_THROW(validate(cfg), ValidationError);
}
