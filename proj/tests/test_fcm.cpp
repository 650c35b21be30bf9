#include <gtest/gtest.h>

#include <cmath>

#include "geostretch/acceptance.hpp"
#include "geostretch/fcm.hpp"
#include "geostretch/geodesics.hpp"

using namespace geostretch;

namespace {

FcmSliceConfig slice_x1(double x1, double lo, double hi) {
  FcmSliceConfig c;
  c.base = Vector{{x1, 0.0}};
  c.search_index = 1;
  c.lo = lo;
  c.hi = hi;
  return c;
}

// f = (1, u^3 + 2), u = x1 - x2: Psi = -3 u^2 (1 + u^3), a double root at x2 = x1.
struct Touch {
  template <class S>
  void operator()(std::span<const S> x, std::span<S> out) const {
    const S u = x[0] - x[1];
    out[0] = S(1.0);
    out[1] = u * u * u + S(2.0);
  }
};

}  // namespace

TEST(CovariantFlowDerivative, Examples) {
  const auto lin = linear_model(3.0);
  EXPECT_TRUE(covariant_flow_derivative(lin, Vector{{1.0, 0.0}}, 1).isApprox(Vector{{25.0, -24.0}}));
  acceptance::Sampler rng(47);
  for (const auto& m : acceptance::builtin_models()) {
    const Vector x = rng.in_box(acceptance::sample_box(m.id()));
    EXPECT_EQ(covariant_flow_derivative(m, x, 0), m.eval(x));
  }
  const auto c = constant_model({1.0, -2.0});
  for (int k = 1; k < 4; ++k) EXPECT_EQ(covariant_flow_derivative(c, Vector{{0.3, 0.1}}, k).norm(), 0.0);
  EXPECT_THROW(covariant_flow_derivative(lin, Vector{{1.0, 0.0}}, -1), ParameterError);
}

TEST(CovariantFlowDerivative, RecursionIsJacobianTimesField) {
  acceptance::Sampler rng(53);
  for (const auto& m : acceptance::builtin_models()) {
    const Vector x = rng.in_box(acceptance::sample_box(m.id()));
    const Vector expect = eval_jets(m, x, 1).jacobian * m.eval(x);
    EXPECT_LE((covariant_flow_derivative(m, x, 1) - expect).norm(), 1e-12 * std::max(1.0, expect.norm())) << m.id();
  }
}

TEST(CovariantFlowDerivative, CallbackModelLacksDepth) {
  const auto m = VectorFieldModel::from_callbacks("plain", {"x", "y"}, [](std::span<const double> x, std::span<double> o) {
    o[0] = -x[0];
    o[1] = -x[1];
  });
  EXPECT_THROW(flow_matrix(m, Vector{{1.0, 1.0}}), CapabilityError);
}

TEST(Psi, LinearExamples) {
  const auto m = linear_model(3.0);
  for (double c : {-2.0, 0.5, 3.0}) EXPECT_NEAR(psi(m, Vector{{c, c}}), 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(psi(m, Vector{{1.0, 0.0}}), 21.0);
  // 21 (x1 - x2)(x1 + x2), factored symbolically
  EXPECT_NEAR(psi(m, Vector{{0.3, 0.8}}), 21.0 * (0.3 - 0.8) * (0.3 + 0.8), 1e-12);
}

TEST(Psi, ConstantFieldVanishes) {
  EXPECT_EQ(psi(constant_model({2.0, 5.0}), Vector{{0.1, 7.0}}), 0.0);
}

TEST(Psi, NotInvariantUnderRescaling) {
  const auto m = linear_model(3.0);
  const auto y = rescaled_model(m, DiagonalRescaling(Vector{{2.0, 1.0}}));
  const double a = psi(m, Vector{{1.0, 0.0}});
  const double b = psi(y, Vector{{2.0, 0.0}});
  EXPECT_NEAR(b, 42.0, 1e-12);
  EXPECT_GE(std::abs(b - a), 1e-6);
}

TEST(Gramian, Examples) {
  const std::vector<Vector> e{Vector::Unit(3, 0), Vector::Unit(3, 1), Vector::Unit(3, 2)};
  EXPECT_EQ(gramian(e), Matrix::Identity(3, 3));
  EXPECT_EQ(gramian_det(e), 1.0);
  EXPECT_EQ(gramian_det({Vector{{1.0, 2.0}}, Vector{{-2.0, -4.0}}}), 0.0);
  const FlowMatrix fm = flow_matrix(linear_model(3.0), Vector{{1.0, 0.0}});
  EXPECT_NEAR(gramian_det(columns(fm)), 21.0, 1e-9);
}

TEST(Gramian, Errors) {
  EXPECT_THROW(gramian({Vector::Unit(2, 0), Vector::Unit(3, 0)}), ShapeError);
  EXPECT_THROW(gramian_det({Vector::Unit(3, 0)}), ShapeError);
  const MetricValue g3 = flat_metric(3);
  EXPECT_THROW(gramian({Vector::Unit(2, 0)}, &g3), ShapeError);
  MetricValue indefinite{Matrix::Identity(2, 2), Matrix::Identity(2, 2)};
  indefinite.g(1, 1) = -1.0;
  EXPECT_THROW(gramian_det({Vector::Unit(2, 0), Vector::Unit(2, 1)}, &indefinite), NumericalError);
}

TEST(Gramian, DeterminantIsSquaredPsi) {
  acceptance::Sampler rng(59);
  for (const auto& m : acceptance::builtin_models()) {
    for (int s = 0; s < 50; ++s) {
      const FlowMatrix fm = flow_matrix(m, rng.in_box(acceptance::sample_box(m.id())));
      const double d2 = gramian(columns(fm)).determinant();
      const double p2 = fm.m.determinant() * fm.m.determinant();
      const double scale = fm.m.col(0).squaredNorm() * fm.m.col(1).squaredNorm();
      EXPECT_LE(std::abs(d2 - p2), 1e-10 * std::max(scale, 1e-300)) << m.id();
    }
  }
}

TEST(Gramian, OrthonormalChangeOfCoordinates) {
  acceptance::Sampler rng(61);
  for (int s = 0; s < 50; ++s) {
    const double a = rng.uniform(0.0, 2.0 * M_PI);
    Matrix q(2, 2);
    q << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    if (s % 2) q.col(1) *= -1.0;
    const std::vector<Vector> v{rng.direction(2) * 3.0, rng.direction(2)};
    const double d = gramian_det(v);
    EXPECT_NEAR(gramian_det({q * v[0], q * v[1]}), d, 1e-10 * std::max(1.0, d));
  }
}

TEST(FlowDerivative, CovariantEqualsFlowOnJets) {
  acceptance::Sampler rng(67);
  for (const auto& f : acceptance::builtin_models()) {
    for (const auto& h : acceptance::auxiliary_fields()) {
      for (int s = 0; s < 20; ++s) {
        const Vector x = rng.in_box(acceptance::sample_box(f.id()));
        const Vector a = flat_covariant_derivative(h, f, x);
        const Vector b = flow_derivative(h, f, x);
        EXPECT_LE((a - b).norm(), 1e-10 * std::max(1.0, a.norm())) << f.id() << " " << h.id();
      }
    }
  }
}

TEST(FlowDerivative, CovariantMatchesTrajectoryDifferences) {
  const auto f = davis_skodje_model(3.0);
  const double dt = 1e-4;
  IntegrateOptions opt;
  opt.tol = 1e-13;
  opt.stride = dt;
  const Trajectory tr = integrate_extended(f, ExtendedPoint(Vector{{2.0, 0.9}}), 40 * dt, opt);
  ASSERT_GE(tr.size(), 41u);
  for (const auto& h : acceptance::auxiliary_fields()) {
    for (std::size_t i = 1; i + 1 < tr.size(); i += 7) {
      const Vector fd = (h.eval(tr.points[i + 1].x) - h.eval(tr.points[i - 1].x)) / (tr.t[i + 1] - tr.t[i - 1]);
      const Vector cov = flat_covariant_derivative(h, f, tr.points[i].x);
      EXPECT_LE((fd - cov).norm(), 1e-6) << h.id() << " t=" << tr.t[i];
    }
  }
}

TEST(FcmZeroSet, LinearEigenlines) {
  const FcmSliceResult r = fcm_zero_set(linear_model(3.0), slice_x1(1.0, -2.0, 2.0));
  ASSERT_EQ(r.status, FcmStatus::ok);
  ASSERT_EQ(r.roots.size(), 2u);
  EXPECT_NEAR(r.roots[0].x, -1.0, 1e-8);
  EXPECT_NEAR(r.roots[1].x, 1.0, 1e-8);
  EXPECT_EQ(r.roots[0].slope_sign, 1);
  EXPECT_EQ(r.roots[1].slope_sign, -1);
  EXPECT_EQ(r.roots[0].method, RootMethod::bisect);
}

TEST(FcmZeroSet, ConstantFieldIsDegenerate) {
  const FcmSliceResult r = fcm_zero_set(constant_model({1.0, 1.0}), slice_x1(0.0, -1.0, 1.0));
  EXPECT_EQ(r.status, FcmStatus::degenerate);
  EXPECT_TRUE(r.roots.empty());
}

TEST(FcmZeroSet, DavisSkodjeSingleRoot) {
  const FcmSliceResult r = fcm_zero_set(davis_skodje_model(3.0), slice_x1(1.0, 0.4, 0.6));
  ASSERT_EQ(r.status, FcmStatus::ok);
  ASSERT_EQ(r.roots.size(), 1u);
  // Psi numerator at x1 = 1 is 13 - 24 x2; frozen offset from 0.5 is 1/24.
  EXPECT_NEAR(r.roots[0].x, 13.0 / 24.0, 1e-9);
  EXPECT_NEAR(r.roots[0].x - 0.5, 1.0 / 24.0, 1e-9);
}

TEST(FcmZeroSet, NoSignChangeKeepsProfile) {
  const FcmSliceResult r = fcm_zero_set(linear_model(3.0), slice_x1(1.0, 1.5, 2.0));
  EXPECT_EQ(r.status, FcmStatus::no_sign_change);
  EXPECT_TRUE(r.roots.empty());
  EXPECT_EQ(r.profile.size(), 256u);
}

TEST(FcmZeroSet, TouchingZeroReportedAsDip) {
  const auto m = VectorFieldModel::from_generic("touch", {"x1", "x2"}, Touch{});
  FcmSliceConfig c = slice_x1(1.0, 0.0, 1.5);
  c.grid_points = 193;  // x2 = 1 lies on the grid
  const FcmSliceResult r = fcm_zero_set(m, c);
  ASSERT_EQ(r.status, FcmStatus::ok);
  ASSERT_EQ(r.roots.size(), 1u);
  EXPECT_EQ(r.roots[0].method, RootMethod::dip);
  EXPECT_EQ(r.roots[0].slope_sign, 0);
  EXPECT_EQ(r.roots[0].x, 1.0);
}

TEST(FcmZeroSet, InvalidConfig) {
  EXPECT_THROW(fcm_zero_set(linear_model(), slice_x1(1.0, 1.0, 0.0)), ParameterError);
  FcmSliceConfig c = slice_x1(1.0, 0.0, 1.0);
  c.grid_points = 1;
  EXPECT_THROW(fcm_zero_set(linear_model(), c), ParameterError);
}
