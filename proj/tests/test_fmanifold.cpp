#include <gtest/gtest.h>

#include "geostretch/acceptance.hpp"
#include "geostretch/fmanifold.hpp"

using namespace geostretch;

namespace {

const ExtendedPoint kDsPoint(Vector{{1.0, 0.5}}, 0.0);

}  // namespace

TEST(MetricAt, DavisSkodjeComponents) {
  const auto m = davis_skodje_model(3.0);
  Matrix expect(3, 3);
  expect << 1, 0, 1, 0, 1, 0.25, 1, 0.25, 2.0625;
  for (double tau : {0.0, -2.0, 7.5}) {
    const MetricValue g = metric_at(m, ExtendedPoint(kDsPoint.x, tau));
    EXPECT_LE((g.g - expect).norm(), 1e-15);
  }
}

TEST(MetricAt, DavisSkodjeInverseBlock) {
  const MetricValue g = metric_at(davis_skodje_model(3.0), kDsPoint);
  Matrix block(2, 2);
  block << 2, 0.25, 0.25, 1.0625;
  EXPECT_LE((g.g_inv.topLeftCorner(2, 2) - block).norm(), 1e-15);
  EXPECT_LE((g.g_inv - g.g.inverse()).norm(), 1e-12);
}

TEST(MetricAt, EquilibriumIsIdentity) {
  const MetricValue g = metric_at(linear_model(3.0), ExtendedPoint(Vector::Zero(2), 1.0));
  EXPECT_EQ(g.g, Matrix::Identity(3, 3));
  EXPECT_EQ(g.g_inv, Matrix::Identity(3, 3));
}

TEST(MetricAt, BlockStructureDeterminantInverse) {
  acceptance::Sampler rng(3);
  for (const auto& m : acceptance::builtin_models()) {
    const auto box = acceptance::sample_box(m.id());
    for (int s = 0; s < 100; ++s) {
      const Vector x = rng.in_box(box);
      const Vector f = m.eval(x);
      const MetricValue g = metric_at(m, ExtendedPoint(x, rng.uniform(-5, 5)));
      EXPECT_EQ(g.g.topLeftCorner(2, 2), Matrix::Identity(2, 2));
      EXPECT_EQ(g.g.col(2).head(2), -f);
      EXPECT_EQ(g.g, g.g.transpose());
      EXPECT_NEAR(g.g(2, 2), 1.0 + f.squaredNorm(), 1e-15 * (1.0 + f.squaredNorm()));
      EXPECT_NEAR(g.g.determinant(), 1.0, 1e-12);
      EXPECT_LE((g.g * g.g_inv - Matrix::Identity(3, 3)).norm(), 1e-12 * (1.0 + f.squaredNorm()));
    }
  }
}

TEST(MetricApply, Examples) {
  const auto m = davis_skodje_model(3.0);
  const MetricValue eq = metric_at(linear_model(), ExtendedPoint(Vector::Zero(2)));
  EXPECT_EQ(metric_apply(eq, TangentVector::basis(2, 0), TangentVector::basis(2, 0)), 1.0);

  const MetricValue g = metric_at(m, kDsPoint);
  const TangentVector t = tangent_lift(m, kDsPoint);
  EXPECT_NEAR(metric_apply(g, t, t), 1.0, 1e-15);
  for (int i = 0; i < 2; ++i) EXPECT_NEAR(metric_apply(g, t, TangentVector::basis(2, i)), 0.0, 1e-15);
}

TEST(MetricApply, DimensionMismatch) {
  const MetricValue g = flat_metric(2);
  EXPECT_THROW(metric_apply(g, TangentVector::basis(2, 0), TangentVector::basis(3, 0)), ShapeError);
}

TEST(TangentLift, Examples) {
  EXPECT_TRUE(tangent_lift(linear_model(), ExtendedPoint(Vector::Zero(2))).c.isApprox(Vector{{0.0, 0.0, 1.0}}));
  EXPECT_TRUE(tangent_lift(davis_skodje_model(3.0), kDsPoint).c.isApprox(Vector{{-1.0, -0.25, 1.0}}));
}

TEST(TangentLift, UnitSpeedAtRandomPoints) {
  acceptance::Sampler rng(5);
  for (const auto& m : acceptance::builtin_models()) {
    for (int s = 0; s < 100; ++s) {
      const ExtendedPoint p(rng.in_box(acceptance::sample_box(m.id())), rng.uniform(-1, 1));
      const TangentVector t = tangent_lift(m, p);
      EXPECT_NEAR(metric_apply(metric_at(m, p), t, t), 1.0, 1e-12) << m.id();
    }
  }
}

TEST(TangentLift, DomainErrorPropagates) {
  EXPECT_THROW(tangent_lift(davis_skodje_model(), ExtendedPoint(Vector{{-1.0, 0.0}})), DomainError);
}

TEST(RescaleCoefficients, Examples) {
  const MetricValue g = metric_at(davis_skodje_model(3.0), kDsPoint);
  EXPECT_EQ(rescale_coefficients(g, DiagonalRescaling(Vector{{1.0, 1.0}})).g, g.g);

  const MetricValue id = metric_at(linear_model(), ExtendedPoint(Vector::Zero(2)));
  Matrix expect = Matrix::Identity(3, 3);
  expect(0, 0) = expect(1, 1) = 0.25;
  EXPECT_LE((rescale_coefficients(id, DiagonalRescaling(Vector{{2.0, 2.0}})).g - expect).norm(), 1e-15);

  const MetricValue r = rescale_coefficients(g, DiagonalRescaling(Vector{{2.0, 1.0}}));
  EXPECT_DOUBLE_EQ(r.g(0, 2), 0.5);
}

TEST(RescaleCoefficients, InverseStaysInverse) {
  const MetricValue g = metric_at(michaelis_menten_model(), ExtendedPoint(Vector{{0.2, 0.6}}));
  const MetricValue r = rescale_coefficients(g, DiagonalRescaling(Vector{{3.0, -0.5}}));
  EXPECT_LE((r.g * r.g_inv - Matrix::Identity(3, 3)).norm(), 1e-12);
}

TEST(RescaleCoefficients, ZeroFactorRejected) {
  EXPECT_THROW(DiagonalRescaling(Vector{{1.0, 0.0}}), ParameterError);
  EXPECT_THROW(rescale_coefficients(flat_metric(3), DiagonalRescaling(Vector{{1.0, 1.0, 1.0}})), ShapeError);
}

TEST(RescaledModel, ConjugatesTheField) {
  const auto m = linear_model(3.0);
  const DiagonalRescaling r(Vector{{2.0, 1.0}});
  const auto y = rescaled_model(m, r);
  const Vector x{{1.0, 0.0}};
  EXPECT_TRUE(y.eval(Vector{{2.0, 0.0}}).isApprox(Vector{{-8.0, 3.0}}));
  EXPECT_TRUE(y.eval(x.cwiseProduct(r.state_factors())).isApprox(m.eval(x).cwiseProduct(r.state_factors())));
}
