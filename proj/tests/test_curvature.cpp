#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "geostretch/acceptance.hpp"
#include "geostretch/curvature.hpp"
#include "geostretch/stretching.hpp"

using namespace geostretch;

namespace {

struct Decay {
  template <class S>
  void operator()(std::span<const S> x, std::span<S> out) const {
    out[0] = -x[0];
  }
};

VectorFieldModel decay_model() { return VectorFieldModel::from_generic("decay", {"x"}, Decay{}); }

const ExtendedPoint kDsPoint(Vector{{1.0, 0.5}}, 0.0);

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// R^l_ijk from central differences of christoffel_at plus the quadratic terms.
Riemann riemann_difference_oracle(const VectorFieldModel& m, const ExtendedPoint& p, double h = 1e-5) {
  const int d = m.dim() + 1;
  const Christoffel g0 = christoffel_at(m, p);
  std::vector<Christoffel> dg;
  for (int a = 0; a < d; ++a) {
    Vector c = p.coords();
    Vector cp = c, cm = c;
    cp[a] += h;
    cm[a] -= h;
    const Christoffel gp = christoffel_at(m, ExtendedPoint(cp.head(d - 1), cp[d - 1]));
    const Christoffel gm = christoffel_at(m, ExtendedPoint(cm.head(d - 1), cm[d - 1]));
    Christoffel diff(d);
    for (int k = 0; k < d; ++k)
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) diff(k, i, j) = (gp(k, i, j) - gm(k, i, j)) / (2.0 * h);
    dg.push_back(diff);
  }
  Riemann r(d);
  for (int l = 0; l < d; ++l)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
          double v = dg[i](l, j, k) - dg[j](l, i, k);
          for (int mm = 0; mm < d; ++mm) v += g0(l, i, mm) * g0(mm, j, k) - g0(l, j, mm) * g0(mm, i, k);
          r(l, i, j, k) = v;
        }
  return r;
}

}  // namespace

TEST(ChristoffelAt, OneDimensionalDecay) {
  const auto m = decay_model();
  const Christoffel g = christoffel_at(m, ExtendedPoint(Vector{{1.0}}));
  EXPECT_DOUBLE_EQ(g(0, 0, 0), -1.0);
  for (double x : {-3.0, 0.0, 0.7, 12.0}) EXPECT_DOUBLE_EQ(christoffel_at(m, ExtendedPoint(Vector{{x}}))(1, 0, 0), 1.0);
}

TEST(ChristoffelAt, ConstantFieldIsFlat) {
  const Christoffel g = christoffel_at(constant_model({1.0, -2.0}), ExtendedPoint(Vector{{0.3, 0.4}}));
  EXPECT_EQ(max_abs(g.data()), 0.0);
}

TEST(ChristoffelAt, SymmetricInLowerIndices) {
  acceptance::Sampler rng(13);
  for (const auto& m : acceptance::builtin_models()) {
    const Christoffel g = christoffel_at(m, ExtendedPoint(rng.in_box(acceptance::sample_box(m.id()))));
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) EXPECT_EQ(g(k, i, j), g(k, j, i));
  }
}

TEST(ChristoffelAt, MatchesMetricDifferences) {
  acceptance::Sampler rng(17);
  for (const auto& m : acceptance::builtin_models()) {
    for (int s = 0; s < 20; ++s) {
      const ExtendedPoint p(rng.in_box(acceptance::sample_box(m.id())));
      EXPECT_LE(acceptance::relative_gap(christoffel_at(m, p).data(),
                                         acceptance::christoffel_finite_difference(m, p).data()),
                1e-6)
          << m.id();
    }
  }
}

TEST(ChristoffelAt, NeedsFirstOrderJets) {
  const auto m = VectorFieldModel::from_callbacks("plain", {"x"}, [](std::span<const double> x, std::span<double> o) {
    o[0] = -x[0];
  });
  EXPECT_THROW(christoffel_at(m, ExtendedPoint(Vector{{1.0}})), CapabilityError);
}

TEST(RiemannAt, ConstantFieldIsZero) {
  const Riemann r = riemann_at(constant_model({0.5, 2.0}), ExtendedPoint(Vector{{1.0, 1.0}}));
  EXPECT_EQ(max_abs(r.data()), 0.0);
}

TEST(RiemannAt, AntisymmetricInFirstPair) {
  acceptance::Sampler rng(19);
  for (const auto& m : acceptance::builtin_models()) {
    const Riemann r = riemann_at(m, ExtendedPoint(rng.in_box(acceptance::sample_box(m.id()))));
    const double scale = std::max(1.0, max_abs(r.data()));
    for (int l = 0; l < 3; ++l)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          for (int k = 0; k < 3; ++k) EXPECT_LE(std::abs(r(l, i, j, k) + r(l, j, i, k)), 1e-12 * scale);
  }
}

TEST(RiemannAt, DavisSkodjeMatchesChristoffelDifferences) {
  const auto m = davis_skodje_model(3.0);
  EXPECT_LE(acceptance::relative_gap(riemann_at(m, kDsPoint).data(), riemann_difference_oracle(m, kDsPoint).data()),
            1e-6);
}

TEST(RiemannAt, SymmetriesAndBianchi) {
  acceptance::Sampler rng(23);
  for (const auto& m : acceptance::builtin_models()) {
    for (int s = 0; s < 20; ++s) {
      const CurvatureBundle b = curvature_at(m, ExtendedPoint(rng.in_box(acceptance::sample_box(m.id()))));
      const auto gaps = acceptance::riemann_symmetry_gaps(b);
      EXPECT_LE(gaps.antisym_ij, 1e-10) << m.id();
      EXPECT_LE(gaps.antisym_lk, 1e-10) << m.id();
      EXPECT_LE(gaps.pair, 1e-10) << m.id();
      EXPECT_LE(gaps.bianchi, 1e-10) << m.id();
      EXPECT_LE(acceptance::self_adjoint_gap(b), 1e-10) << m.id();
    }
  }
}

TEST(RiemannAt, IndependentOfTau) {
  const auto m = michaelis_menten_model();
  const Vector x{{0.4, 0.3}};
  const CurvatureBundle a = curvature_at(m, ExtendedPoint(x, 0.0));
  const CurvatureBundle b = curvature_at(m, ExtendedPoint(x, 42.0));
  EXPECT_EQ(a.gamma.data(), b.gamma.data());
  EXPECT_EQ(a.riemann.data(), b.riemann.data());
  EXPECT_EQ(a.s_matrix, b.s_matrix);
}

TEST(RiemannAt, SignOptionFlipsTensor) {
  const auto m = davis_skodje_model(3.0);
  CurvatureOptions flipped;
  flipped.riemann_sign = -1;
  const Riemann a = riemann_at(m, kDsPoint);
  const Riemann b = riemann_at(m, kDsPoint, flipped);
  for (std::size_t i = 0; i < a.data().size(); ++i) EXPECT_EQ(a.data()[i], -b.data()[i]);
}

TEST(FDeviation, ConstantFieldIsZero) {
  EXPECT_EQ(f_deviation_at(constant_model({1.0, 1.0}), ExtendedPoint(Vector{{0.0, 0.0}})).norm(), 0.0);
}

TEST(FDeviation, AnnihilatesTangentField) {
  acceptance::Sampler rng(29);
  for (const auto& m : acceptance::builtin_models()) {
    const CurvatureBundle b = curvature_at(m, ExtendedPoint(rng.in_box(acceptance::sample_box(m.id()))));
    EXPECT_LE((b.s_matrix * b.flow.c).norm(), 1e-12 * std::max(1.0, b.s_matrix.norm())) << m.id();
  }
}

TEST(FDeviation, RayleighQuotientIsGeodesicStretching) {
  const auto m = davis_skodje_model(3.0);
  const CurvatureBundle b = curvature_at(m, kDsPoint);
  const TangentVector v = TangentVector::pure_state(Vector{{0.3, -1.1}});
  const double q = metric_apply(b.metric, TangentVector(b.s_matrix * v.c), v) / metric_apply(b.metric, v, v);
  EXPECT_NEAR(q, geodesic_stretching(b, v), 1e-14);
}

TEST(SectionalCurvature, ConstantFieldIsFlat) {
  const auto m = constant_model({2.0, 1.0});
  EXPECT_EQ(sectional_curvature(m, ExtendedPoint(Vector{{0.0, 0.0}}), TangentVector::basis(2, 0)), 0.0);
}

TEST(SectionalCurvature, ScaleInvariant) {
  acceptance::Sampler rng(31);
  for (const auto& m : acceptance::builtin_models()) {
    const CurvatureBundle b = curvature_at(m, ExtendedPoint(rng.in_box(acceptance::sample_box(m.id()))));
    const TangentVector v = TangentVector::pure_state(rng.direction(2));
    const double k1 = sectional_curvature(b, v);
    const double k2 = sectional_curvature(b, TangentVector(2.0 * v.c));
    EXPECT_NEAR(k1, k2, 1e-12 * std::max(1.0, std::abs(k1))) << m.id();
  }
}

TEST(SectionalCurvature, DavisSkodjeTangentialRow) {
  const auto m = davis_skodje_model(3.0);
  EXPECT_NEAR(sectional_curvature(m, kDsPoint, TangentVector::pure_state(Vector{{-1.0, -0.25}})), 0.947610294117647,
              1e-9);
}

TEST(SectionalCurvature, ParallelToFlowIsDegenerate) {
  const auto m = davis_skodje_model(3.0);
  const TangentVector t = tangent_lift(m, kDsPoint);
  EXPECT_THROW(sectional_curvature(m, kDsPoint, t), DegeneracyError);
  EXPECT_THROW(sectional_curvature(m, kDsPoint, TangentVector(-3.0 * t.c)), DegeneracyError);
}

TEST(SectionalCurvature, EqualsGeodesicStretchingOnPureStates) {
  acceptance::Sampler rng(37);
  for (const auto& m : acceptance::builtin_models()) {
    for (int s = 0; s < 50; ++s) {
      const CurvatureBundle b = curvature_at(m, ExtendedPoint(rng.in_box(acceptance::sample_box(m.id()))));
      const TangentVector v = TangentVector::pure_state(rng.direction(2));
      const double k = sectional_curvature(b, v);
      EXPECT_NEAR(k, geodesic_stretching(b, v), 1e-10 * std::max(1.0, std::abs(k))) << m.id();
    }
  }
}
