#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "geostretch/acceptance.hpp"
#include "geostretch/models.hpp"

using namespace geostretch;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Matrix central_jacobian(const VectorFieldModel& m, const Vector& x, double h = 1e-6) {
  Matrix j(m.dim(), m.dim());
  for (int k = 0; k < m.dim(); ++k) {
    Vector xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    j.col(k) = (m.eval(xp) - m.eval(xm)) / (2.0 * h);
  }
  return j;
}

}  // namespace

TEST(EvalField, LinearSlowEigenvector) {
  EXPECT_TRUE(eval_field(linear_model(3.0), vec({1, 1})).isApprox(vec({-1, -1})));
}

TEST(EvalField, DavisSkodjeSubstitution) {
  const Vector f = eval_field(davis_skodje_model(3.0), vec({1, 0.5}));
  EXPECT_DOUBLE_EQ(f[0], -1.0);
  EXPECT_DOUBLE_EQ(f[1], -0.25);
}

TEST(EvalField, ChiavazzoEquilibriumOnVerticalLine) {
  const auto m = chiavazzo_model();
  ASSERT_EQ(m.coordinate_names()[0], "c3");
  const Vector f = eval_field(m, vec({0.1, 0.5}));
  EXPECT_NEAR(f[0], 0.0, 1e-14);
  EXPECT_NEAR(f[1], 0.0, 1e-14);
}

TEST(EvalField, DomainErrorNamesCoordinate) {
  const auto m = davis_skodje_model(3.0);
  try {
    m.eval(vec({-1.0, 0.2}));
    FAIL() << "pole accepted";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("x1"), std::string::npos);
  }
  EXPECT_THROW(m.eval(vec({NAN, 0.2})), DomainError);
  EXPECT_THROW(m.eval(vec({1.0})), ShapeError);
}

TEST(EvalField, Deterministic) {
  const auto m = michaelis_menten_model();
  const Vector x = vec({0.3, 0.7});
  const Vector a = m.eval(x), b = m.eval(x);
  EXPECT_EQ(0, std::memcmp(a.data(), b.data(), sizeof(double) * 2));
}

TEST(ModelParameters, Validation) {
  EXPECT_THROW(davis_skodje_model(1.0), ParameterError);
  EXPECT_THROW(davis_skodje_model(0.5), ParameterError);
  EXPECT_THROW(michaelis_menten_model(1.0, 1.0, 0.1), ParameterError);
  EXPECT_THROW(michaelis_menten_model(0.0, 1.0, 0.1), ParameterError);
  EXPECT_THROW(michaelis_menten_model(0.5, 1.0, 0.0), ParameterError);
  EXPECT_THROW(linear_model(NAN), ParameterError);
  EXPECT_NO_THROW(linear_model(-2.0));
}

TEST(ModelParameters, RegistryOverrides) {
  const auto m = model_from_id("davis-skodje", {{"eta", 10.0}});
  EXPECT_DOUBLE_EQ(m.parameters().get("eta"), 10.0);
  EXPECT_THROW(model_from_id("no-such-model"), ParameterError);
  for (const auto& id : builtin_model_ids()) EXPECT_EQ(model_from_id(id).id(), id);
}

TEST(EvalJets, LinearJacobianAndZeroHessian) {
  const auto m = linear_model(3.0);
  const FieldJet j = eval_jets(m, vec({0.3, -1.7}), 2);
  Matrix a(2, 2);
  a << -4, 3, 3, -4;
  EXPECT_TRUE(j.jacobian.isApprox(a));
  for (const auto& h : j.hessian) EXPECT_EQ(h.norm(), 0.0);
}

TEST(EvalJets, DavisSkodjeJacobian) {
  const auto m = davis_skodje_model(3.0);
  const Vector x = vec({1, 0.5});
  const FieldJet j = eval_jets(m, x, 1);
  EXPECT_DOUBLE_EQ(j.jacobian(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(j.jacobian(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(j.jacobian(1, 1), -3.0);
  EXPECT_NEAR(j.jacobian(1, 0), central_jacobian(m, x)(1, 0), 1e-8);
}

TEST(EvalJets, OrderBeyondDepthIsCapabilityError) {
  EXPECT_THROW(eval_jets(linear_model(), vec({1, 0}), 3), CapabilityError);
  EXPECT_THROW(eval_jets(linear_model(), vec({1, 0}), 0), ParameterError);
}

TEST(EvalJets, CallbackModelWithoutJacobianHasNoJets) {
  const auto m = VectorFieldModel::from_callbacks("plain", {"x"}, [](std::span<const double> x, std::span<double> o) {
    o[0] = -x[0];
  });
  EXPECT_EQ(m.partial_order(), 0);
  EXPECT_THROW(eval_jets(m, vec({1.0}), 1), CapabilityError);
}

TEST(EvalJets, AnalyticMatchesAutodiffAndDifferences) {
  acceptance::Sampler rng(11);
  for (const auto& m : acceptance::builtin_models()) {
    const auto box = acceptance::sample_box(m.id());
    for (int s = 0; s < 25; ++s) {
      const Vector x = rng.in_box(box);
      const FieldJet a = eval_jets(m, x, 2);
      const FieldJet d = eval_jets_autodiff(m, x, 2);
      const Matrix fd = central_jacobian(m, x);
      const double scale = std::max(1.0, a.jacobian.norm());
      EXPECT_LE((a.jacobian - d.jacobian).norm(), 1e-12 * scale) << m.id();
      EXPECT_LE((a.jacobian - fd).norm(), 1e-6 * scale) << m.id();
      for (int i = 0; i < m.dim(); ++i)
        EXPECT_LE((a.hessian[i] - d.hessian[i]).norm(), 1e-10 * std::max(1.0, a.hessian[i].norm())) << m.id();
    }
  }
}

TEST(MmTruncatedSeries, Examples) {
  EXPECT_DOUBLE_EQ(mm_truncated_series(0.5, {{"kappa", 0.5}, {"lambda", 1.0}, {"epsilon", 0.0}}), 0.5);
  for (double eps : {0.0, 1.0 / 3.0, 1.0 / 12.0})
    EXPECT_EQ(mm_truncated_series(0.0, {{"kappa", 0.5}, {"lambda", 1.0}, {"epsilon", eps}}), 0.0);
  // h1(0.5) = 1/4, h2(0.5) = -1/4 (sympy solve of the invariance equation order by order).
  const double h = mm_truncated_series(0.5, {{"kappa", 0.5}, {"lambda", 1.0}, {"epsilon", 1.0 / 3.0}});
  EXPECT_NEAR(h, 0.5 + 0.25 / 3.0 - 0.25 / 9.0, 1e-15);
  EXPECT_NEAR(h, 5.0 / 9.0, 1e-15);
  EXPECT_THROW(mm_truncated_series(-0.5, {{"kappa", 0.5}, {"lambda", 1.0}, {"epsilon", 0.1}}), DomainError);
}

TEST(DsSimGraph, Examples) {
  EXPECT_DOUBLE_EQ(ds_sim_graph(1.0), 0.5);
  EXPECT_DOUBLE_EQ(ds_sim_graph(0.0), 0.0);
  EXPECT_DOUBLE_EQ(ds_sim_graph(3.0), 0.75);
  EXPECT_THROW(ds_sim_graph(-1.0), DomainError);
}

TEST(FlowJets, LinearPowers) {
  const auto m = linear_model(3.0);
  const auto jets = flow_jets(m, vec({1, 0}), 2);
  ASSERT_EQ(jets.size(), 3u);
  EXPECT_TRUE(jets[0].isApprox(vec({-4, 3})));
  EXPECT_TRUE(jets[1].isApprox(vec({25, -24})));
  EXPECT_TRUE(jets[2].isApprox(vec({-172, 171})));
}
