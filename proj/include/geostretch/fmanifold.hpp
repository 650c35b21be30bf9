#pragma once

// Metric on extended phase space E x R that turns solution curves of x' = f(x)
// into unit-speed geodesics:
//
//        | Id_n     -f      |            | Id_n + f f^T   f |
//   g =  |                  |,  g^-1 =   |                  |
//        | -f^T  1 + |f|^2  |            | f^T            1 |
//
// Coordinates are (x_1, ..., x_n, tau); index n is the time slot.

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "geostretch/errors.hpp"
#include "geostretch/models.hpp"

namespace geostretch {

/// Point (x, tau) of extended phase space.
struct ExtendedPoint {
  Vector x;
  double tau = 0.0;

  ExtendedPoint() = default;
  ExtendedPoint(Vector state, double time = 0.0) : x(std::move(state)), tau(time) {}  // NOLINT

  int dim() const { return static_cast<int>(x.size()); }
  Vector coords() const {
    Vector c(x.size() + 1);
    c << x, tau;
    return c;
  }
};

/// Tangent vector in the coordinate basis d_1..d_n, d_tau.
struct TangentVector {
  Vector c;

  TangentVector() = default;
  explicit TangentVector(Vector components) : c(std::move(components)) {}

  /// Pure-state vector (time component 0) from a state-space vector.
  static TangentVector pure_state(const Vector& v) {
    Vector c = Vector::Zero(v.size() + 1);
    c.head(v.size()) = v;
    return TangentVector(c);
  }
  /// i-th coordinate basis vector of T_p M, i in [0, n].
  static TangentVector basis(int n, int i) {
    Vector c = Vector::Zero(n + 1);
    c[i] = 1.0;
    return TangentVector(c);
  }

  int size() const { return static_cast<int>(c.size()); }
  double time_component() const { return c[c.size() - 1]; }
  bool is_pure_state() const { return time_component() == 0.0; }
  Vector state_part() const { return c.head(c.size() - 1); }
};

/// Component matrix of the metric at a point together with its inverse.
struct MetricValue {
  Matrix g;
  Matrix g_inv;

  int size() const { return static_cast<int>(g.rows()); }
};

/// Metric components from a field value f(x); shared by metric_at and the oracles.
inline MetricValue metric_from_field(const Vector& f) {
  const int n = static_cast<int>(f.size());
  MetricValue m;
  m.g = Matrix::Identity(n + 1, n + 1);
  m.g.block(0, n, n, 1) = -f;
  m.g.block(n, 0, 1, n) = -f.transpose();
  m.g(n, n) = 1.0 + f.squaredNorm();
  m.g_inv = Matrix::Identity(n + 1, n + 1);
  m.g_inv.topLeftCorner(n, n) += f * f.transpose();
  m.g_inv.block(0, n, n, 1) = f;
  m.g_inv.block(n, 0, 1, n) = f.transpose();
  return m;
}

/// Metric components at p. They do not depend on p.tau.
inline MetricValue metric_at(const VectorFieldModel& model, const ExtendedPoint& p) {
  return metric_from_field(model.eval(p.x));
}

/// Flat euclidean metric on R^n, for the flow-curvature routines.
inline MetricValue flat_metric(int n) {
  return MetricValue{Matrix::Identity(n, n), Matrix::Identity(n, n)};
}

inline double metric_apply(const MetricValue& gv, const TangentVector& v, const TangentVector& w) {
  if (v.size() != gv.size() || w.size() != gv.size())
    throw ShapeError("metric of size " + std::to_string(gv.size()) + " applied to vectors of size " +
                     std::to_string(v.size()) + " and " + std::to_string(w.size()));
  return v.c.dot(gv.g * w.c);
}

/// Lifted flow direction T_p = sum_k f_k d_k + d_tau.
inline TangentVector tangent_lift(const VectorFieldModel& model, const ExtendedPoint& p) {
  Vector f = model.eval(p.x);
  Vector c(f.size() + 1);
  c << f, 1.0;
  return TangentVector(c);
}

/// Diagonal coordinate change y_k = a_k x_k, with the time factor fixed to 1.
class DiagonalRescaling {
public:
  explicit DiagonalRescaling(Vector state_factors) : a_(std::move(state_factors)) {
    for (int i = 0; i < a_.size(); ++i)
      if (a_[i] == 0.0 || !std::isfinite(a_[i]))
        throw ParameterError("rescaling factor a" + std::to_string(i + 1) + " must be finite and nonzero");
  }

  int state_dim() const { return static_cast<int>(a_.size()); }
  const Vector& state_factors() const { return a_; }
  /// Factors including the fixed time factor 1.
  Vector factors() const {
    Vector a(a_.size() + 1);
    a << a_, 1.0;
    return a;
  }
  DiagonalRescaling inverse() const { return DiagonalRescaling(a_.cwiseInverse()); }

private:
  Vector a_;
};

/// Components of the same metric tensor in the rescaled chart: g_ij / (a_i a_j).
/// The returned inverse transforms contravariantly, g^ij a_i a_j.
inline MetricValue rescale_coefficients(const MetricValue& gv, const DiagonalRescaling& r) {
  if (r.state_dim() + 1 != gv.size())
    throw ShapeError("rescaling of dimension " + std::to_string(r.state_dim()) + " applied to metric of size " +
                     std::to_string(gv.size()));
  const Vector a = r.factors();
  const Vector inv = a.cwiseInverse();
  MetricValue out;
  out.g = inv.asDiagonal() * gv.g * inv.asDiagonal();
  out.g_inv = a.asDiagonal() * gv.g_inv * a.asDiagonal();
  return out;
}

namespace detail {

// y -> a * f(y / a) for one scalar type.
template <class S>
VectorFieldModel::Evaluator<S> rescale_evaluator(const VectorFieldModel::Evaluator<S>& e, const Vector& a) {
  if (!e) return {};
  return [e, a](std::span<const S> y, std::span<S> out) {
    const std::size_t n = y.size();
    std::vector<S> x(n), f(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / a[static_cast<Eigen::Index>(i)];
    e(x, f);
    for (std::size_t i = 0; i < n; ++i) out[i] = a[static_cast<Eigen::Index>(i)] * f[i];
  };
}

}  // namespace detail

/// Model of the rescaled system y' = a * f(y / a), i.e. the same dynamics with
/// the rescaled chart declared as parent coordinates. Its f-manifold metric is
/// a different tensor from the rescaled coefficients of the original one.
inline VectorFieldModel rescaled_model(const VectorFieldModel& model, const DiagonalRescaling& r) {
  if (r.state_dim() != model.dim()) throw ShapeError("rescaling dimension does not match model dimension");
  const Vector a = r.state_factors();
  std::vector<std::string> names;
  for (const auto& c : model.coordinate_names()) names.push_back("y_" + c);

  VectorFieldModel::Evaluator<double> eval = [model, a](std::span<const double> y, std::span<double> out) {
    Vector x(a.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) x[i] = y[static_cast<std::size_t>(i)] / a[i];
    Vector f = model.eval(x);
    for (Eigen::Index i = 0; i < a.size(); ++i) out[static_cast<std::size_t>(i)] = a[i] * f[i];
  };
  VectorFieldModel out = VectorFieldModel::from_evaluators(
      model.id() + "-rescaled", names, eval, detail::rescale_evaluator(model.dual_evaluator(), a),
      detail::rescale_evaluator(model.hyper_evaluator(), a), detail::rescale_evaluator(model.taylor_evaluator(), a));
  if (!model.analytic_jacobian()) return out;

  // J_y = A J_x A^-1,  H_y[i] = a_i A^-1 H_x[i] A^-1
  auto jac = [model, a](const Vector& y) {
    Matrix j = eval_jets(model, y.cwiseQuotient(a), 1).jacobian;
    return (a.asDiagonal() * j * a.cwiseInverse().asDiagonal()).eval();
  };
  VectorFieldModel::HessianFn hess;
  if (model.analytic_hessian()) {
    hess = [model, a](const Vector& y) {
      FieldJet jet = eval_jets(model, y.cwiseQuotient(a), 2);
      std::vector<Matrix> h(jet.hessian.size());
      for (std::size_t i = 0; i < h.size(); ++i)
        h[i] = a[static_cast<Eigen::Index>(i)] *
               (a.cwiseInverse().asDiagonal() * jet.hessian[i] * a.cwiseInverse().asDiagonal());
      return h;
    };
  }
  return out.with_analytic_derivatives(jac, hess);
}

}  // namespace geostretch
