#pragma once

// Levi-Civita curvature of the f-manifold.
//
// Sign convention (matches the reference stretching values in fixtures/):
//
//   R(u, v)w = nabla_u nabla_v w - nabla_v nabla_u w - nabla_[u,v] w
//   R^l_ijk  = d_i G^l_jk - d_j G^l_ik + G^l_im G^m_jk - G^l_jm G^m_ik
//
// so that R(d_i, d_j)d_k = R^l_ijk d_l. The f-deviation is S(v) = R(T, v)T with
// the lifted flow direction T, and sectional curvatures are reported as
// g(R(T, v)T, v) / (g(v,v) g(T,T) - g(T,v)^2). Flipping `riemann_sign` to -1
// reproduces the opposite convention.
//
// Christoffel symbols come from closed forms in f, J_f; their derivatives from
// the differentiated closed forms using the Hessian of f. Nothing is differenced.

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "geostretch/errors.hpp"
#include "geostretch/fmanifold.hpp"
#include "geostretch/models.hpp"

namespace geostretch {

/// Dense array of rank R with every extent equal to `dim`.
template <std::size_t R>
class DenseTensor {
public:
  DenseTensor() = default;
  explicit DenseTensor(int dim) : dim_(dim), data_(static_cast<std::size_t>(ipow(dim, R)), 0.0) {}

  int dim() const { return dim_; }
  template <class... I>
  double& operator()(I... idx) {
    static_assert(sizeof...(I) == R);
    return data_[offset({static_cast<int>(idx)...})];
  }
  template <class... I>
  double operator()(I... idx) const {
    static_assert(sizeof...(I) == R);
    return data_[offset({static_cast<int>(idx)...})];
  }
  const std::vector<double>& data() const { return data_; }
  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

private:
  static int ipow(int b, std::size_t e) {
    int r = 1;
    for (std::size_t i = 0; i < e; ++i) r *= b;
    return r;
  }
  std::size_t offset(std::array<int, R> idx) const {
    std::size_t o = 0;
    for (int i : idx) o = o * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(i);
    return o;
  }

  int dim_ = 0;
  std::vector<double> data_;
};

/// christoffel(k, i, j) = G^k_ij
using Christoffel = DenseTensor<3>;
/// christoffel_derivative(m, k, i, j) = d_m G^k_ij
using ChristoffelDerivative = DenseTensor<4>;
/// riemann(l, i, j, k) = R^l_ijk
using Riemann = DenseTensor<4>;

struct CurvatureOptions {
  /// +1: convention documented at the top of this header; -1: opposite sign.
  int riemann_sign = 1;
};

/// Everything curvature-related at one point; immutable once computed.
struct CurvatureBundle {
  ExtendedPoint point;
  MetricValue metric;
  TangentVector flow;  // T_p
  Christoffel gamma;
  ChristoffelDerivative dgamma;
  Riemann riemann;
  Matrix s_matrix;  // S(v) = s_matrix * v
};

namespace detail {

// Closed-form Christoffel symbols from f and J (J(i, j) = d f_i / d x_j).
inline Christoffel christoffel_closed_form(const Vector& f, const Matrix& jac) {
  const int n = static_cast<int>(f.size());
  const int t = n;  // time slot
  Christoffel gam(n + 1);
  const Matrix a = jac + jac.transpose();
  const Vector w = a * f;            // w_j = sum_mu f_mu (J_j,mu + J_mu,j)
  const double q = f.dot(jac * f);   // f^T J f
  const Vector u = jac.transpose() * f;  // u_k = sum_mu f_mu J_mu,k
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) gam(k, i, j) = -0.5 * f[k] * a(i, j);
    for (int j = 0; j < n; ++j) {
      const double v = 0.5 * f[k] * w[j] + 0.5 * (jac(j, k) - jac(k, j));
      gam(k, j, t) = v;
      gam(k, t, j) = v;
    }
    gam(k, t, t) = -f[k] * q - u[k];
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) gam(t, i, j) = -0.5 * a(i, j);
  for (int j = 0; j < n; ++j) {
    gam(t, j, t) = 0.5 * w[j];
    gam(t, t, j) = 0.5 * w[j];
  }
  gam(t, t, t) = -q;
  return gam;
}

// d_m of the closed forms above; hess[i](j, m) = d^2 f_i / dx_j dx_m. d_tau vanishes.
inline ChristoffelDerivative christoffel_derivative_closed_form(const Vector& f, const Matrix& jac,
                                                                const std::vector<Matrix>& hess) {
  const int n = static_cast<int>(f.size());
  const int t = n;
  ChristoffelDerivative d(n + 1);
  const Matrix a = jac + jac.transpose();
  const Vector w = a * f;
  const double q = f.dot(jac * f);
  const Vector jf = jac * f;
  const Vector jtf = jac.transpose() * f;
  for (int m = 0; m < n; ++m) {
    // dJ(i, j) = d_m J(i, j) = hess[i](j, m)
    Matrix dj(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) dj(i, j) = hess[i](j, m);
    const Matrix da = dj + dj.transpose();
    const Vector df = jac.col(m);
    const Vector dw = da * f + a * df;
    const double dq = df.dot(jf) + f.dot(dj * f) + jtf.dot(df);
    const Vector du = dj.transpose() * f + jac.transpose() * df;
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) d(m, k, i, j) = -0.5 * (df[k] * a(i, j) + f[k] * da(i, j));
      for (int j = 0; j < n; ++j) {
        const double v = 0.5 * (df[k] * w[j] + f[k] * dw[j]) + 0.5 * (dj(j, k) - dj(k, j));
        d(m, k, j, t) = v;
        d(m, k, t, j) = v;
      }
      d(m, k, t, t) = -(df[k] * q + f[k] * dq) - du[k];
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d(m, t, i, j) = -0.5 * da(i, j);
    for (int j = 0; j < n; ++j) {
      d(m, t, j, t) = 0.5 * dw[j];
      d(m, t, t, j) = 0.5 * dw[j];
    }
    d(m, t, t, t) = -dq;
  }
  return d;
}

}  // namespace detail

inline Christoffel christoffel_at(const VectorFieldModel& model, const ExtendedPoint& p) {
  FieldJet jet = eval_jets(model, p.x, 1);
  return detail::christoffel_closed_form(jet.value, jet.jacobian);
}

inline ChristoffelDerivative christoffel_derivative_at(const VectorFieldModel& model, const ExtendedPoint& p) {
  FieldJet jet = eval_jets(model, p.x, 2);
  return detail::christoffel_derivative_closed_form(jet.value, jet.jacobian, jet.hessian);
}

/// R^l_ijk from Christoffel symbols and their derivatives.
inline Riemann riemann_from_christoffel(const Christoffel& gam, const ChristoffelDerivative& dgam,
                                        CurvatureOptions opt = {}) {
  const int d = gam.dim();
  Riemann r(d);
  const double sign = opt.riemann_sign >= 0 ? 1.0 : -1.0;
  for (int l = 0; l < d; ++l)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        if (i == j) continue;  // antisymmetric in (i, j)
        for (int k = 0; k < d; ++k) {
          double v = dgam(i, l, j, k) - dgam(j, l, i, k);
          for (int m = 0; m < d; ++m) v += gam(l, i, m) * gam(m, j, k) - gam(l, j, m) * gam(m, i, k);
          r(l, i, j, k) = sign * v;
        }
      }
  return r;
}

inline Riemann riemann_at(const VectorFieldModel& model, const ExtendedPoint& p, CurvatureOptions opt = {}) {
  FieldJet jet = eval_jets(model, p.x, 2);
  return riemann_from_christoffel(detail::christoffel_closed_form(jet.value, jet.jacobian),
                                  detail::christoffel_derivative_closed_form(jet.value, jet.jacobian, jet.hessian),
                                  opt);
}

/// Lowered components R_lijk = g_lm R^m_ijk = g(R(d_i, d_j)d_k, d_l).
inline Riemann lower_riemann(const Riemann& r, const MetricValue& gv) {
  const int d = r.dim();
  Riemann out(d);
  for (int l = 0; l < d; ++l)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
          double v = 0.0;
          for (int m = 0; m < d; ++m) v += gv.g(l, m) * r(m, i, j, k);
          out(l, i, j, k) = v;
        }
  return out;
}

/// Matrix of v -> R(t, v)t in the coordinate basis.
inline Matrix deviation_matrix(const Riemann& r, const TangentVector& t) {
  const int d = r.dim();
  Matrix s = Matrix::Zero(d, d);
  for (int l = 0; l < d; ++l)
    for (int j = 0; j < d; ++j) {
      double v = 0.0;
      for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k) v += r(l, i, j, k) * t.c[i] * t.c[k];
      s(l, j) = v;
    }
  return s;
}

inline CurvatureBundle curvature_at(const VectorFieldModel& model, const ExtendedPoint& p, CurvatureOptions opt = {}) {
  model.require_partial_order(2);
  FieldJet jet = eval_jets(model, p.x, 2);
  CurvatureBundle b;
  b.point = p;
  b.metric = metric_from_field(jet.value);
  Vector t(jet.value.size() + 1);
  t << jet.value, 1.0;
  b.flow = TangentVector(t);
  b.gamma = detail::christoffel_closed_form(jet.value, jet.jacobian);
  b.dgamma = detail::christoffel_derivative_closed_form(jet.value, jet.jacobian, jet.hessian);
  b.riemann = riemann_from_christoffel(b.gamma, b.dgamma, opt);
  b.s_matrix = deviation_matrix(b.riemann, b.flow);
  return b;
}

/// f-deviation S at p as a matrix acting on coordinate components.
inline Matrix f_deviation_at(const VectorFieldModel& model, const ExtendedPoint& p, CurvatureOptions opt = {}) {
  return curvature_at(model, p, opt).s_matrix;
}

/// Relative threshold below which span(T, v) counts as degenerate.
inline constexpr double kPlaneDegeneracy = 1e-14;

/// Sectional curvature g(R(T,v)T, v) / (g(v,v) g(T,T) - g(T,v)^2) of span(T_p, v).
inline double sectional_curvature(const CurvatureBundle& b, const TangentVector& v) {
  const double vv = metric_apply(b.metric, v, v);
  const double tt = metric_apply(b.metric, b.flow, b.flow);
  const double tv = metric_apply(b.metric, b.flow, v);
  const double den = vv * tt - tv * tv;
  if (!(den > kPlaneDegeneracy * vv * tt) || vv == 0.0)
    throw DegeneracyError("sectional curvature: v is (numerically) parallel to the flow direction");
  return metric_apply(b.metric, TangentVector(b.s_matrix * v.c), v) / den;
}

inline double sectional_curvature(const VectorFieldModel& model, const ExtendedPoint& p, const TangentVector& v,
                                  CurvatureOptions opt = {}) {
  return sectional_curvature(curvature_at(model, p, opt), v);
}

}  // namespace geostretch
