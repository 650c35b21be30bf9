#pragma once

// Flow curvature method in the flat metric.
//
//   M(x) = [ f, nabla_f f, ..., nabla_f^(n-1) f ],   Psi(x) = det M(x)
//
// Column k is the k-th flow derivative of f, i.e. d^(k+1) x / dt^(k+1) along the
// solution through x. The flow-curvature manifold is the zero set of Psi.
// The Gramian form D = sqrt(det(M^T M)) = |Psi| uses inner products only.

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "geostretch/errors.hpp"
#include "geostretch/fmanifold.hpp"
#include "geostretch/models.hpp"

namespace geostretch {

/// k-th covariant flow derivative nabla_f^(k) f at x (flat metric).
inline Vector covariant_flow_derivative(const VectorFieldModel& model, const Vector& x, int k) {
  if (k < 0) throw ParameterError("flow derivative order must be >= 0");
  return flow_jets(model, x, k).back();
}

struct FlowMatrix {
  Matrix m;  // column k = nabla_f^(k) f

  int size() const { return static_cast<int>(m.rows()); }
  Vector column(int k) const { return m.col(k); }
};

inline FlowMatrix flow_matrix(const VectorFieldModel& model, const Vector& x) {
  const int n = model.dim();
  model.require_flow_order(n - 1);
  std::vector<Vector> cols = flow_jets(model, x, n - 1);
  FlowMatrix fm{Matrix(n, n)};
  for (int k = 0; k < n; ++k) fm.m.col(k) = cols[k];
  return fm;
}

inline double psi(const VectorFieldModel& model, const Vector& x) {
  const FlowMatrix fm = flow_matrix(model, x);
  return fm.m.determinant();
}

/// Gram matrix (<v_i, v_j>) with respect to `metric` (identity by default).
inline Matrix gramian(const std::vector<Vector>& vectors, const MetricValue* metric = nullptr) {
  if (vectors.empty()) throw ShapeError("gramian of an empty family");
  const Eigen::Index d = vectors.front().size();
  if (metric && metric->size() != d) throw ShapeError("gramian: metric size does not match vector dimension");
  const int k = static_cast<int>(vectors.size());
  Matrix v(d, k);
  for (int i = 0; i < k; ++i) {
    if (vectors[i].size() != d) throw ShapeError("gramian: vectors of different dimension");
    v.col(i) = vectors[i];
  }
  if (metric) return v.transpose() * metric->g * v;
  return v.transpose() * v;
}

/// Round-off margin below zero that is still read as a vanishing determinant.
inline constexpr double kGramianNegativeSlack = 1e-12;

/// sqrt(det G) of a family of n vectors in dimension n.
inline double gramian_det(const std::vector<Vector>& vectors, const MetricValue* metric = nullptr) {
  if (!vectors.empty() && static_cast<Eigen::Index>(vectors.size()) != vectors.front().size())
    throw ShapeError("gramian_det needs n vectors of dimension n");
  const double det = gramian(vectors, metric).determinant();
  if (det < 0.0) {
    if (det >= -kGramianNegativeSlack) return 0.0;
    throw NumericalError("gramian determinant " + std::to_string(det) + " is negative beyond round-off");
  }
  return std::sqrt(det);
}

inline std::vector<Vector> columns(const FlowMatrix& fm) {
  std::vector<Vector> out;
  for (int k = 0; k < fm.size(); ++k) out.push_back(fm.column(k));
  return out;
}

/// Flat covariant derivative nabla_f h = J_h f of a second field h along f.
inline Vector flat_covariant_derivative(const VectorFieldModel& h, const VectorFieldModel& f, const Vector& x) {
  if (h.dim() != f.dim()) throw ShapeError("fields of different dimension");
  return eval_jets(h, x, 1).jacobian * f.eval(x);
}

/// d/dt h(x(t)) at t = 0 along the f-trajectory through x, from Taylor
/// propagation of x(t) through h's evaluator.
inline Vector flow_derivative(const VectorFieldModel& h, const VectorFieldModel& f, const Vector& x) {
  if (h.dim() != f.dim()) throw ShapeError("fields of different dimension");
  if (!h.taylor_evaluator()) throw CapabilityError("model '" + h.id() + "' has no series evaluator");
  const int n = h.dim();
  h.check_domain(std::span<const double>(x.data(), static_cast<std::size_t>(n)));
  const Vector fx = f.eval(x);
  std::vector<Taylor> xt(n), ht(n);
  for (int i = 0; i < n; ++i) xt[i] = Taylor::variable(x[i], fx[i], 1);
  h.taylor_evaluator()(xt, ht);
  Vector out(n);
  for (int i = 0; i < n; ++i) out[i] = ht[i][1];
  return out;
}

// ---------------------------------------------------------------------------
// Zero set along a slice

struct FcmSliceConfig {
  Vector base;
  int search_index = 1;
  double lo = 0.0;
  double hi = 1.0;
  int grid_points = 256;
  double tol = 1e-10;
  /// |Psi| below this at a grid point without sign change flags a touching zero.
  double dip_threshold = 1e-10;
  /// |Psi| below this on the whole grid makes the slice degenerate.
  double degenerate_threshold = 1e-13;
};

enum class RootMethod { bisect, dip };

inline const char* root_method_name(RootMethod m) { return m == RootMethod::bisect ? "bisect" : "dip"; }

struct FcmRoot {
  double x = 0.0;
  int slope_sign = 0;  // sign of dPsi/ds across the root; 0 for dips
  RootMethod method = RootMethod::bisect;
};

enum class FcmStatus { ok, no_sign_change, degenerate };

inline const char* fcm_status_name(FcmStatus s) {
  switch (s) {
    case FcmStatus::ok: return "ok";
    case FcmStatus::no_sign_change: return "no-sign-change";
    case FcmStatus::degenerate: return "degenerate";
  }
  return "?";
}

struct FcmSliceResult {
  FcmStatus status = FcmStatus::no_sign_change;
  std::vector<FcmRoot> roots;
  std::vector<std::pair<double, double>> profile;  // (s, Psi) on the grid
};

inline FcmSliceResult fcm_zero_set(const VectorFieldModel& model, const FcmSliceConfig& cfg) {
  if (cfg.base.size() != model.dim()) throw ShapeError("slice base point dimension does not match model");
  if (cfg.search_index < 0 || cfg.search_index >= model.dim())
    throw ParameterError("slice search coordinate index out of range");
  if (!(cfg.hi > cfg.lo)) throw ParameterError("search interval must satisfy lo < hi");
  if (cfg.grid_points < 2) throw ParameterError("fcm grid needs at least 2 points");
  model.require_flow_order(model.dim() - 1);

  auto psi_at = [&](double s) {
    Vector x = cfg.base;
    x[cfg.search_index] = s;
    return psi(model, x);
  };
  auto sign = [](double v) { return (v > 0.0) - (v < 0.0); };

  FcmSliceResult res;
  const int m = cfg.grid_points;
  double peak = 0.0;
  for (int i = 0; i < m; ++i) {
    const double s = i == m - 1 ? cfg.hi : cfg.lo + (cfg.hi - cfg.lo) * i / (m - 1);
    const double v = psi_at(s);
    res.profile.emplace_back(s, v);
    peak = std::max(peak, std::abs(v));
  }
  if (peak < cfg.degenerate_threshold) {
    res.status = FcmStatus::degenerate;
    return res;
  }

  const auto& p = res.profile;
  for (int i = 0; i < m; ++i) {
    const int si = sign(p[i].second);
    // Exact zero on a grid point: a crossing if the neighbours disagree in sign.
    if (si == 0) {
      const int left = i > 0 ? sign(p[i - 1].second) : 0;
      const int right = i + 1 < m ? sign(p[i + 1].second) : 0;
      if (left != 0 && right != 0 && left != right)
        res.roots.push_back({p[i].first, right, RootMethod::bisect});
      else
        res.roots.push_back({p[i].first, 0, RootMethod::dip});
      continue;
    }
    if (i + 1 < m && si * sign(p[i + 1].second) < 0) {
      double a = p[i].first, b = p[i + 1].first;
      double fa = p[i].second;
      while (b - a > cfg.tol) {
        const double mid = 0.5 * (a + b);
        const double fm = psi_at(mid);
        if (fm == 0.0) {
          a = b = mid;
          break;
        }
        if (sign(fm) == sign(fa)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      res.roots.push_back({0.5 * (a + b), -si, RootMethod::bisect});
      continue;
    }
    // Touching zero: small local minimum of |Psi| with no sign change around it.
    if (i > 0 && i + 1 < m && std::abs(p[i].second) < cfg.dip_threshold &&
        std::abs(p[i].second) <= std::abs(p[i - 1].second) && std::abs(p[i].second) <= std::abs(p[i + 1].second) &&
        sign(p[i - 1].second) == si && sign(p[i + 1].second) == si)
      res.roots.push_back({p[i].first, 0, RootMethod::dip});
  }
  res.status = res.roots.empty() ? FcmStatus::no_sign_change : FcmStatus::ok;
  return res;
}

}  // namespace geostretch
