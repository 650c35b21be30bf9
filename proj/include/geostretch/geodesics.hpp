#pragma once

// Integration of the extended system x' = f(x), tau' = 1 and the geodesic
// residual of its solutions on the f-manifold.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "geostretch/curvature.hpp"
#include "geostretch/errors.hpp"
#include "geostretch/fmanifold.hpp"
#include "geostretch/models.hpp"

namespace geostretch {

struct IntegratorStats {
  long steps = 0;
  long rejected = 0;
  double tol = 0.0;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<ExtendedPoint> points;
  IntegratorStats stats;

  std::size_t size() const { return t.size(); }
};

/// Integration stopped early; carries the last accepted state.
class IntegrationError : public Error {
public:
  IntegrationError(const std::string& what, double t, ExtendedPoint last)
      : Error(what), t_(t), last_(std::move(last)) {}
  double time() const { return t_; }
  const ExtendedPoint& last_good() const { return last_; }

private:
  double t_;
  ExtendedPoint last_;
};

struct IntegrateOptions {
  double tol = 1e-10;
  /// Sample spacing; non-positive means 100 samples over [0, t_end].
  double stride = 0.0;
  double min_step = 1e-14;
  long max_steps = 10'000'000;
};

namespace detail {

// Dormand-Prince 5(4) tableau.
struct DormandPrince {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
};

}  // namespace detail

/// Adaptive Dormand-Prince 5(4) integration from `start` over [0, t_end].
/// Samples are taken at multiples of the stride (steps are shortened to land on
/// them) and at t_end. tau is integrated alongside x.
inline Trajectory integrate_extended(const VectorFieldModel& model, const ExtendedPoint& start, double t_end,
                                     IntegrateOptions opt = {}) {
  if (!(opt.tol > 0.0)) throw ParameterError("integration tolerance must be positive");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ParameterError("t_end must be positive and finite");
  if (!std::isfinite(start.tau)) throw DomainError("start time tau is not finite");
  const int n = model.dim();
  if (start.dim() != n) throw ShapeError("start point dimension does not match model");
  using DP = detail::DormandPrince;

  auto rhs = [&](const Vector& y) {
    Vector dy(n + 1);
    dy.head(n) = model.eval(y.head(n));
    dy[n] = 1.0;
    return dy;
  };

  const double stride = opt.stride > 0.0 ? opt.stride : t_end / 100.0;
  Trajectory tr;
  tr.stats.tol = opt.tol;
  Vector y = start.coords();
  double t = 0.0;
  tr.t.push_back(t);
  tr.points.push_back(start);

  Vector k1;
  try {
    k1 = rhs(y);
  } catch (const DomainError& e) {
    throw IntegrationError(std::string("start point outside domain: ") + e.what(), t, start);
  }
  double h = std::min(stride, 0.01 * t_end);
  long sample = 1;
  while (t < t_end) {
    double t_next = std::min(t_end, sample * stride);
    if (t_end - t_next < 1e-9 * stride) t_next = t_end;
    const bool lands = t + h >= t_next;
    const double step = lands ? t_next - t : h;
    if (step < opt.min_step)
      throw IntegrationError("step size collapsed below " + std::to_string(opt.min_step), t,
                             ExtendedPoint(y.head(n), y[n]));
    if (tr.stats.steps + tr.stats.rejected >= opt.max_steps)
      throw IntegrationError("maximum number of steps exceeded", t, ExtendedPoint(y.head(n), y[n]));

    Vector y_new, err;
    Vector k7;
    bool domain_fail = false;
    try {
      const Vector k2 = rhs(y + step * (DP::a21 * k1));
      const Vector k3 = rhs(y + step * (DP::a31 * k1 + DP::a32 * k2));
      const Vector k4 = rhs(y + step * (DP::a41 * k1 + DP::a42 * k2 + DP::a43 * k3));
      const Vector k5 = rhs(y + step * (DP::a51 * k1 + DP::a52 * k2 + DP::a53 * k3 + DP::a54 * k4));
      const Vector k6 = rhs(y + step * (DP::a61 * k1 + DP::a62 * k2 + DP::a63 * k3 + DP::a64 * k4 + DP::a65 * k5));
      y_new = y + step * (DP::b1 * k1 + DP::b3 * k3 + DP::b4 * k4 + DP::b5 * k5 + DP::b6 * k6);
      k7 = rhs(y_new);
      err = step * (DP::e1 * k1 + DP::e3 * k3 + DP::e4 * k4 + DP::e5 * k5 + DP::e6 * k6 + DP::e7 * k7);
    } catch (const DomainError&) {
      domain_fail = true;
    }

    double ratio;
    if (domain_fail) {
      ratio = std::numeric_limits<double>::infinity();
    } else {
      ratio = 0.0;
      for (int i = 0; i <= n; ++i) {
        const double scale = opt.tol * (1.0 + std::max(std::abs(y[i]), std::abs(y_new[i])));
        ratio = std::max(ratio, std::abs(err[i]) / scale);
      }
      if (!std::isfinite(ratio)) ratio = std::numeric_limits<double>::infinity();
    }

    if (ratio <= 1.0) {
      ++tr.stats.steps;
      t = lands ? t_next : t + step;
      y = y_new;
      k1 = k7;
      if (lands) {
        tr.t.push_back(t);
        tr.points.emplace_back(y.head(n), y[n]);
        ++sample;
      }
      // Keep the controller's proposal independent of the shortened landing step.
      const double factor = ratio == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(ratio, -0.2), 0.2, 5.0);
      if (!lands || step >= h) h = step * factor;
    } else {
      ++tr.stats.rejected;
      const double factor = std::isfinite(ratio) ? std::clamp(0.9 * std::pow(ratio, -0.2), 0.1, 0.9) : 0.25;
      h = step * factor;
    }
  }
  return tr;
}

/// Euclidean norm of d2gamma/dt2 + Gamma(dgamma/dt, dgamma/dt) at p, for the
/// lifted solution through p with dgamma/dt = (f, 1) and d2gamma/dt2 = (J f, 0).
inline double geodesic_residual_at(const VectorFieldModel& model, const ExtendedPoint& p) {
  const FieldJet jet = eval_jets(model, p.x, 1);
  const int n = model.dim();
  const Christoffel gam = detail::christoffel_closed_form(jet.value, jet.jacobian);
  Vector vel(n + 1), acc = Vector::Zero(n + 1);
  vel << jet.value, 1.0;
  acc.head(n) = jet.jacobian * jet.value;
  Vector r = acc;
  for (int k = 0; k <= n; ++k)
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) r[k] += gam(k, i, j) * vel[i] * vel[j];
  return r.norm();
}

inline std::vector<double> geodesic_residual(const VectorFieldModel& model, const Trajectory& traj) {
  std::vector<double> out;
  out.reserve(traj.size());
  for (const auto& p : traj.points) out.push_back(geodesic_residual_at(model, p));
  return out;
}

/// |g(T, T) - 1| at every sample.
inline std::vector<double> unit_speed_deviation(const VectorFieldModel& model, const Trajectory& traj) {
  std::vector<double> out;
  out.reserve(traj.size());
  for (const auto& p : traj.points) {
    const TangentVector t = tangent_lift(model, p);
    out.push_back(std::abs(metric_apply(metric_at(model, p), t, t) - 1.0));
  }
  return out;
}

}  // namespace geostretch
