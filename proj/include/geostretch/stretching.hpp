#pragma once

// Stretching rates and the slice-wise SIM locator.
//
// Classical rate      omega_x(v) = <J v, v> / <v, v>
// Geodesic stretching theta_p(v) = g(S v, v) / g(v, v),  S(v) = R(T, v)T
//
// Along a slice (all coordinates fixed except one searched coordinate) the
// locator extremizes a rate derived from the tangential/orthogonal split of the
// pure-state space: coarse grid, then golden-section refinement of every
// interior local minimum of the objective.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "geostretch/curvature.hpp"
#include "geostretch/errors.hpp"
#include "geostretch/fmanifold.hpp"
#include "geostretch/models.hpp"

namespace geostretch {

inline double classical_stretching(const VectorFieldModel& model, const Vector& x, const Vector& v) {
  if (v.size() != model.dim()) throw ShapeError("classical_stretching: vector dimension does not match model");
  const double vv = v.squaredNorm();
  if (!(vv > 0.0)) throw DegeneracyError("classical_stretching: zero vector");
  const Matrix j = eval_jets(model, x, 1).jacobian;
  return v.dot(j * v) / vv;
}

inline double geodesic_stretching(const CurvatureBundle& b, const TangentVector& v) {
  const double vv = metric_apply(b.metric, v, v);
  if (!(vv > 0.0)) throw DegeneracyError("geodesic_stretching: zero vector");
  return metric_apply(b.metric, TangentVector(b.s_matrix * v.c), v) / vv;
}

inline double geodesic_stretching(const VectorFieldModel& model, const ExtendedPoint& p, const TangentVector& v,
                                  CurvatureOptions opt = {}) {
  return geodesic_stretching(curvature_at(model, p, opt), v);
}

enum class BasisOrigin { trajectory, user };

/// Tangential and orthogonal families of pure-state vectors.
struct SubspaceBasis {
  std::vector<TangentVector> tangential;
  std::vector<TangentVector> orthogonal;
  BasisOrigin origin = BasisOrigin::trajectory;
};

/// Planar split along the trajectory: v1 = (f1, f2), v2 = (f2, -f1).
inline SubspaceBasis trajectory_split(const Vector& f) {
  if (f.size() != 2) throw ShapeError("trajectory split requires a planar system (n = 2)");
  if (f[0] == 0.0 && f[1] == 0.0) throw DegeneracyError("trajectory split at an equilibrium point");
  SubspaceBasis b;
  b.origin = BasisOrigin::trajectory;
  b.tangential.push_back(TangentVector::pure_state(f));
  Vector o(2);
  o << f[1], -f[0];
  b.orthogonal.push_back(TangentVector::pure_state(o));
  return b;
}

inline SubspaceBasis subspace_split(const VectorFieldModel& model, const ExtendedPoint& p) {
  if (model.dim() != 2) throw ShapeError("trajectory split requires a planar system (n = 2)");
  return trajectory_split(model.eval(p.x));
}

/// User split: the supplied tangential vectors are kept as given; the
/// orthogonal family is their euclidean complement, completed by Gram-Schmidt
/// against the coordinate axes.
inline SubspaceBasis subspace_split(int n, const std::vector<Vector>& tangential) {
  const int k = static_cast<int>(tangential.size());
  if (k < 1 || k >= n)
    throw ParameterError("user split needs between 1 and n-1 tangential vectors, got " + std::to_string(k));
  std::vector<Vector> ortho;  // orthonormal basis of the running span
  auto reduce = [&ortho](Vector v) {
    for (int pass = 0; pass < 2; ++pass)
      for (const Vector& q : ortho) v -= q.dot(v) * q;
    return v;
  };
  SubspaceBasis b;
  b.origin = BasisOrigin::user;
  for (int i = 0; i < k; ++i) {
    const Vector& v = tangential[i];
    if (v.size() != n) throw ShapeError("user tangential vector " + std::to_string(i) + " has wrong dimension");
    const double scale = v.norm();
    Vector r = reduce(v);
    if (!(scale > 0.0) || r.norm() <= 1e-12 * scale)
      throw RankError("user tangential vectors are linearly dependent (vector " + std::to_string(i) + ")");
    ortho.push_back(r / r.norm());
    b.tangential.push_back(TangentVector::pure_state(v));
  }
  for (int axis = 0; axis < n && static_cast<int>(ortho.size()) < n; ++axis) {
    Vector r = reduce(Vector::Unit(n, axis));
    if (r.norm() <= 1e-8) continue;
    r /= r.norm();
    ortho.push_back(r);
    b.orthogonal.push_back(TangentVector::pure_state(r));
  }
  return b;
}

struct ThetaPair {
  double tangential = 0.0;
  double orthogonal = 0.0;
};

/// Largest value of theta over span(vectors).
inline double theta_max(const CurvatureBundle& b, const std::vector<TangentVector>& vectors) {
  if (vectors.empty()) throw DegeneracyError("theta over an empty subspace");
  if (vectors.size() == 1) return geodesic_stretching(b, vectors.front());
  const int d = b.metric.size();
  const int k = static_cast<int>(vectors.size());
  Matrix v(d, k);
  for (int i = 0; i < k; ++i) {
    if (vectors[i].size() != d) throw ShapeError("subspace vector dimension does not match point");
    v.col(i) = vectors[i].c;
  }
  const Matrix gs = b.metric.g * b.s_matrix;
  const Matrix form = v.transpose() * (0.5 * (gs + gs.transpose())) * v;
  const Matrix gram = v.transpose() * b.metric.g * v;
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(form, gram);
  if (es.info() != Eigen::Success) throw DegeneracyError("subspace vectors are degenerate under the metric");
  return es.eigenvalues().maxCoeff();
}

inline ThetaPair theta_extrema(const CurvatureBundle& b, const SubspaceBasis& basis) {
  return {theta_max(b, basis.tangential), theta_max(b, basis.orthogonal)};
}

inline ThetaPair theta_extrema(const VectorFieldModel& model, const ExtendedPoint& p, const SubspaceBasis& basis,
                               CurvatureOptions opt = {}) {
  return theta_extrema(curvature_at(model, p, opt), basis);
}

// ---------------------------------------------------------------------------
// Locator

enum class Objective { tan_min, orth_max, ratio_max };

inline const char* objective_name(Objective o) {
  switch (o) {
    case Objective::tan_min: return "tan-min";
    case Objective::orth_max: return "orth-max";
    case Objective::ratio_max: return "ratio-max";
  }
  return "?";
}

inline Objective parse_objective(const std::string& s) {
  if (s == "tan-min") return Objective::tan_min;
  if (s == "orth-max") return Objective::orth_max;
  if (s == "ratio-max") return Objective::ratio_max;
  throw ParameterError("unknown objective '" + s + "' (expected tan-min, orth-max or ratio-max)");
}

/// Quantity minimized by the locator. NaN where the ratio is undefined (theta_tan = 0).
inline double objective_value(Objective o, const ThetaPair& t) {
  switch (o) {
    case Objective::tan_min: return t.tangential;
    case Objective::orth_max: return -t.orthogonal;
    case Objective::ratio_max:
      if (t.tangential == 0.0) return std::numeric_limits<double>::quiet_NaN();
      return -t.orthogonal / std::abs(t.tangential);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

enum class LocateStatus { ok, boundary, failed };

inline const char* status_name(LocateStatus s) {
  switch (s) {
    case LocateStatus::ok: return "ok";
    case LocateStatus::boundary: return "boundary";
    case LocateStatus::failed: return "failed";
  }
  return "?";
}

struct MinimizeOptions {
  int grid_points = 64;
  double tol = 1e-8;
};

struct Candidate {
  double x = 0.0;
  double value = 0.0;
};

/// Interior minimum search of a scalar function on [lo, hi].
struct MinimizeResult {
  LocateStatus status = LocateStatus::failed;
  double x = std::numeric_limits<double>::quiet_NaN();
  double value = std::numeric_limits<double>::quiet_NaN();
  std::vector<Candidate> candidates;  // every refined interior minimum
  std::vector<Candidate> profile;     // coarse grid
  std::string message;
};

inline Candidate golden_section(const std::function<double(double)>& fn, double a, double b, double tol) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = fn(c), fd = fn(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = fn(d);
    }
  }
  const double x = 0.5 * (a + b);
  const double fx = fn(x);
  Candidate best{x, fx};
  if (fc < best.value) best = {c, fc};
  if (fd < best.value) best = {d, fd};
  return best;
}

/// Grid scan followed by golden-section refinement of each interior local
/// minimum. The best candidate has the smallest value; values equal within
/// 1e-12 are resolved toward the smaller coordinate.
inline MinimizeResult minimize_on_interval(const std::function<double(double)>& fn, double lo, double hi,
                                           MinimizeOptions opt = {}) {
  if (!(hi > lo)) throw ParameterError("search interval must satisfy lo < hi");
  if (opt.grid_points < 3) throw ParameterError("search grid needs at least 3 points");
  if (!(opt.tol > 0.0)) throw ParameterError("search tolerance must be positive");
  MinimizeResult res;
  const int m = opt.grid_points;
  res.profile.resize(m);
  for (int i = 0; i < m; ++i) {
    const double x = i == m - 1 ? hi : lo + (hi - lo) * i / (m - 1);
    res.profile[i] = {x, fn(x)};
  }
  const auto& p = res.profile;
  for (int i = 1; i + 1 < m; ++i) {
    const double v = p[i].value;
    if (!std::isfinite(v) || !std::isfinite(p[i - 1].value) || !std::isfinite(p[i + 1].value)) continue;
    if (v < p[i - 1].value && v <= p[i + 1].value) {
      Candidate c = golden_section(fn, p[i - 1].x, p[i + 1].x, opt.tol);
      if (c.x - lo > opt.tol && hi - c.x > opt.tol) res.candidates.push_back(c);
    }
  }
  if (!res.candidates.empty()) {
    Candidate best = res.candidates.front();
    for (const Candidate& c : res.candidates) {
      if (c.value < best.value - 1e-12 || (std::abs(c.value - best.value) <= 1e-12 && c.x < best.x)) best = c;
    }
    res.status = LocateStatus::ok;
    res.x = best.x;
    res.value = best.value;
    return res;
  }
  // No interior minimum: report the smaller finite endpoint if it is the grid minimum.
  int arg = -1;
  for (int i = 0; i < m; ++i)
    if (std::isfinite(p[i].value) && (arg < 0 || p[i].value < p[arg].value)) arg = i;
  if (arg == 0 || arg == m - 1) {
    res.status = LocateStatus::boundary;
    res.x = p[arg].x;
    res.value = p[arg].value;
    res.message = "extremum at the search interval boundary";
  } else {
    res.status = LocateStatus::failed;
    res.message = arg < 0 ? "objective undefined on the whole grid" : "no interior extremum on the grid";
  }
  return res;
}

/// A one-dimensional slice of state space: `base` with coordinate
/// `search_index` varied over [lo, hi].
struct SliceConfig {
  Vector base;
  int search_index = 1;
  double lo = 0.0;
  double hi = 1.0;
  Objective objective = Objective::tan_min;
  MinimizeOptions search;
  CurvatureOptions curvature;
  double tau = 0.0;
  /// Subspace split at a point; defaults to the trajectory split.
  std::function<SubspaceBasis(const VectorFieldModel&, const ExtendedPoint&)> basis;
};

inline ThetaPair slice_thetas(const VectorFieldModel& model, const SliceConfig& cfg, double s) {
  Vector x = cfg.base;
  x[cfg.search_index] = s;
  ExtendedPoint p(x, cfg.tau);
  CurvatureBundle b = curvature_at(model, p, cfg.curvature);
  SubspaceBasis basis = cfg.basis ? cfg.basis(model, p) : trajectory_split(b.flow.state_part());
  return theta_extrema(b, basis);
}

struct SliceProfileRow {
  double x = 0.0;
  ThetaPair theta;
  double objective = 0.0;
};

struct LocateResult {
  LocateStatus status = LocateStatus::failed;
  double located = std::numeric_limits<double>::quiet_NaN();
  ThetaPair theta{std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  double objective = std::numeric_limits<double>::quiet_NaN();
  std::vector<Candidate> candidates;
  std::vector<SliceProfileRow> profile;
  std::string message;
};

inline void validate_slice(const VectorFieldModel& model, const SliceConfig& cfg) {
  if (cfg.base.size() != model.dim()) throw ShapeError("slice base point dimension does not match model");
  if (cfg.search_index < 0 || cfg.search_index >= model.dim())
    throw ParameterError("slice search coordinate index out of range");
  if (!(cfg.hi > cfg.lo)) throw ParameterError("search interval must satisfy lo < hi");
  model.require_partial_order(2);
}

inline LocateResult locate_sim_point(const VectorFieldModel& model, const SliceConfig& cfg) {
  validate_slice(model, cfg);
  auto fn = [&](double s) { return objective_value(cfg.objective, slice_thetas(model, cfg, s)); };
  MinimizeResult m = minimize_on_interval(fn, cfg.lo, cfg.hi, cfg.search);
  LocateResult r;
  r.status = m.status;
  r.candidates = m.candidates;
  r.message = m.message;
  for (const Candidate& c : m.profile) {
    r.profile.push_back({c.x, slice_thetas(model, cfg, c.x), c.value});
  }
  if (m.status != LocateStatus::failed) {
    r.located = m.x;
    r.objective = m.value;
    r.theta = slice_thetas(model, cfg, m.x);
  }
  return r;
}

/// theta along a slice at the given coordinates, without locating anything.
inline std::vector<SliceProfileRow> slice_profile(const VectorFieldModel& model, const SliceConfig& cfg,
                                                  const std::vector<double>& coords) {
  if (cfg.base.size() != model.dim()) throw ShapeError("slice base point dimension does not match model");
  std::vector<SliceProfileRow> out;
  out.reserve(coords.size());
  for (double s : coords) {
    ThetaPair t = slice_thetas(model, cfg, s);
    out.push_back({s, t, objective_value(cfg.objective, t)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sweep

struct SimRecord {
  double slow = 0.0;
  double located = std::numeric_limits<double>::quiet_NaN();
  double theta_tan = std::numeric_limits<double>::quiet_NaN();
  double theta_orth = std::numeric_limits<double>::quiet_NaN();
  LocateStatus status = LocateStatus::failed;
  std::string message;
};

struct SweepConfig {
  /// Slice template; the slow coordinate of `base` is overwritten per row.
  SliceConfig slice;
  int slow_index = 0;
  /// Search window per slow value; overrides slice.lo / slice.hi when set.
  std::function<std::pair<double, double>(double)> window;
  int threads = 1;
};

struct SimCurve {
  std::string model_id;
  SweepConfig config;
  std::vector<SimRecord> records;
};

inline SimRecord locate_row(const VectorFieldModel& model, const SweepConfig& cfg, double slow) {
  SimRecord rec;
  rec.slow = slow;
  try {
    SliceConfig s = cfg.slice;
    s.base[cfg.slow_index] = slow;
    if (cfg.window) std::tie(s.lo, s.hi) = cfg.window(slow);
    LocateResult r = locate_sim_point(model, s);
    rec.status = r.status;
    rec.message = r.message;
    rec.located = r.located;
    rec.theta_tan = r.theta.tangential;
    rec.theta_orth = r.theta.orthogonal;
  } catch (const Error& e) {
    rec.status = LocateStatus::failed;
    rec.message = e.what();
  }
  return rec;
}

/// Locates one SIM point per slow value. Rows are independent and may be
/// computed concurrently; output order follows `slow_grid`.
inline SimCurve sweep_sim_curve(const VectorFieldModel& model, const std::vector<double>& slow_grid,
                                const SweepConfig& cfg) {
  if (cfg.slow_index < 0 || cfg.slow_index >= model.dim()) throw ParameterError("slow coordinate index out of range");
  if (cfg.slow_index == cfg.slice.search_index) throw ParameterError("slow and searched coordinates coincide");
  if (cfg.slice.base.size() != model.dim()) throw ShapeError("slice base point dimension does not match model");
  for (std::size_t i = 1; i < slow_grid.size(); ++i)
    if (!(slow_grid[i] > slow_grid[i - 1])) throw ParameterError("slow grid must be strictly increasing");
  model.require_partial_order(2);

  SimCurve curve;
  curve.model_id = model.id();
  curve.config = cfg;
  curve.records.resize(slow_grid.size());
  const int workers = std::max(1, std::min<int>(cfg.threads, static_cast<int>(slow_grid.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < slow_grid.size(); ++i) curve.records[i] = locate_row(model, cfg, slow_grid[i]);
    return curve;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < slow_grid.size(); i = next++)
        curve.records[i] = locate_row(model, cfg, slow_grid[i]);
    });
  }
  for (auto& t : pool) t.join();
  return curve;
}

}  // namespace geostretch
