#pragma once

// Subcommand implementations behind the `geostretch` tool. Every run is
// described by a RunConfig; defaults are written back into it before any
// output so the echoed block alone reproduces the run.

#include <algorithm>
#include <cstdlib>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "geostretch/acceptance.hpp"
#include "geostretch/cli/config.hpp"
#include "geostretch/cli/io.hpp"
#include "geostretch/curvature.hpp"
#include "geostretch/fcm.hpp"
#include "geostretch/fmanifold.hpp"
#include "geostretch/geodesics.hpp"
#include "geostretch/models.hpp"
#include "geostretch/stretching.hpp"

namespace geostretch::cli {

/// Worker count from GEOSTRETCH_THREADS, else the hardware concurrency.
inline int thread_budget() {
  if (const char* env = std::getenv("GEOSTRETCH_THREADS")) {
    const long v = parse_long("GEOSTRETCH_THREADS", env);
    if (v < 1) throw UsageError("GEOSTRETCH_THREADS", "must be a positive integer");
    return static_cast<int>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// ---------------------------------------------------------------------------
// Config helpers

inline VectorFieldModel model_from_config(RunConfig& cfg) {
  const std::string id = cfg.get("model");
  ModelParameters defaults;
  try {
    defaults = default_parameters(id);
  } catch (const ParameterError& e) {
    throw UsageError("model", e.what());
  }
  ModelParameters overrides;
  for (const auto& [k, v] : cfg.values()) {
    if (k.rfind("param.", 0) != 0) continue;
    const std::string name = k.substr(6);
    if (!defaults.has(name)) throw UsageError(k, "model '" + id + "' has no parameter '" + name + "'");
    overrides.set(name, parse_double(k, v));
  }
  VectorFieldModel m = model_from_id(id, overrides);
  for (const auto& [name, value] : m.parameters().values())
    if (!cfg.has("param." + name)) cfg.set("param." + name, fmt(value));
  return m;
}

inline int riemann_sign(RunConfig& cfg) {
  if (!cfg.has("riemann-sign")) cfg.set("riemann-sign", "1");
  const long s = parse_long("riemann-sign", cfg.get("riemann-sign"));
  if (s != 1 && s != -1) throw UsageError("riemann-sign", "must be 1 or -1");
  return static_cast<int>(s);
}

inline Vector point_from_config(const RunConfig& cfg, const VectorFieldModel& m, const std::string& key) {
  const Vector x = parse_point(key, cfg.get(key));
  if (x.size() != m.dim())
    throw UsageError(key, "model '" + m.id() + "' needs " + std::to_string(m.dim()) + " coordinates");
  return x;
}

inline int coordinate(const VectorFieldModel& m, const std::string& key, const std::string& name) {
  try {
    return m.coordinate_index(name);
  } catch (const ParameterError& e) {
    throw UsageError(key, e.what());
  }
}

/// Base point of a slice from `fix = name=value[,name=value...]`; the listed
/// free coordinates are left at 0 and must not be fixed.
inline Vector slice_base(const RunConfig& cfg, const VectorFieldModel& m, const std::vector<int>& free) {
  Vector base = Vector::Zero(m.dim());
  std::vector<bool> set(m.dim(), false);
  for (int i : free) set[i] = true;
  if (cfg.has("fix")) {
    for (const auto& item : split(cfg.get("fix"), ',')) {
      const Assignment a = parse_assignment("fix", item);
      const int i = coordinate(m, "fix", a.name);
      if (set[i]) throw UsageError("fix", "coordinate " + a.name + " is searched, swept or fixed twice");
      base[i] = parse_double("fix", a.value);
      set[i] = true;
    }
  }
  for (int i = 0; i < m.dim(); ++i)
    if (!set[i]) throw UsageError("fix", "coordinate " + m.coordinate_names()[i] + " is neither fixed nor searched");
  return base;
}

inline std::string default_or(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (!cfg.has(key)) cfg.set(key, value);
  return cfg.get(key);
}

// ---------------------------------------------------------------------------
// Output

struct Outputs {
  std::ostream& out;
  std::ostream& err;
};

/// Writes the CSV to `output` (atomically) or to stdout, plus an optional plot script.
inline void emit(const RunConfig& cfg, const CsvDocument& doc, const std::string& plot_body, Outputs io) {
  if (cfg.has("output")) {
    write_atomic(cfg.get("output"), doc.text());
  } else {
    io.out << doc.text();
  }
  if (cfg.has("plot")) {
    if (!cfg.has("output")) throw UsageError("plot", "a plot script needs an output CSV path");
    std::string script = "# gnuplot script for " + cfg.get("output") + "\n";
    script += "set datafile separator ','\nset datafile commentschars '#'\nset key autotitle columnhead\n";
    script += "data = '" + cfg.get("output") + "'\n" + plot_body;
    write_atomic(cfg.get("plot"), script);
  }
}

inline std::string matrix_text(const Matrix& m) {
  std::string s;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    s += " ";
    for (Eigen::Index j = 0; j < m.cols(); ++j) s += " " + fmt(m(i, j));
    s += "\n";
  }
  return s;
}

// ---------------------------------------------------------------------------
// Subcommands

inline int cmd_metric_eval(RunConfig& cfg, Outputs io) {
  const VectorFieldModel m = model_from_config(cfg);
  const Vector x = point_from_config(cfg, m, "point");
  const double tau = parse_double("tau", default_or(cfg, "tau", "0"));
  const MetricValue g = metric_at(m, ExtendedPoint(x, tau));
  if (cfg.has("output")) {
    std::vector<std::string> cols{"matrix", "row"};
    for (int j = 0; j < g.size(); ++j) cols.push_back("c" + std::to_string(j + 1));
    CsvDocument doc(cfg, cols);
    for (const auto& [name, mat] : {std::pair<const char*, const Matrix*>{"g", &g.g}, {"g_inv", &g.g_inv}})
      for (int i = 0; i < g.size(); ++i) {
        std::vector<std::string> r{name, std::to_string(i + 1)};
        for (int j = 0; j < g.size(); ++j) r.push_back(fmt((*mat)(i, j)));
        doc.row(r);
      }
    emit(cfg, doc, "", io);
  }
  io.out << "g =\n" << matrix_text(g.g) << "g_inv =\n" << matrix_text(g.g_inv);
  io.out << "det = " << fmt(g.g.determinant()) << "\n";
  return 0;
}

inline int cmd_curvature_eval(RunConfig& cfg, Outputs io) {
  const VectorFieldModel m = model_from_config(cfg);
  CurvatureOptions copt;
  copt.riemann_sign = riemann_sign(cfg);
  const Vector x = point_from_config(cfg, m, "point");
  const double tau = parse_double("tau", default_or(cfg, "tau", "0"));
  const CurvatureBundle b = curvature_at(m, ExtendedPoint(x, tau), copt);
  const int d = b.metric.size();
  const int n = m.dim();

  std::vector<std::pair<std::string, TangentVector>> probes;
  for (int i = 0; i < n; ++i) probes.emplace_back("d_" + m.coordinate_names()[i], TangentVector::basis(n, i));
  if (n == 2 && b.flow.state_part().norm() > 0.0) {
    const SubspaceBasis sb = trajectory_split(b.flow.state_part());
    probes.emplace_back("v_tan", sb.tangential.front());
    probes.emplace_back("v_orth", sb.orthogonal.front());
  }
  std::vector<std::pair<std::string, double>> sectional;
  for (const auto& [name, v] : probes) {
    try {
      sectional.emplace_back(name, sectional_curvature(b, v));
    } catch (const DegeneracyError&) {
      sectional.emplace_back(name, std::numeric_limits<double>::quiet_NaN());
    }
  }

  for (int k = 0; k < d; ++k) {
    Matrix slice(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) slice(i, j) = b.gamma(k, i, j);
    io.out << "Gamma^" << (k + 1) << "_ij =\n" << matrix_text(slice);
  }
  io.out << "S =\n" << matrix_text(b.s_matrix);
  for (const auto& [name, k] : sectional) io.out << "K(T, " << name << ") = " << fmt(k) << "\n";

  if (cfg.has("output")) {
    CsvDocument doc(cfg, {"quantity", "index", "value"});
    for (int k = 0; k < d; ++k)
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          doc.row({"gamma", std::to_string(k + 1) + "." + std::to_string(i + 1) + "." + std::to_string(j + 1),
                   fmt(b.gamma(k, i, j))});
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        doc.row({"S", std::to_string(i + 1) + "." + std::to_string(j + 1), fmt(b.s_matrix(i, j))});
    for (const auto& [name, k] : sectional) doc.row({"sectional", name, fmt(k)});
    emit(cfg, doc, "", io);
  }
  return 0;
}

struct SearchSetting {
  int index = 0;
  std::string name;
  GridSpec grid;
};

inline SearchSetting search_from_config(const RunConfig& cfg, const VectorFieldModel& m) {
  const Assignment a = parse_assignment("search", cfg.get("search"));
  return {coordinate(m, "search", a.name), a.name, parse_grid("search", a.value)};
}

inline MinimizeOptions minimize_from_config(RunConfig& cfg) {
  MinimizeOptions mo;
  mo.grid_points = static_cast<int>(parse_long("grid", default_or(cfg, "grid", "64")));
  mo.tol = parse_double("tol", default_or(cfg, "tol", "1e-08"));
  if (mo.grid_points < 3) throw UsageError("grid", "needs at least 3 points");
  if (!(mo.tol > 0.0)) throw UsageError("tol", "must be positive");
  return mo;
}

inline Objective objective_from_config(RunConfig& cfg) {
  try {
    return parse_objective(default_or(cfg, "objective", "tan-min"));
  } catch (const ParameterError& e) {
    throw UsageError("objective", e.what());
  }
}

inline int cmd_stretch_slice(RunConfig& cfg, Outputs io) {
  const VectorFieldModel m = model_from_config(cfg);
  const SearchSetting s = search_from_config(cfg, m);
  SliceConfig sc;
  sc.base = slice_base(cfg, m, {s.index});
  sc.search_index = s.index;
  sc.lo = s.grid.lo;
  sc.hi = s.grid.hi;
  sc.objective = objective_from_config(cfg);
  sc.search = minimize_from_config(cfg);
  sc.curvature.riemann_sign = riemann_sign(cfg);
  sc.tau = parse_double("tau", default_or(cfg, "tau", "0"));

  const auto rows = slice_profile(m, sc, s.grid.points(21));
  const LocateResult loc = locate_sim_point(m, sc);

  CsvDocument doc(cfg, {s.name, "theta_tan", "theta_orth", "objective"});
  for (const auto& r : rows) doc.row({fmt(r.x), fmt(r.theta.tangential), fmt(r.theta.orthogonal), fmt(r.objective)});
  std::ostringstream summary;
  summary << "status = " << status_name(loc.status) << ", located " << s.name << " = " << fmt(loc.located)
          << ", theta_tan = " << fmt(loc.theta.tangential) << ", theta_orth = " << fmt(loc.theta.orthogonal);
  if (!loc.message.empty()) summary << " (" << loc.message << ")";
  const std::string plot = "set multiplot layout 2,1\nset xlabel '" + s.name +
                           "'\nplot data using 1:2 with linespoints\nplot data using 1:3 with linespoints\n"
                           "unset multiplot\n";
  emit(cfg, doc, plot, io);
  (cfg.has("output") ? io.out : io.err) << summary.str() << "\n";
  if (loc.status != LocateStatus::ok) {
    io.err << "no interior extremum; grid profile (" << s.name << ", objective):\n";
    for (const auto& r : loc.profile) io.err << "  " << fmt(r.x) << ", " << fmt(r.objective) << "\n";
    return 1;
  }
  return 0;
}

inline int cmd_sim_sweep(RunConfig& cfg, Outputs io) {
  const VectorFieldModel m = model_from_config(cfg);
  const Assignment slow = parse_assignment("slow", cfg.get("slow"));
  const int slow_index = coordinate(m, "slow", slow.name);
  const GridSpec slow_grid = parse_grid("slow", slow.value);

  SweepConfig sw;
  sw.slow_index = slow_index;
  if (!cfg.has("search")) {
    SliceLayout layout;
    try {
      layout = default_slice_layout(m.id());
    } catch (const ParameterError&) {
      throw UsageError("search", "required for this model");
    }
    if (layout.slow_index != slow_index)
      throw UsageError("search", "no default search coordinate for slow coordinate " + slow.name);
    cfg.set("search", m.coordinate_names()[layout.fast_index] + "=" + fmt(layout.search_lo) + ":" +
                          fmt(layout.search_hi));
  }
  const SearchSetting s = search_from_config(cfg, m);
  if (s.index == slow_index) throw UsageError("search", "searched and slow coordinates coincide");
  sw.slice.base = slice_base(cfg, m, {s.index, slow_index});
  sw.slice.search_index = s.index;
  sw.slice.lo = s.grid.lo;
  sw.slice.hi = s.grid.hi;
  sw.slice.objective = objective_from_config(cfg);
  sw.slice.search = minimize_from_config(cfg);
  sw.slice.curvature.riemann_sign = riemann_sign(cfg);
  sw.slice.tau = parse_double("tau", default_or(cfg, "tau", "0"));
  sw.threads = thread_budget();

  const SimCurve curve = sweep_sim_curve(m, slow_grid.points(17), sw);
  CsvDocument doc(cfg, {"slow", "located", "theta_tan", "theta_orth", "status"});
  int failures = 0;
  for (const auto& r : curve.records) {
    doc.row({fmt(r.slow), fmt(r.located), fmt(r.theta_tan), fmt(r.theta_orth), status_name(r.status)});
    if (r.status != LocateStatus::ok) {
      ++failures;
      io.err << "row " << slow.name << " = " << fmt(r.slow) << ": " << status_name(r.status) << " " << r.message
             << "\n";
    }
  }
  emit(cfg, doc,
       "set xlabel '" + s.name + "'\nset ylabel '" + slow.name + "'\nplot data using 2:1 with linespoints\n", io);
  return failures ? 1 : 0;
}

inline int cmd_fcm_slice(RunConfig& cfg, Outputs io) {
  const VectorFieldModel m = model_from_config(cfg);
  const SearchSetting s = search_from_config(cfg, m);
  FcmSliceConfig fc;
  fc.base = slice_base(cfg, m, {s.index});
  fc.search_index = s.index;
  fc.lo = s.grid.lo;
  fc.hi = s.grid.hi;
  fc.grid_points = static_cast<int>(parse_long("grid", default_or(cfg, "grid", "256")));
  fc.tol = parse_double("tol", default_or(cfg, "tol", "1e-10"));
  if (fc.grid_points < 2) throw UsageError("grid", "needs at least 2 points");
  if (!(fc.tol > 0.0)) throw UsageError("tol", "must be positive");

  const FcmSliceResult r = fcm_zero_set(m, fc);
  CsvDocument doc(cfg, {"root", "psi_slope_sign", "method"});
  for (const auto& root : r.roots) doc.row({fmt(root.x), std::to_string(root.slope_sign), root_method_name(root.method)});
  emit(cfg, doc, "set xlabel '" + s.name + "'\nplot data using 1:(0) with points pt 7\n", io);
  (cfg.has("output") ? io.out : io.err) << "status = " << fcm_status_name(r.status) << ", roots = " << r.roots.size()
                                        << "\n";
  if (r.status != FcmStatus::ok) {
    io.err << "grid profile (" << s.name << ", psi):\n";
    for (const auto& [x, v] : r.profile) io.err << "  " << fmt(x) << ", " << fmt(v) << "\n";
  }
  return 0;
}

inline int cmd_geodesic_verify(RunConfig& cfg, Outputs io) {
  const VectorFieldModel m = model_from_config(cfg);
  const Vector x0 = point_from_config(cfg, m, "start");
  const double tau0 = parse_double("tau", default_or(cfg, "tau", "0"));
  const double t_end = parse_double("t-end", default_or(cfg, "t-end", "5"));
  IntegrateOptions opt;
  opt.tol = parse_double("tol", default_or(cfg, "tol", "1e-10"));
  opt.stride = parse_double("stride", default_or(cfg, "stride", fmt(t_end / 100.0)));
  const double bound = parse_double("bound", default_or(cfg, "bound", "1e-06"));

  Trajectory tr;
  try {
    tr = integrate_extended(m, ExtendedPoint(x0, tau0), t_end, opt);
  } catch (const IntegrationError& e) {
    io.err << "integration failed at t = " << fmt(e.time()) << ": " << e.what() << "\nlast good state:";
    for (Eigen::Index i = 0; i < e.last_good().x.size(); ++i) io.err << " " << fmt(e.last_good().x[i]);
    io.err << " tau " << fmt(e.last_good().tau) << "\n";
    return 1;
  }
  const auto res = geodesic_residual(m, tr);
  const auto speed = unit_speed_deviation(m, tr);
  const double max_res = *std::max_element(res.begin(), res.end());
  const double max_speed = *std::max_element(speed.begin(), speed.end());

  if (cfg.has("output")) {
    std::vector<std::string> cols{"t"};
    for (const auto& c : m.coordinate_names()) cols.push_back(c);
    cols.insert(cols.end(), {"tau", "residual", "unit_speed_deviation"});
    CsvDocument doc(cfg, cols);
    for (std::size_t i = 0; i < tr.size(); ++i) {
      std::vector<std::string> r{fmt(tr.t[i])};
      for (Eigen::Index k = 0; k < tr.points[i].x.size(); ++k) r.push_back(fmt(tr.points[i].x[k]));
      r.insert(r.end(), {fmt(tr.points[i].tau), fmt(res[i]), fmt(speed[i])});
      doc.row(r);
    }
    emit(cfg, doc, "set xlabel 't'\nplot data using 1:2 with lines, data using 1:3 with lines\n", io);
  }
  io.out << "samples = " << tr.size() << ", steps = " << tr.stats.steps << ", rejected = " << tr.stats.rejected
         << "\nmax geodesic residual = " << fmt(max_res) << " (bound " << fmt(bound) << ")"
         << "\nmax |g(T,T) - 1| = " << fmt(max_speed) << "\n";
  return max_res <= bound ? 0 : 1;
}

inline int cmd_reproduce(RunConfig& cfg, Outputs io) {
  const std::string suite = default_or(cfg, "suite", "paper-figures");
  acceptance::Options opt;
  const long seed = parse_long("seed", default_or(cfg, "seed", "7"));
  if (seed < 0) throw UsageError("seed", "must be non-negative");
  opt.seed = static_cast<std::uint64_t>(seed);
  opt.riemann_sign = riemann_sign(cfg);
  opt.threads = thread_budget();
  acceptance::Report rep;
  if (suite == "paper-figures")
    rep = acceptance::figure_suite(opt);
  else if (suite == "invariants")
    rep = acceptance::invariants(opt);
  else
    throw UsageError("suite", "expected paper-figures or invariants, got '" + suite + "'");
  const std::string table = acceptance::format_table(rep) + acceptance::format_criteria(rep);
  if (cfg.has("output")) write_atomic(cfg.get("output"), std::string(kEchoMarker) + "\n" + cfg.serialize("# ") + table);
  io.out << table;
  return rep.all_pass() ? 0 : 1;
}

/// Structured one-line description of a library error.
inline std::string describe(const std::exception& e) {
  const char* kind = "error";
  if (dynamic_cast<const DomainError*>(&e)) kind = "domain";
  else if (dynamic_cast<const CapabilityError*>(&e)) kind = "capability";
  else if (dynamic_cast<const ShapeError*>(&e)) kind = "shape";
  else if (dynamic_cast<const ParameterError*>(&e)) kind = "parameter";
  else if (dynamic_cast<const DegeneracyError*>(&e)) kind = "degeneracy";
  else if (dynamic_cast<const RankError*>(&e)) kind = "rank";
  else if (dynamic_cast<const NumericalError*>(&e)) kind = "numerical";
  return std::string("error[") + kind + "]: " + e.what();
}

/// Keys a command accepts besides `command`, `output`, `plot`, `riemann-sign` and `param.*`.
inline std::vector<std::string> command_keys(const std::string& cmd) {
  if (cmd == "metric eval" || cmd == "curvature eval") return {"model", "point", "tau"};
  if (cmd == "stretch slice") return {"model", "fix", "search", "objective", "grid", "tol", "tau"};
  if (cmd == "sim sweep") return {"model", "fix", "search", "slow", "objective", "grid", "tol", "tau"};
  if (cmd == "fcm slice") return {"model", "fix", "search", "grid", "tol"};
  if (cmd == "geodesic verify") return {"model", "start", "tau", "t-end", "tol", "stride", "bound"};
  if (cmd == "reproduce") return {"suite", "seed"};
  throw UsageError("command", "unknown command '" + cmd + "'");
}

inline void check_keys(const RunConfig& cfg, const std::string& cmd) {
  const auto keys = command_keys(cmd);
  for (const auto& [k, v] : cfg.values()) {
    if (k == "command" || k == "output" || k == "riemann-sign") continue;
    if (k == "plot" && cmd != "reproduce") continue;
    if (k.rfind("param.", 0) == 0 && cmd != "reproduce") continue;
    if (std::find(keys.begin(), keys.end(), k) == keys.end())
      throw UsageError(k, "not a setting of '" + cmd + "'");
  }
}

/// Dispatches on `command`. Exit status: 0 success, 1 computation failure, 2 usage error.
inline int run(RunConfig cfg, std::ostream& out, std::ostream& err) {
  Outputs io{out, err};
  try {
    const std::string cmd = cfg.get("command");
    check_keys(cfg, cmd);
    if (cmd == "metric eval") return cmd_metric_eval(cfg, io);
    if (cmd == "curvature eval") return cmd_curvature_eval(cfg, io);
    if (cmd == "stretch slice") return cmd_stretch_slice(cfg, io);
    if (cmd == "sim sweep") return cmd_sim_sweep(cfg, io);
    if (cmd == "fcm slice") return cmd_fcm_slice(cfg, io);
    if (cmd == "geodesic verify") return cmd_geodesic_verify(cfg, io);
    if (cmd == "reproduce") return cmd_reproduce(cfg, io);
    throw UsageError("command", "unknown command '" + cmd + "'");
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << describe(e) << "\n";
    return 1;
  }
}

}  // namespace geostretch::cli
