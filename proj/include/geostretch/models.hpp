#pragma once

// Smooth autonomous vector fields x' = f(x) with an exact derivative oracle.
//
// A model is built from a single generic functor
//
//     template <class S> void operator()(std::span<const S> x, std::span<S> out) const;
//
// which is instantiated for double, Dual<double>, Dual<Dual<double>> and
// Taylor. The four built-in test models additionally carry hand-written
// Jacobians and Hessians; those are what eval_jets returns for them, and the
// forward-mode path is kept for cross-checking (eval_jets_autodiff).

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "geostretch/autodiff.hpp"
#include "geostretch/errors.hpp"

namespace geostretch {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Named dimensionless model constants (gamma, eta, kappa, lambda, epsilon).
class ModelParameters {
public:
  ModelParameters() = default;
  ModelParameters(std::initializer_list<std::pair<const std::string, double>> init) : values_(init) {}

  bool has(const std::string& name) const { return values_.count(name) != 0; }
  double get(const std::string& name) const {
    auto it = values_.find(name);
    if (it == values_.end()) throw ParameterError("missing model parameter '" + name + "'");
    return it->second;
  }
  void set(const std::string& name, double value) { values_[name] = value; }
  const std::map<std::string, double>& values() const { return values_; }

private:
  std::map<std::string, double> values_;
};

/// Derivatives of f at one point. hessian[i](j, k) = d^2 f_i / dx_j dx_k.
struct FieldJet {
  Vector value;
  Matrix jacobian;
  std::vector<Matrix> hessian;
  int order = 0;
};

class VectorFieldModel {
public:
  template <class S>
  using Evaluator = std::function<void(std::span<const S>, std::span<S>)>;
  using DomainCheck = std::function<void(std::span<const double>)>;
  using JacobianFn = std::function<Matrix(const Vector&)>;
  using HessianFn = std::function<std::vector<Matrix>(const Vector&)>;

  /// Wraps a generic functor; all jet capabilities are available.
  template <class F>
  static VectorFieldModel from_generic(std::string id, std::vector<std::string> coordinates, F field,
                                       DomainCheck domain = {}, ModelParameters params = {}) {
    VectorFieldModel m(std::move(id), std::move(coordinates), std::move(domain), std::move(params));
    auto shared = std::make_shared<const F>(std::move(field));
    m.eval_ = [shared](std::span<const double> x, std::span<double> out) { (*shared)(x, out); };
    m.eval_dual_ = [shared](std::span<const Dual<double>> x, std::span<Dual<double>> out) { (*shared)(x, out); };
    m.eval_hyper_ = [shared](std::span<const Dual<Dual<double>>> x, std::span<Dual<Dual<double>>> out) {
      (*shared)(x, out);
    };
    m.eval_taylor_ = [shared](std::span<const Taylor> x, std::span<Taylor> out) { (*shared)(x, out); };
    return m;
  }

  /// Model from plain callbacks. Capabilities are limited to what is supplied:
  /// without a Jacobian the model offers no jets, without a Hessian only order 1.
  static VectorFieldModel from_callbacks(std::string id, std::vector<std::string> coordinates, Evaluator<double> eval,
                                         JacobianFn jacobian = {}, HessianFn hessian = {}, DomainCheck domain = {}) {
    VectorFieldModel m(std::move(id), std::move(coordinates), std::move(domain), {});
    m.eval_ = std::move(eval);
    m.jacobian_ = std::move(jacobian);
    m.hessian_ = std::move(hessian);
    return m;
  }

  /// Model from a full set of evaluators; empty ones reduce the capabilities.
  static VectorFieldModel from_evaluators(std::string id, std::vector<std::string> coordinates,
                                          Evaluator<double> eval, Evaluator<Dual<double>> dual,
                                          Evaluator<Dual<Dual<double>>> hyper, Evaluator<Taylor> taylor,
                                          DomainCheck domain = {}, ModelParameters params = {}) {
    VectorFieldModel m(std::move(id), std::move(coordinates), std::move(domain), std::move(params));
    m.eval_ = std::move(eval);
    m.eval_dual_ = std::move(dual);
    m.eval_hyper_ = std::move(hyper);
    m.eval_taylor_ = std::move(taylor);
    return m;
  }

  /// Copy with hand-written derivatives that take precedence over forward mode.
  VectorFieldModel with_analytic_derivatives(JacobianFn jacobian, HessianFn hessian) const {
    VectorFieldModel m = *this;
    m.jacobian_ = std::move(jacobian);
    m.hessian_ = std::move(hessian);
    return m;
  }

  const std::string& id() const { return id_; }
  int dim() const { return static_cast<int>(coordinates_.size()); }
  const std::vector<std::string>& coordinate_names() const { return coordinates_; }
  const ModelParameters& parameters() const { return params_; }

  int coordinate_index(const std::string& name) const {
    for (int i = 0; i < dim(); ++i)
      if (coordinates_[i] == name) return i;
    throw ParameterError("model '" + id_ + "' has no coordinate '" + name + "'");
  }

  /// Deepest order of mixed partial derivatives the model can deliver.
  int partial_order() const {
    if (eval_hyper_ || hessian_) return 2;
    if (eval_dual_ || jacobian_) return 1;
    return 0;
  }
  /// Deepest flow derivative order (k in d^k f(x(t))/dt^k) the model can deliver.
  int flow_order() const { return eval_taylor_ ? std::numeric_limits<int>::max() : partial_order(); }

  bool has_analytic_derivatives() const { return static_cast<bool>(jacobian_); }
  bool has_autodiff() const { return static_cast<bool>(eval_dual_); }

  /// Throws DomainError naming the first offending coordinate.
  void check_domain(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim())
      throw ShapeError("model '" + id_ + "' expects " + std::to_string(dim()) + " coordinates, got " +
                       std::to_string(x.size()));
    for (int i = 0; i < dim(); ++i)
      if (!std::isfinite(x[i]))
        throw DomainError("model '" + id_ + "': coordinate " + coordinates_[i] + " is not finite");
    if (domain_) domain_(x);
  }

  /// Fails at configuration time if jets of the given order are unavailable.
  void require_partial_order(int order) const {
    if (partial_order() < order)
      throw CapabilityError("model '" + id_ + "' provides derivatives up to order " + std::to_string(partial_order()) +
                            ", order " + std::to_string(order) + " required");
  }
  void require_flow_order(int order) const {
    if (flow_order() < order)
      throw CapabilityError("model '" + id_ + "' provides flow derivatives up to order " +
                            std::to_string(flow_order()) + ", order " + std::to_string(order) + " required");
  }

  Vector eval(const Vector& x) const {
    std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
    check_domain(xs);
    Vector out(dim());
    eval_(xs, std::span<double>(out.data(), static_cast<std::size_t>(out.size())));
    return out;
  }

  // Raw hooks used by the jet routines below.
  const Evaluator<Dual<double>>& dual_evaluator() const { return eval_dual_; }
  const Evaluator<Dual<Dual<double>>>& hyper_evaluator() const { return eval_hyper_; }
  const Evaluator<Taylor>& taylor_evaluator() const { return eval_taylor_; }
  const JacobianFn& analytic_jacobian() const { return jacobian_; }
  const HessianFn& analytic_hessian() const { return hessian_; }

private:
  VectorFieldModel(std::string id, std::vector<std::string> coordinates, DomainCheck domain, ModelParameters params)
      : id_(std::move(id)), coordinates_(std::move(coordinates)), domain_(std::move(domain)), params_(std::move(params)) {
    if (coordinates_.empty()) throw ParameterError("vector field model needs dimension >= 1");
  }

  std::string id_;
  std::vector<std::string> coordinates_;
  DomainCheck domain_;
  ModelParameters params_;
  Evaluator<double> eval_;
  Evaluator<Dual<double>> eval_dual_;
  Evaluator<Dual<Dual<double>>> eval_hyper_;
  Evaluator<Taylor> eval_taylor_;
  JacobianFn jacobian_;
  HessianFn hessian_;
};

inline Vector eval_field(const VectorFieldModel& model, const Vector& x) { return model.eval(x); }

/// Jet of f through forward-mode differentiation only, ignoring analytic overrides.
inline FieldJet eval_jets_autodiff(const VectorFieldModel& model, const Vector& x, int order) {
  if (order < 1) throw ParameterError("jet order must be >= 1");
  if (order > 2) throw CapabilityError("jets beyond order 2 are not implemented; use flow jets for higher orders");
  const int n = model.dim();
  FieldJet jet;
  jet.order = order;
  jet.value = model.eval(x);
  jet.jacobian = Matrix::Zero(n, n);
  if (order == 1) {
    if (!model.dual_evaluator()) throw CapabilityError("model '" + model.id() + "' has no forward-mode evaluator");
    std::vector<Dual<double>> xd(n), out(n);
    for (int j = 0; j < n; ++j) {
      for (int m = 0; m < n; ++m) xd[m] = Dual<double>(x[m], m == j ? 1.0 : 0.0);
      model.dual_evaluator()(xd, out);
      for (int i = 0; i < n; ++i) jet.jacobian(i, j) = out[i].d;
    }
    return jet;
  }
  if (!model.hyper_evaluator()) throw CapabilityError("model '" + model.id() + "' has no second-order evaluator");
  jet.hessian.assign(n, Matrix::Zero(n, n));
  using H = Dual<Dual<double>>;
  std::vector<H> xh(n), out(n);
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      for (int m = 0; m < n; ++m)
        xh[m] = H(Dual<double>(x[m], m == b ? 1.0 : 0.0), Dual<double>(m == a ? 1.0 : 0.0, 0.0));
      model.hyper_evaluator()(xh, out);
      for (int i = 0; i < n; ++i) {
        if (a == b) jet.jacobian(i, a) = out[i].d.v;
        jet.hessian[i](a, b) = out[i].d.d;
        jet.hessian[i](b, a) = out[i].d.d;
      }
    }
  }
  return jet;
}

/// All partial derivatives of f up to `order` (1 or 2). Analytic derivatives are
/// used where the model carries them, forward mode otherwise.
inline FieldJet eval_jets(const VectorFieldModel& model, const Vector& x, int order) {
  if (order < 1) throw ParameterError("jet order must be >= 1");
  if (order > 2) throw CapabilityError("jets beyond order 2 are not implemented; use flow jets for higher orders");
  model.require_partial_order(order);
  const bool analytic = model.analytic_jacobian() && (order == 1 || model.analytic_hessian());
  if (!analytic) return eval_jets_autodiff(model, x, order);
  FieldJet jet;
  jet.order = order;
  jet.value = model.eval(x);
  jet.jacobian = model.analytic_jacobian()(x);
  if (order == 2) {
    jet.hessian = model.analytic_hessian()(x);
    for (auto& h : jet.hessian) h = 0.5 * (h + h.transpose()).eval();
  }
  return jet;
}

/// Flow derivatives d^{k+1} x / dt^{k+1} = d^k f(x(t)) / dt^k at t = 0, for k = 0..order,
/// for the solution through x. Computed by propagating the Taylor coefficients of x(t):
/// x_{k+1} = [f(x(t))]_k / (k+1). Models without a Taylor evaluator fall back to
/// explicit Jacobian/Hessian contractions, available up to order 2.
inline std::vector<Vector> flow_jets(const VectorFieldModel& model, const Vector& x, int order) {
  if (order < 0) throw ParameterError("flow jet order must be >= 0");
  model.require_flow_order(order);
  const int n = model.dim();
  std::vector<Vector> out;
  out.push_back(model.eval(x));
  if (order == 0) return out;

  if (!model.taylor_evaluator()) {
    FieldJet jet = eval_jets(model, x, order >= 2 ? 2 : 1);
    Vector jf = jet.jacobian * jet.value;
    out.push_back(jf);
    if (order >= 2) {
      Vector hff(n);
      for (int i = 0; i < n; ++i) hff[i] = jet.value.dot(jet.hessian[i] * jet.value);
      out.push_back(hff + jet.jacobian * jf);
    }
    return out;
  }

  // coeffs[m][k]: k-th Taylor coefficient of x_m(t)
  std::vector<std::vector<double>> coeffs(n, std::vector<double>{});
  for (int m = 0; m < n; ++m) coeffs[m].push_back(x[m]);
  std::vector<Taylor> xt(n), ft(n);
  double factorial = 1.0;
  for (int k = 0; k <= order; ++k) {
    for (int m = 0; m < n; ++m) xt[m] = Taylor(coeffs[m]);
    model.taylor_evaluator()(xt, ft);
    for (int m = 0; m < n; ++m) coeffs[m].push_back(ft[m][k] / static_cast<double>(k + 1));
    if (k >= 1) {
      factorial *= static_cast<double>(k);
      Vector d(n);
      for (int m = 0; m < n; ++m) d[m] = factorial * ft[m][k];
      out.push_back(d);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Built-in models

namespace detail {

inline void require_finite(const ModelParameters& p, const std::string& name) {
  if (!std::isfinite(p.get(name))) throw ParameterError("parameter " + name + " must be finite");
}

struct LinearField {
  double gamma;
  template <class S>
  void operator()(std::span<const S> x, std::span<S> out) const {
    out[0] = (-1.0 - gamma) * x[0] + gamma * x[1];
    out[1] = gamma * x[0] + (-1.0 - gamma) * x[1];
  }
};

struct DavisSkodjeField {
  double eta;
  template <class S>
  void operator()(std::span<const S> x, std::span<S> out) const {
    const S u = 1.0 + x[0];
    out[0] = -x[0];
    out[1] = -eta * x[1] + ((eta - 1.0) * x[0] + eta * x[0] * x[0]) / (u * u);
  }
};

struct MichaelisMentenField {
  double kappa, lambda, epsilon;
  template <class S>
  void operator()(std::span<const S> x, std::span<S> out) const {
    out[0] = x[1] - (x[1] + kappa) * x[0];
    out[1] = epsilon * (-x[1] + (x[1] + kappa - lambda) * x[0]);
  }
};

// State ordering (c3, c1).
struct ChiavazzoField {
  template <class S>
  void operator()(std::span<const S> x, std::span<S> out) const {
    out[0] = x[0] * x[0] - 2.1 * x[0] + 0.2;
    out[1] = 0.5 * x[0] + x[1] * x[0] - 0.2 * x[1];
  }
};

struct ConstantField {
  std::vector<double> c;
  template <class S>
  void operator()(std::span<const S> x, std::span<S> out) const {
    // 0 * x keeps the Taylor order of the inputs
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = 0.0 * x[i] + c[i];
  }
};

inline std::vector<Matrix> zero_hessians(int n) { return std::vector<Matrix>(n, Matrix::Zero(n, n)); }

}  // namespace detail

/// x' = [[-1-g, g], [g, -1-g]] x.
inline VectorFieldModel linear_model(double gamma = 3.0) {
  ModelParameters p{{"gamma", gamma}};
  detail::require_finite(p, "gamma");
  Matrix a(2, 2);
  a << -1.0 - gamma, gamma, gamma, -1.0 - gamma;
  return VectorFieldModel::from_generic("linear", {"x1", "x2"}, detail::LinearField{gamma}, {}, p)
      .with_analytic_derivatives([a](const Vector&) { return a; },
                                 [](const Vector&) { return detail::zero_hessians(2); });
}

inline VectorFieldModel davis_skodje_model(double eta = 3.0) {
  ModelParameters p{{"eta", eta}};
  detail::require_finite(p, "eta");
  if (!(eta > 1.0)) throw ParameterError("davis-skodje requires eta > 1");
  auto domain = [](std::span<const double> x) {
    if (x[0] == -1.0) throw DomainError("model 'davis-skodje': coordinate x1 = -1 is the pole of f2");
  };
  auto jac = [eta](const Vector& x) {
    const double u = 1.0 + x[0];
    Matrix j(2, 2);
    j << -1.0, 0.0, ((eta - 1.0) + (eta + 1.0) * x[0]) / (u * u * u), -eta;
    return j;
  };
  auto hess = [eta](const Vector& x) {
    const double u = 1.0 + x[0];
    auto h = detail::zero_hessians(2);
    h[1](0, 0) = (4.0 - 2.0 * eta - 2.0 * (eta + 1.0) * x[0]) / (u * u * u * u);
    return h;
  };
  return VectorFieldModel::from_generic("davis-skodje", {"x1", "x2"}, detail::DavisSkodjeField{eta}, domain, p)
      .with_analytic_derivatives(jac, hess);
}

inline VectorFieldModel michaelis_menten_model(double kappa = 0.5, double lambda = 1.0, double epsilon = 1.0 / 3.0) {
  ModelParameters p{{"kappa", kappa}, {"lambda", lambda}, {"epsilon", epsilon}};
  for (const char* name : {"kappa", "lambda", "epsilon"}) detail::require_finite(p, name);
  if (!(lambda > kappa && kappa > 0.0)) throw ParameterError("michaelis-menten requires lambda > kappa > 0");
  if (!(epsilon > 0.0)) throw ParameterError("michaelis-menten requires epsilon > 0");
  auto jac = [=](const Vector& x) {
    Matrix j(2, 2);
    j << -(x[1] + kappa), 1.0 - x[0], epsilon * (x[1] + kappa - lambda), epsilon * (x[0] - 1.0);
    return j;
  };
  auto hess = [=](const Vector&) {
    auto h = detail::zero_hessians(2);
    h[0](0, 1) = h[0](1, 0) = -1.0;
    h[1](0, 1) = h[1](1, 0) = epsilon;
    return h;
  };
  return VectorFieldModel::from_generic("michaelis-menten", {"x1", "x2"},
                                        detail::MichaelisMentenField{kappa, lambda, epsilon}, {}, p)
      .with_analytic_derivatives(jac, hess);
}

/// Reduced two-species mechanism in coordinates (c3, c1); equilibrium at (0.1, 0.5).
inline VectorFieldModel chiavazzo_model() {
  auto jac = [](const Vector& x) {
    Matrix j(2, 2);
    j << 2.0 * x[0] - 2.1, 0.0, 0.5 + x[1], x[0] - 0.2;
    return j;
  };
  auto hess = [](const Vector&) {
    auto h = detail::zero_hessians(2);
    h[0](0, 0) = 2.0;
    h[1](0, 1) = h[1](1, 0) = 1.0;
    return h;
  };
  return VectorFieldModel::from_generic("chiavazzo", {"c3", "c1"}, detail::ChiavazzoField{}, {}, {})
      .with_analytic_derivatives(jac, hess);
}

/// f == c; flat f-manifold.
inline VectorFieldModel constant_model(std::vector<double> c) {
  const int n = static_cast<int>(c.size());
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back("x" + std::to_string(i + 1));
  return VectorFieldModel::from_generic("constant", names, detail::ConstantField{std::move(c)})
      .with_analytic_derivatives([n](const Vector&) { return Matrix::Zero(n, n).eval(); },
                                 [n](const Vector&) { return detail::zero_hessians(n); });
}

/// Truncated slow-manifold expansion h0 + eps h1 + eps^2 h2 of the Michaelis-Menten model.
inline double mm_truncated_series(double x2, const ModelParameters& params) {
  const double kappa = params.get("kappa");
  const double lambda = params.get("lambda");
  const double eps = params.get("epsilon");
  const double s = x2 + kappa;
  if (s == 0.0) throw DomainError("mm_truncated_series: x2 = -kappa is a pole");
  const double h0 = x2 / s;
  const double h1 = kappa * lambda * x2 / std::pow(s, 4);
  const double h2 = kappa * lambda * x2 * (2.0 * kappa * lambda - 3.0 * lambda * x2 - kappa * x2 - kappa * kappa) /
                    std::pow(s, 7);
  return h0 + eps * h1 + eps * eps * h2;
}

/// Exact slow manifold x2 = x1 / (1 + x1) of the Davis-Skodje model.
inline double ds_sim_graph(double x1) {
  if (!(x1 > -1.0)) throw DomainError("ds_sim_graph: requires x1 > -1");
  return x1 / (1.0 + x1);
}

/// Default slice layout of a built-in model: which coordinate parametrizes the
/// slow direction and which one is searched.
struct SliceLayout {
  int slow_index = 0;
  int fast_index = 1;
  double search_lo = 0.0;
  double search_hi = 1.0;
};

inline const std::vector<std::string>& builtin_model_ids() {
  static const std::vector<std::string> ids{"linear", "davis-skodje", "michaelis-menten", "chiavazzo"};
  return ids;
}

inline ModelParameters default_parameters(const std::string& id) {
  if (id == "linear") return {{"gamma", 3.0}};
  if (id == "davis-skodje") return {{"eta", 3.0}};
  if (id == "michaelis-menten") return {{"kappa", 0.5}, {"lambda", 1.0}, {"epsilon", 1.0 / 3.0}};
  if (id == "chiavazzo") return {};
  throw ParameterError("unknown model id '" + id + "'");
}

/// Built-in model by id with parameter overrides; unknown ids or names are rejected.
inline VectorFieldModel model_from_id(const std::string& id, const ModelParameters& overrides = {}) {
  ModelParameters p = default_parameters(id);
  for (const auto& [name, value] : overrides.values()) {
    if (!p.has(name)) throw ParameterError("model '" + id + "' has no parameter '" + name + "'");
    p.set(name, value);
  }
  if (id == "linear") return linear_model(p.get("gamma"));
  if (id == "davis-skodje") return davis_skodje_model(p.get("eta"));
  if (id == "michaelis-menten") return michaelis_menten_model(p.get("kappa"), p.get("lambda"), p.get("epsilon"));
  return chiavazzo_model();
}

inline SliceLayout default_slice_layout(const std::string& id) {
  if (id == "linear") return {0, 1, 0.0, 2.0};
  if (id == "davis-skodje") return {0, 1, 0.0, 1.0};
  if (id == "michaelis-menten") return {1, 0, 0.0, 1.0};
  if (id == "chiavazzo") return {1, 0, 0.05, 0.15};
  throw ParameterError("unknown model id '" + id + "'");
}

}  // namespace geostretch
