#pragma once

// Forward-mode differentiation scalars.
//
//  Dual<T>   first-order dual number a + b*e with e^2 = 0. Nesting
//            Dual<Dual<double>> yields exact mixed second partials.
//  Taylor    univariate truncated power series with a runtime order; used to
//            propagate the Taylor coefficients of a flow x(t).
//
// Vector fields are written once as templates over the scalar type and
// instantiated with double, Dual<double>, Dual<Dual<double>> and Taylor.

#include <cmath>
#include <cstddef>
#include <type_traits>
#include <utility>
#include <vector>

#include "geostretch/errors.hpp"

namespace geostretch {

template <class T>
struct Dual {
  T v{};  // value
  T d{};  // derivative along the seeded direction

  Dual() = default;
  Dual(double value) : v(value), d(0.0) {}  // NOLINT: implicit constant promotion
  template <class U = T, class = std::enable_if_t<!std::is_same_v<U, double>>>
  Dual(const T& value) : v(value), d(0.0) {}  // NOLINT
  Dual(T value, T deriv) : v(std::move(value)), d(std::move(deriv)) {}

  Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
  Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
  Dual& operator*=(const Dual& o) { *this = *this * o; return *this; }
  Dual& operator/=(const Dual& o) { *this = *this / o; return *this; }
};

template <class T> Dual<T> operator-(const Dual<T>& a) { return {-a.v, -a.d}; }
template <class T> Dual<T> operator+(const Dual<T>& a) { return a; }

template <class T> Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) { return {a.v + b.v, a.d + b.d}; }
template <class T> Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) { return {a.v - b.v, a.d - b.d}; }
template <class T> Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
template <class T> Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
  T q = a.v / b.v;
  return {q, (a.d - q * b.d) / b.v};
}

template <class T> Dual<T> operator+(const Dual<T>& a, double b) { return {a.v + b, a.d}; }
template <class T> Dual<T> operator+(double a, const Dual<T>& b) { return {a + b.v, b.d}; }
template <class T> Dual<T> operator-(const Dual<T>& a, double b) { return {a.v - b, a.d}; }
template <class T> Dual<T> operator-(double a, const Dual<T>& b) { return {a - b.v, -b.d}; }
template <class T> Dual<T> operator*(const Dual<T>& a, double b) { return {a.v * b, a.d * b}; }
template <class T> Dual<T> operator*(double a, const Dual<T>& b) { return {a * b.v, a * b.d}; }
template <class T> Dual<T> operator/(const Dual<T>& a, double b) { return {a.v / b, a.d / b}; }
template <class T> Dual<T> operator/(double a, const Dual<T>& b) {
  T q = a / b.v;
  return {q, -(q * b.d) / b.v};
}

template <class T> Dual<T> sqrt(const Dual<T>& a) {
  using std::sqrt;
  T s = sqrt(a.v);
  return {s, a.d / (2.0 * s)};
}
template <class T> Dual<T> exp(const Dual<T>& a) {
  using std::exp;
  T e = exp(a.v);
  return {e, e * a.d};
}
template <class T> Dual<T> log(const Dual<T>& a) {
  using std::log;
  return {log(a.v), a.d / a.v};
}
template <class T> Dual<T> sin(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  return {sin(a.v), cos(a.v) * a.d};
}
template <class T> Dual<T> cos(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  return {cos(a.v), -(sin(a.v) * a.d)};
}
template <class T> Dual<T> pow(const Dual<T>& a, double p) {
  using std::pow;
  T vp1 = pow(a.v, p - 1.0);
  return {vp1 * a.v, p * vp1 * a.d};
}

/// Underlying double of any (possibly nested) scalar.
inline double primal(double x) { return x; }
template <class T> double primal(const Dual<T>& x) { return primal(x.v); }

/// Truncated univariate power series sum_k c[k] t^k, k = 0..order().
///
/// A series holding a single coefficient acts as a constant and broadcasts
/// against longer series; any other length mismatch is a ShapeError.
class Taylor {
public:
  Taylor() = default;
  Taylor(double constant) : c_{constant} {}  // NOLINT: implicit constant promotion
  explicit Taylor(std::vector<double> coeffs) : c_(std::move(coeffs)) {}

  /// Series t -> value + slope * t truncated at `order`.
  static Taylor variable(double value, double slope, std::size_t order) {
    std::vector<double> c(order + 1, 0.0);
    c[0] = value;
    if (order >= 1) c[1] = slope;
    return Taylor(std::move(c));
  }

  std::size_t size() const { return c_.size(); }
  std::size_t order() const { return c_.empty() ? 0 : c_.size() - 1; }
  double operator[](std::size_t k) const { return k < c_.size() ? c_[k] : 0.0; }
  double& operator[](std::size_t k) { return c_[k]; }
  const std::vector<double>& coeffs() const { return c_; }

  friend Taylor operator-(const Taylor& a) {
    Taylor r = a;
    for (double& x : r.c_) x = -x;
    return r;
  }
  friend Taylor operator+(const Taylor& a, const Taylor& b) {
    return zip(a, b, [](double x, double y) { return x + y; });
  }
  friend Taylor operator-(const Taylor& a, const Taylor& b) {
    return zip(a, b, [](double x, double y) { return x - y; });
  }
  friend Taylor operator*(const Taylor& a, const Taylor& b) {
    std::size_t n = common_size(a, b);
    if (a.size() == 1 || b.size() == 1) {
      const Taylor& s = a.size() == 1 ? a : b;
      const Taylor& t = a.size() == 1 ? b : a;
      Taylor r = t;
      for (double& x : r.c_) x *= s.c_[0];
      return r;
    }
    std::vector<double> r(n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j <= k; ++j) r[k] += a.c_[j] * b.c_[k - j];
    return Taylor(std::move(r));
  }
  friend Taylor operator/(const Taylor& a, const Taylor& b) {
    std::size_t n = common_size(a, b);
    if (b.size() == 1) {
      Taylor r = a;
      for (double& x : r.c_) x /= b.c_[0];
      return r;
    }
    std::vector<double> r(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      double s = a[k];
      for (std::size_t j = 1; j <= k; ++j) s -= b.c_[j] * r[k - j];
      r[k] = s / b.c_[0];
    }
    return Taylor(std::move(r));
  }

  friend Taylor operator+(const Taylor& a, double b) { Taylor r = a; r.c_[0] += b; return r; }
  friend Taylor operator+(double a, const Taylor& b) { return b + a; }
  friend Taylor operator-(const Taylor& a, double b) { Taylor r = a; r.c_[0] -= b; return r; }
  friend Taylor operator-(double a, const Taylor& b) { return -b + a; }
  friend Taylor operator*(const Taylor& a, double b) { Taylor r = a; for (double& x : r.c_) x *= b; return r; }
  friend Taylor operator*(double a, const Taylor& b) { return b * a; }
  friend Taylor operator/(const Taylor& a, double b) { Taylor r = a; for (double& x : r.c_) x /= b; return r; }
  friend Taylor operator/(double a, const Taylor& b) { return Taylor(a) / b; }

  Taylor& operator+=(const Taylor& o) { *this = *this + o; return *this; }
  Taylor& operator-=(const Taylor& o) { *this = *this - o; return *this; }
  Taylor& operator*=(const Taylor& o) { *this = *this * o; return *this; }
  Taylor& operator/=(const Taylor& o) { *this = *this / o; return *this; }

  friend Taylor exp(const Taylor& a) {
    std::size_t n = a.size();
    std::vector<double> r(n, 0.0);
    r[0] = std::exp(a.c_[0]);
    for (std::size_t k = 1; k < n; ++k) {
      double s = 0.0;
      for (std::size_t j = 1; j <= k; ++j) s += static_cast<double>(j) * a.c_[j] * r[k - j];
      r[k] = s / static_cast<double>(k);
    }
    return Taylor(std::move(r));
  }
  friend Taylor log(const Taylor& a) {
    std::size_t n = a.size();
    std::vector<double> r(n, 0.0);
    r[0] = std::log(a.c_[0]);
    for (std::size_t k = 1; k < n; ++k) {
      double s = static_cast<double>(k) * a.c_[k];
      for (std::size_t j = 1; j < k; ++j) s -= static_cast<double>(j) * r[j] * a.c_[k - j];
      r[k] = s / (static_cast<double>(k) * a.c_[0]);
    }
    return Taylor(std::move(r));
  }
  friend Taylor sqrt(const Taylor& a) {
    std::size_t n = a.size();
    std::vector<double> r(n, 0.0);
    r[0] = std::sqrt(a.c_[0]);
    for (std::size_t k = 1; k < n; ++k) {
      double s = a.c_[k];
      for (std::size_t j = 1; j < k; ++j) s -= r[j] * r[k - j];
      r[k] = s / (2.0 * r[0]);
    }
    return Taylor(std::move(r));
  }
  friend void sincos(const Taylor& a, Taylor& s, Taylor& c) {
    std::size_t n = a.size();
    std::vector<double> sv(n, 0.0), cv(n, 0.0);
    sv[0] = std::sin(a.c_[0]);
    cv[0] = std::cos(a.c_[0]);
    for (std::size_t k = 1; k < n; ++k) {
      double ss = 0.0, cc = 0.0;
      for (std::size_t j = 1; j <= k; ++j) {
        double w = static_cast<double>(j) * a.c_[j];
        ss += w * cv[k - j];
        cc -= w * sv[k - j];
      }
      sv[k] = ss / static_cast<double>(k);
      cv[k] = cc / static_cast<double>(k);
    }
    s = Taylor(std::move(sv));
    c = Taylor(std::move(cv));
  }
  friend Taylor sin(const Taylor& a) { Taylor s, c; sincos(a, s, c); return s; }
  friend Taylor cos(const Taylor& a) { Taylor s, c; sincos(a, s, c); return c; }
  friend Taylor pow(const Taylor& a, double p) { return exp(p * log(a)); }

private:
  static std::size_t common_size(const Taylor& a, const Taylor& b) {
    if (a.size() == b.size() || b.size() == 1) return a.size();
    if (a.size() == 1) return b.size();
    throw ShapeError("Taylor series of different orders combined");
  }
  template <class Op>
  static Taylor zip(const Taylor& a, const Taylor& b, Op op) {
    std::size_t n = common_size(a, b);
    std::vector<double> r(n);
    for (std::size_t k = 0; k < n; ++k) {
      double x = a.size() == 1 ? (k == 0 ? a.c_[0] : 0.0) : a.c_[k];
      double y = b.size() == 1 ? (k == 0 ? b.c_[0] : 0.0) : b.c_[k];
      r[k] = op(x, y);
    }
    return Taylor(std::move(r));
  }

  std::vector<double> c_;
};

inline double primal(const Taylor& x) { return x[0]; }

}  // namespace geostretch
