#pragma once

// Truncated bivariate Taylor polynomials ("jets") for forward-mode
// differentiation of scalar fields up to a fixed total order.
//
// A Jet<N> at base point p stores the coefficients c(i, j) of
//
//     f(p + (dx, dy)) = sum_{i + j <= N} c(i, j) dx^i dy^j + O(|d|^{N+1}),
//
// so the partial derivative d^{i+j} f / dx^i dy^j equals i! j! c(i, j).
// Arithmetic and the elementary functions below propagate the truncated
// series exactly; differentiating a Jet<N> yields a Jet<N-1>.

#include <array>
#include <cmath>
#include <cstddef>

namespace levelflow {

namespace detail {

constexpr int jet_size(int order) { return (order + 1) * (order + 2) / 2; }

constexpr int jet_index(int i, int j) {
  const int d = i + j;
  return d * (d + 1) / 2 + j;
}

constexpr double factorial(int n) {
  double r = 1.0;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

}  // namespace detail

template <int N>
class Jet {
  static_assert(N >= 0, "jet order must be non-negative");

 public:
  static constexpr int order = N;
  static constexpr int size = detail::jet_size(N);

  constexpr Jet() = default;
  constexpr Jet(double constant) { c_[0] = constant; }  // NOLINT: implicit by design of the algebra

  /// Coordinate function `value + d_axis` (axis 0 = x, axis 1 = y).
  static Jet variable(double value, int axis) {
    Jet r(value);
    if constexpr (N >= 1) r.coeff(axis == 0 ? 1 : 0, axis == 0 ? 0 : 1) = 1.0;
    return r;
  }

  constexpr double value() const { return c_[0]; }
  constexpr double coeff(int i, int j) const { return c_[detail::jet_index(i, j)]; }
  constexpr double& coeff(int i, int j) { return c_[detail::jet_index(i, j)]; }

  /// d^{i+j} f / dx^i dy^j at the base point.
  constexpr double derivative(int i, int j) const {
    return coeff(i, j) * detail::factorial(i) * detail::factorial(j);
  }

  constexpr const std::array<double, size>& coefficients() const { return c_; }
  constexpr std::array<double, size>& coefficients() { return c_; }

  Jet& operator+=(const Jet& o) {
    for (int k = 0; k < size; ++k) c_[k] += o.c_[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (int k = 0; k < size; ++k) c_[k] -= o.c_[k];
    return *this;
  }
  Jet& operator*=(double s) {
    for (auto& v : c_) v *= s;
    return *this;
  }
  Jet& operator+=(double s) {
    c_[0] += s;
    return *this;
  }
  Jet& operator-=(double s) {
    c_[0] -= s;
    return *this;
  }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }
  Jet& operator/=(const Jet& o) { return *this = *this / o; }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator+(Jet a, double b) { return a += b; }
  friend Jet operator+(double a, Jet b) { return b += a; }
  friend Jet operator-(Jet a, double b) { return a -= b; }
  friend Jet operator-(double a, const Jet& b) { return Jet(a) - b; }
  friend Jet operator*(Jet a, double b) { return a *= b; }
  friend Jet operator*(double a, Jet b) { return b *= a; }
  friend Jet operator/(Jet a, double b) { return a *= (1.0 / b); }
  friend Jet operator-(Jet a) {
    for (auto& v : a.c_) v = -v;
    return a;
  }

  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    for (int da = 0; da <= N; ++da) {
      for (int ja = 0; ja <= da; ++ja) {
        const double ca = a.coeff(da - ja, ja);
        if (ca == 0.0) continue;
        for (int db = 0; db + da <= N; ++db) {
          for (int jb = 0; jb <= db; ++jb) {
            r.coeff(da - ja + db - jb, ja + jb) += ca * b.coeff(db - jb, jb);
          }
        }
      }
    }
    return r;
  }

  friend Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
  friend Jet operator/(double a, const Jet& b) { return a * reciprocal(b); }

 private:
  static Jet reciprocal(const Jet& b);

  std::array<double, size> c_{};
};

/// Evaluates sum_k series[k] * (x - x.value())^k, i.e. composes a univariate
/// Taylor expansion (coefficients f^(k)(a)/k! at a = x.value()) with x.
template <int N>
Jet<N> compose(const std::array<double, N + 1>& series, const Jet<N>& x) {
  Jet<N> delta = x;
  delta.coeff(0, 0) = 0.0;
  Jet<N> r(series[N]);
  for (int k = N - 1; k >= 0; --k) {
    r = r * delta;
    r.coeff(0, 0) += series[k];
  }
  return r;
}

template <int N>
Jet<N> Jet<N>::reciprocal(const Jet<N>& b) {
  const double a = b.value();
  std::array<double, N + 1> s{};
  double p = 1.0 / a;
  for (int k = 0; k <= N; ++k) {
    s[k] = (k % 2 == 0 ? p : -p);
    p /= a;
  }
  return compose<N>(s, b);
}

template <int N>
Jet<N> exp(const Jet<N>& x) {
  std::array<double, N + 1> s{};
  const double e = std::exp(x.value());
  for (int k = 0; k <= N; ++k) s[k] = e / detail::factorial(k);
  return compose<N>(s, x);
}

template <int N>
Jet<N> log(const Jet<N>& x) {
  const double a = x.value();
  std::array<double, N + 1> s{};
  s[0] = std::log(a);
  double p = 1.0 / a;
  for (int k = 1; k <= N; ++k) {
    s[k] = (k % 2 == 1 ? p : -p) / k;
    p /= a;
  }
  return compose<N>(s, x);
}

/// x^e for real e (requires x.value() > 0 unless e is a non-negative integer).
template <int N>
Jet<N> pow(const Jet<N>& x, double e) {
  const double a = x.value();
  std::array<double, N + 1> s{};
  double binom = 1.0;
  for (int k = 0; k <= N; ++k) {
    s[k] = binom * std::pow(a, e - k);
    binom *= (e - k) / (k + 1);
  }
  return compose<N>(s, x);
}

template <int N>
Jet<N> sqrt(const Jet<N>& x) {
  const double a = x.value();
  const double r = std::sqrt(a);
  std::array<double, N + 1> s{};
  double binom = 1.0;
  double p = r;
  for (int k = 0; k <= N; ++k) {
    s[k] = binom * p;
    binom *= (0.5 - k) / (k + 1);
    p /= a;
  }
  return compose<N>(s, x);
}

template <int N>
Jet<N> square(const Jet<N>& x) {
  return x * x;
}

template <int N>
Jet<N> sin(const Jet<N>& x) {
  const double sv = std::sin(x.value()), cv = std::cos(x.value());
  const double cyc[4] = {sv, cv, -sv, -cv};
  std::array<double, N + 1> s{};
  for (int k = 0; k <= N; ++k) s[k] = cyc[k % 4] / detail::factorial(k);
  return compose<N>(s, x);
}

template <int N>
Jet<N> cos(const Jet<N>& x) {
  const double sv = std::sin(x.value()), cv = std::cos(x.value());
  const double cyc[4] = {cv, -sv, -cv, sv};
  std::array<double, N + 1> s{};
  for (int k = 0; k <= N; ++k) s[k] = cyc[k % 4] / detail::factorial(k);
  return compose<N>(s, x);
}

template <int N>
Jet<N> sinh(const Jet<N>& x) {
  const double sv = std::sinh(x.value()), cv = std::cosh(x.value());
  std::array<double, N + 1> s{};
  for (int k = 0; k <= N; ++k) s[k] = (k % 2 == 0 ? sv : cv) / detail::factorial(k);
  return compose<N>(s, x);
}

template <int N>
Jet<N> cosh(const Jet<N>& x) {
  const double sv = std::sinh(x.value()), cv = std::cosh(x.value());
  std::array<double, N + 1> s{};
  for (int k = 0; k <= N; ++k) s[k] = (k % 2 == 0 ? cv : sv) / detail::factorial(k);
  return compose<N>(s, x);
}

template <int N>
Jet<N> atan(const Jet<N>& x) {
  // atan' = 1 / (1 + x^2); expand the reciprocal of 1 + (a + h)^2 in h.
  const double a = x.value();
  const double p0 = 1.0 + a * a, p1 = 2.0 * a, p2 = 1.0;
  std::array<double, N + 1> r{};
  r[0] = 1.0 / p0;
  for (int k = 1; k <= N; ++k) {
    double acc = p1 * r[k - 1];
    if (k >= 2) acc += p2 * r[k - 2];
    r[k] = -acc / p0;
  }
  std::array<double, N + 1> s{};
  s[0] = std::atan(a);
  for (int k = 1; k <= N; ++k) s[k] = r[k - 1] / k;
  return compose<N>(s, x);
}

/// Angle of (x, y), continuous in a neighbourhood of a base point away from
/// the origin.
template <int N>
Jet<N> atan2(const Jet<N>& y, const Jet<N>& x) {
  const double x0 = x.value(), y0 = y.value();
  const double theta0 = std::atan2(y0, x0);
  // Rotate so that the base point lies on the positive real axis.
  Jet<N> num = x0 * y - y0 * x;
  Jet<N> den = x0 * x + y0 * y;
  Jet<N> r = atan(num / den);
  r.coeff(0, 0) = theta0;
  return r;
}

template <int N>
Jet<N> abs(const Jet<N>& x) {
  return x.value() < 0.0 ? -x : x;
}

template <int N>
  requires(N >= 1)
Jet<N - 1> d_dx(const Jet<N>& f) {
  Jet<N - 1> r;
  for (int d = 0; d <= N - 1; ++d) {
    for (int j = 0; j <= d; ++j) {
      const int i = d - j;
      r.coeff(i, j) = (i + 1) * f.coeff(i + 1, j);
    }
  }
  return r;
}

template <int N>
  requires(N >= 1)
Jet<N - 1> d_dy(const Jet<N>& f) {
  Jet<N - 1> r;
  for (int d = 0; d <= N - 1; ++d) {
    for (int j = 0; j <= d; ++j) {
      const int i = d - j;
      r.coeff(i, j) = (j + 1) * f.coeff(i, j + 1);
    }
  }
  return r;
}

template <int M, int N>
  requires(M <= N)
Jet<M> truncate(const Jet<N>& f) {
  Jet<M> r;
  for (int k = 0; k < Jet<M>::size; ++k) r.coefficients()[k] = f.coefficients()[k];
  return r;
}

}  // namespace levelflow
