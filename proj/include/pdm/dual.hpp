#pragma once

#include <array>
#include <cmath>

namespace pdm {

/// Forward-mode dual number with N directional derivatives.
template <int N>
struct Dual {
  double v = 0.0;
  std::array<double, N> d{};

  Dual() = default;
  Dual(double value) : v(value) {}  // NOLINT: implicit lift of constants is the point

  static Dual variable(double value, int k) {
    Dual x(value);
    x.d[k] = 1.0;
    return x;
  }

  Dual& operator+=(const Dual& o) {
    v += o.v;
    for (int k = 0; k < N; ++k) d[k] += o.d[k];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    for (int k = 0; k < N; ++k) d[k] -= o.d[k];
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    for (int k = 0; k < N; ++k) d[k] = d[k] * o.v + v * o.d[k];
    v *= o.v;
    return *this;
  }
  Dual& operator*=(double s) {
    v *= s;
    for (int k = 0; k < N; ++k) d[k] *= s;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    const double inv = 1.0 / o.v;
    for (int k = 0; k < N; ++k) d[k] = (d[k] - v * inv * o.d[k]) * inv;
    v *= inv;
    return *this;
  }
};

template <int N> Dual<N> operator+(Dual<N> a, const Dual<N>& b) { return a += b; }
template <int N> Dual<N> operator-(Dual<N> a, const Dual<N>& b) { return a -= b; }
template <int N> Dual<N> operator*(Dual<N> a, const Dual<N>& b) { return a *= b; }
template <int N> Dual<N> operator/(Dual<N> a, const Dual<N>& b) { return a /= b; }
template <int N> Dual<N> operator+(Dual<N> a, double b) { a.v += b; return a; }
template <int N> Dual<N> operator+(double b, Dual<N> a) { a.v += b; return a; }
template <int N> Dual<N> operator-(Dual<N> a, double b) { a.v -= b; return a; }
template <int N> Dual<N> operator-(double b, const Dual<N>& a) { return Dual<N>(b) - a; }
template <int N> Dual<N> operator*(Dual<N> a, double s) { return a *= s; }
template <int N> Dual<N> operator*(double s, Dual<N> a) { return a *= s; }
template <int N> Dual<N> operator/(Dual<N> a, double s) { return a *= 1.0 / s; }
template <int N> Dual<N> operator/(double s, const Dual<N>& a) { return Dual<N>(s) / a; }
template <int N> Dual<N> operator-(Dual<N> a) { return a *= -1.0; }

template <int N> bool operator<(const Dual<N>& a, const Dual<N>& b) { return a.v < b.v; }
template <int N> bool operator>(const Dual<N>& a, const Dual<N>& b) { return a.v > b.v; }

template <int N>
Dual<N> sqrt(const Dual<N>& a) {
  Dual<N> r(std::sqrt(a.v));
  const double g = r.v > 0.0 ? 0.5 / r.v : 0.0;
  for (int k = 0; k < N; ++k) r.d[k] = g * a.d[k];
  return r;
}

template <int N>
Dual<N> pow(const Dual<N>& a, double e) {
  Dual<N> r(std::pow(a.v, e));
  const double g = e * std::pow(a.v, e - 1.0);
  for (int k = 0; k < N; ++k) r.d[k] = g * a.d[k];
  return r;
}

inline double value_of(double x) { return x; }
template <int N> double value_of(const Dual<N>& x) { return x.v; }

}  // namespace pdm
