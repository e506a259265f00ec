#pragma once

// Truncated Taylor series in the spectral variable s. A Jet holds
// f(s0), f'(s0), f''(s0)/2!, ..., f^(K)(s0)/K! so products and compositions
// propagate exact derivatives up to order K.

#include <array>
#include <cmath>
#include <complex>

namespace treepsi {

inline constexpr int kMaxDerivative = 5;

struct Jet {
  using value_type = std::complex<double>;
  static constexpr int kOrder = kMaxDerivative;

  std::array<value_type, kOrder + 1> c{};

  static Jet constant(value_type v) {
    Jet j;
    j.c[0] = v;
    return j;
  }
  /// The identity map s -> s expanded at s0.
  static Jet variable(double s0) {
    Jet j;
    j.c[0] = s0;
    j.c[1] = 1.0;
    return j;
  }

  value_type value() const { return c[0]; }

  /// k-th derivative, k <= kOrder.
  value_type derivative(int k) const {
    double fact = 1.0;
    for (int i = 2; i <= k; ++i) fact *= i;
    return c[static_cast<std::size_t>(k)] * fact;
  }

  Jet& operator+=(const Jet& o) {
    for (int k = 0; k <= kOrder; ++k) c[k] += o.c[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (int k = 0; k <= kOrder; ++k) c[k] -= o.c[k];
    return *this;
  }
  Jet& operator*=(value_type v) {
    for (auto& x : c) x *= v;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, value_type v) { return a *= v; }
  friend Jet operator*(value_type v, Jet a) { return a *= v; }
  friend Jet operator-(Jet a) { return a *= -1.0; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    for (int k = 0; k <= kOrder; ++k) {
      value_type acc = 0.0;
      for (int i = 0; i <= k; ++i) acc += a.c[i] * b.c[k - i];
      r.c[k] = acc;
    }
    return r;
  }
};

inline Jet exp(const Jet& f) {
  Jet e;
  e.c[0] = std::exp(f.c[0]);
  for (int k = 1; k <= Jet::kOrder; ++k) {
    Jet::value_type acc = 0.0;
    for (int j = 1; j <= k; ++j) acc += static_cast<double>(j) * f.c[j] * e.c[k - j];
    e.c[k] = acc / static_cast<double>(k);
  }
  return e;
}

/// 1 / g; requires g(s0) != 0.
inline Jet reciprocal(const Jet& g) {
  Jet r;
  r.c[0] = 1.0 / g.c[0];
  for (int k = 1; k <= Jet::kOrder; ++k) {
    Jet::value_type acc = 0.0;
    for (int j = 1; j <= k; ++j) acc += g.c[j] * r.c[k - j];
    r.c[k] = -acc * r.c[0];
  }
  return r;
}

/// cos(omega * s + phase) expanded at s0, exactly.
inline Jet cos_linear(double omega, double phase, double s0) {
  Jet j;
  const double theta = omega * s0 + phase;
  double w = 1.0;
  double fact = 1.0;
  for (int k = 0; k <= Jet::kOrder; ++k) {
    if (k > 0) {
      w *= omega;
      fact *= k;
    }
    // d^k/ds^k cos(theta) = cos(theta + k pi / 2)
    j.c[k] = w * std::cos(theta + k * M_PI / 2.0) / fact;
  }
  return j;
}

/// exp(i * omega * s) expanded at s0, exactly.
inline Jet exp_i_linear(double omega, double s0) {
  Jet j;
  const std::complex<double> base = std::polar(1.0, omega * s0);
  std::complex<double> w = 1.0;
  double fact = 1.0;
  for (int k = 0; k <= Jet::kOrder; ++k) {
    if (k > 0) {
      w *= std::complex<double>(0.0, omega);
      fact *= k;
    }
    j.c[k] = base * w / fact;
  }
  return j;
}

}  // namespace treepsi
