#pragma once

// Per-weight update kernels shared by the learner and the replay harnesses.
// They are templated on the scalar so tests can run them in double.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace n2048 {

// TD: w += (alpha / views) * signal
template <class T>
T td_step(T weight, T signal, T step) {
  return weight + step * signal;
}

template <class T>
struct TcCell {
  T value;
  T e;
  T a;
};

// Rate |E|/A (1 when A = 0) is taken before the accumulators move.
template <class T>
T tc_rate(T e, T a) {
  return a != T(0) ? std::abs(e) / a : T(1);
}

template <class T>
TcCell<T> tc_step(TcCell<T> c, T signal, T step) {
  const T rate = tc_rate(c.e, c.a);
  c.value += step * rate * signal;
  c.e += signal;
  c.a += std::abs(signal);
  return c;
}

struct AutostepParams {
  double mu = 0.1;
  double tau = 1e-4;
  double alpha_init = 1.0;
};

template <class T>
struct AutostepCell {
  T alpha;  // per-weight step size
  T h;      // trace of recent weight changes
  T v;      // running normaliser of |delta * x * h|
};

// One Autostep step over the active weights (feature values x, all other
// features are zero). `tau` multiplies the normaliser update, so the usual
// 1/10^4 is tau = 1e-4. Normalisation by M = max(sum alpha x^2, 1) is
// applied to the active step sizes.
template <class T>
void autostep_step(std::span<AutostepCell<T>> cells, std::span<T> weights, std::span<const T> x, T delta,
                   const AutostepParams& p) {
  const T mu = static_cast<T>(p.mu);
  const T tau = static_cast<T>(p.tau);
  T effective = 0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    auto& c = cells[i];
    const T g = delta * x[i] * c.h;
    const T ag = std::abs(g);
    c.v = std::max(ag, c.v + tau * c.alpha * x[i] * x[i] * (ag - c.v));
    if (c.v != T(0)) c.alpha *= std::exp(mu * g / c.v);
    effective += c.alpha * x[i] * x[i];
  }
  const T m = std::max(effective, T(1));
  for (std::size_t i = 0; i < cells.size(); ++i) {
    auto& c = cells[i];
    c.alpha /= m;
    weights[i] += c.alpha * delta * x[i];
    c.h = c.h * (T(1) - c.alpha * x[i] * x[i]) + c.alpha * delta * x[i];
  }
}

}  // namespace n2048
