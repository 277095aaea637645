#pragma once

// Analytic test fields shared by unit and acceptance tests.

#include <cmath>
#include <random>

#include "../oracles/hyperdual.hpp"
#include "straintomo/fields.hpp"

namespace support {

using oracle::HyperDual;

/// (1 - r^2/R^2)^p inside radius R, zero outside.
inline HyperDual window(HyperDual x, HyperDual y, double R, int p) {
  if (x.a * x.a + y.a * y.a >= R * R) return HyperDual(0.0);
  const HyperDual s = HyperDual(1.0) - (x * x + y * y) * HyperDual(1.0 / (R * R));
  HyperDual out(1.0);
  for (int k = 0; k < p; ++k) out = out * s;
  return out;
}

/// Smooth displacement vanishing outside radius R (C2 across r = R).
struct CompactDisplacement {
  double R = 0.8;
  HyperDual u1(HyperDual x, HyperDual y) const {
    return window(x, y, R, 3) * (oracle::sin(HyperDual(2.0) * x + y) + HyperDual(0.3) * y);
  }
  HyperDual u2(HyperDual x, HyperDual y) const {
    return window(x, y, R, 3) * HyperDual(0.5) * oracle::cos(x - HyperDual(3.0) * y);
  }
  /// du = (d1 u1, (d2 u1 + d1 u2) / 2, d2 u2).
  void strain(double x, double y, double& e11, double& e12, double& e22) const {
    auto f1 = [this](HyperDual a, HyperDual b) { return u1(a, b); };
    auto f2 = [this](HyperDual a, HyperDual b) { return u2(a, b); };
    e11 = oracle::first_derivative(f1, x, y, 1);
    e22 = oracle::first_derivative(f2, x, y, 2);
    e12 = 0.5 * (oracle::first_derivative(f1, x, y, 2) + oracle::first_derivative(f2, x, y, 1));
  }
};

/// Airy-form field (d22 psi, -d12 psi, d11 psi) of a compact psi: divergence
/// free with support in radius R.
struct CompactSolenoidal {
  double R = 0.7;
  HyperDual psi(HyperDual x, HyperDual y) const {
    return window(x, y, R, 4) * (oracle::cos(HyperDual(1.5) * x - y) + HyperDual(0.5) * x * y);
  }
  void strain(double x, double y, double& e11, double& e12, double& e22) const {
    auto f = [this](HyperDual a, HyperDual b) { return psi(a, b); };
    e11 = oracle::second_derivative(f, x, y, 2, 2);
    e12 = -oracle::second_derivative(f, x, y, 1, 2);
    e22 = oracle::second_derivative(f, x, y, 1, 1);
  }
};

template <typename Phantom>
straintomo::SymTensorField2 sample_strain(const straintomo::Grid2& g, const Phantom& ph) {
  straintomo::SymTensorField2 f(g);
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const std::size_t k = g.index(i, j);
      ph.strain(g.x(i), g.y(j), f.e11[k], f.e12[k], f.e22[k]);
    }
  }
  return f;
}

/// Random smooth tensor field: Gaussian bumps times a compact window of radius R.
inline straintomo::SymTensorField2 random_smooth_field(const straintomo::Grid2& g,
                                                       std::uint64_t seed, double R = 0.6) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(-0.4, 0.4), amp(-1.0, 1.0);
  struct Bump {
    double x, y, a[3];
  };
  std::vector<Bump> bumps(8);
  for (auto& b : bumps) b = {pos(rng), pos(rng), {amp(rng), amp(rng), amp(rng)}};
  straintomo::SymTensorField2 f(g);
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const double x = g.x(i), y = g.y(j);
      const double w = window(HyperDual(x), HyperDual(y), R, 3).a;
      if (w == 0.0) continue;
      double v[3] = {0, 0, 0};
      for (const auto& b : bumps) {
        const double e = std::exp(-((x - b.x) * (x - b.x) + (y - b.y) * (y - b.y)) / 0.05);
        for (int c = 0; c < 3; ++c) v[c] += b.a[c] * e;
      }
      const std::size_t k = g.index(i, j);
      f.e11[k] = w * v[0];
      f.e12[k] = w * v[1];
      f.e22[k] = w * v[2];
    }
  }
  return f;
}

/// Sum of chi * |f|_F over pixels.
inline double mass(const straintomo::SymTensorField2& f, const straintomo::Mask& m) {
  double s = 0.0;
  for (std::size_t k = 0; k < f.grid.size(); ++k) {
    if (m.inside[k]) s += straintomo::frobenius(f.e11[k], f.e12[k], f.e22[k]);
  }
  return s;
}

}  // namespace support
