#include <cmath>
#include <numbers>
#include <random>

#include "../oracles/finite_difference.hpp"
#include "../oracles/hyperdual.hpp"
#include "../support/phantoms.hpp"
#include "doctest.h"
#include "straintomo/airy.hpp"
#include "straintomo/elastic.hpp"
#include "straintomo/fields.hpp"
#include "straintomo/polyline.hpp"
#include "straintomo/spectral.hpp"

using namespace straintomo;
using oracle::HyperDual;

namespace {

oracle::HyperDual phi(HyperDual x1, HyperDual x2) {
  const HyperDual w = x1 * x2 * x2;
  return x1 * oracle::sin(HyperDual(3.0) * w) * oracle::exp(w) + x2 * oracle::cos(x1 * x1 * x1);
}

SymTensorField2 uniform_stress(const Grid2& g, double s11, double s12, double s22) {
  SymTensorField2 f(g);
  std::fill(f.e11.begin(), f.e11.end(), s11);
  std::fill(f.e12.begin(), f.e12.end(), s12);
  std::fill(f.e22.begin(), f.e22.end(), s22);
  return f;
}

SymTensorField2 random_field(const Grid2& g, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  SymTensorField2 f(g);
  for (std::size_t k = 0; k < g.size(); ++k) f.e11[k] = d(rng), f.e12[k] = d(rng), f.e22[k] = d(rng);
  return f;
}

// Smooth step: 1 for r <= r0, 0 for r >= r1, C-infinity in between.
double plateau(double r, double r0, double r1) {
  if (r <= r0) return 1.0;
  if (r >= r1) return 0.0;
  auto f = [](double t) { return t > 0 ? std::exp(-1.0 / t) : 0.0; };
  const double t = (r - r0) / (r1 - r0);
  return f(1 - t) / (f(1 - t) + f(t));
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("Grid2 enforces its invariants") {
  CHECK_THROWS_AS(Grid2(1, 4, 0, 1, 0, 1), Error);
  CHECK_THROWS_AS(Grid2(4, 4, 1, 1, 0, 1), Error);
  CHECK_THROWS_AS(Grid2(4, 4, 0, 1, 2, 1), Error);
  const Grid2 g = Grid2::square(222, 1.11);
  CHECK(g.hx() == doctest::Approx(0.01));
  CHECK(g.x(0) == doctest::Approx(-1.105));
  CHECK(g.index(3, 2) == 2 * 222 + 3);
}

TEST_CASE("hooke_stress_to_strain examples") {
  const Grid2 g = Grid2::square(2, 1.0);
  const ElasticConstants k;  // E = 1, nu = 0.28
  SymTensorField2 e = hooke_stress_to_strain(uniform_stress(g, 1, 0, 0), k);
  CHECK(e.e11[0] == doctest::Approx(1.0));
  CHECK(e.e12[0] == 0.0);
  CHECK(e.e22[0] == doctest::Approx(-0.28));
  e = hooke_stress_to_strain(uniform_stress(g, 0, 0, 0), k);
  CHECK(e.e11[0] == 0.0);
  CHECK(e.e12[0] == 0.0);
  CHECK(e.e22[0] == 0.0);
  e = hooke_stress_to_strain(uniform_stress(g, 0, 1, 0), k);
  CHECK(e.e12[0] == doctest::Approx(1.28));
}

TEST_CASE("hooke_strain_to_stress examples") {
  const Grid2 g = Grid2::square(2, 1.0);
  const ElasticConstants k;
  SymTensorField2 s = hooke_strain_to_stress(uniform_stress(g, 1, 0, -0.28), k);
  CHECK(s.e11[0] == doctest::Approx(1.0));
  CHECK(std::abs(s.e12[0]) < 1e-15);
  CHECK(std::abs(s.e22[0]) < 1e-15);
  s = hooke_strain_to_stress(uniform_stress(g, 0, 0, 0), k);
  CHECK(s.e11[0] == 0.0);
}

TEST_CASE("Hooke round trip is the identity for random fields and constants") {
  const Grid2 g = Grid2::square(16, 1.0);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> E(0.1, 200.0), nu(-0.9, 0.49);
  for (int trial = 0; trial < 20; ++trial) {
    ElasticConstants k{E(rng), nu(rng),
                       trial % 2 ? ElasticRegime::plane_strain : ElasticRegime::plane_stress};
    const SymTensorField2 sigma = random_field(g, static_cast<unsigned>(trial));
    const SymTensorField2 back = hooke_strain_to_stress(hooke_stress_to_strain(sigma, k), k);
    for (std::size_t i = 0; i < g.size(); ++i) {
      CHECK(std::abs(back.e11[i] - sigma.e11[i]) <= 1e-12 * (1 + std::abs(sigma.e11[i])));
      CHECK(std::abs(back.e12[i] - sigma.e12[i]) <= 1e-12 * (1 + std::abs(sigma.e12[i])));
      CHECK(std::abs(back.e22[i] - sigma.e22[i]) <= 1e-12 * (1 + std::abs(sigma.e22[i])));
    }
  }
}

TEST_CASE("ElasticConstants validation") {
  CHECK_THROWS_AS((ElasticConstants{0.0, 0.3}.validate()), Error);
  CHECK_THROWS_AS((ElasticConstants{1.0, 0.5}.validate()), Error);
  CHECK_THROWS_AS((ElasticConstants{1.0, -1.0}.validate()), Error);
  CHECK_NOTHROW(ElasticConstants{}.validate());
}

TEST_CASE("Airy closed form matches the hyper-dual oracle") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double x = d(rng), y = d(rng);
    const StressSample s = airy_stress(x, y);
    const double s11 = oracle::second_derivative(phi, x, y, 2, 2);
    const double s22 = oracle::second_derivative(phi, x, y, 1, 1);
    const double s12 = -oracle::second_derivative(phi, x, y, 1, 2);
    CHECK(s.s11 == doctest::Approx(s11).epsilon(1e-12).scale(1.0));
    CHECK(s.s22 == doctest::Approx(s22).epsilon(1e-12).scale(1.0));
    CHECK(s.s12 == doctest::Approx(s12).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("Airy phantom examples") {
  const Grid2 g = Grid2::square(222, 1.11);
  const BoundaryPolyline disk = make_disk(1000);
  const AiryPhantom ph = airy_phantom(g, disk, ElasticConstants{});
  const Mask mask = make_mask(g, disk);
  // Pixel centres never sit on x2 = 0 for an even grid, so check the closed form directly.
  for (double x : {-0.9, -0.3, 0.0, 0.5, 0.99}) CHECK(airy_stress(x, 0.0).s22 == 0.0);
  const StressSample origin = airy_stress(0.0, 0.0);
  CHECK(origin.s11 == 0.0);
  CHECK(origin.s12 == 0.0);
  CHECK(origin.s22 == 0.0);
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (mask.inside[k]) continue;
    CHECK(ph.stress.e11[k] == 0.0);
    CHECK(ph.stress.e12[k] == 0.0);
    CHECK(ph.stress.e22[k] == 0.0);
  }
  CHECK_THROWS_AS(airy_phantom(Grid2::square(50, 0.5), disk, ElasticConstants{}), Error);
}

TEST_CASE("Airy stress is divergence free at second order") {
  auto div_max = [](double h) {
    double m = 0.0;
    for (double x = -0.8; x <= 0.8; x += 0.1) {
      for (double y = -0.8; y <= 0.8; y += 0.1) {
        auto s11 = [](double a, double b) { return airy_stress(a, b).s11; };
        auto s12 = [](double a, double b) { return airy_stress(a, b).s12; };
        auto s22 = [](double a, double b) { return airy_stress(a, b).s22; };
        const double d1 = oracle::central(s11, x, y, 1, h) + oracle::central(s12, x, y, 2, h);
        const double d2 = oracle::central(s12, x, y, 1, h) + oracle::central(s22, x, y, 2, h);
        m = std::max({m, std::abs(d1), std::abs(d2)});
      }
    }
    return m;
  };
  const double coarse = div_max(0.01), fine = div_max(0.005);
  CHECK(fine < coarse);
  CHECK(std::log2(coarse / fine) > 1.8);
}

TEST_CASE("fourier_derivative examples") {
  const Grid2 g = Grid2::square(64, 1.0);
  std::vector<double> f(g.size(), 2.5);
  // A zero-padded constant is a box, so only the periodic mode can return 0.
  CHECK(max_abs(fourier_derivative(g, f, Axis::x1, FftPadding::periodic)) < 1e-12);
  CHECK(max_abs(fourier_derivative(g, f, Axis::x2, FftPadding::periodic)) < 1e-12);

  const double L = g.xmax() - g.xmin();
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) f[g.index(i, j)] = std::sin(2 * std::numbers::pi * g.x(i) / L);
  }
  const auto d = fourier_derivative(g, f, Axis::x1, FftPadding::periodic);
  double err = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const double exact = 2 * std::numbers::pi / L * std::cos(2 * std::numbers::pi * g.x(i) / L);
      err = std::max(err, std::abs(d[g.index(i, j)] - exact));
    }
  }
  CHECK(err < 1e-10);
  CHECK(max_abs(fourier_derivative(g, f, Axis::x2, FftPadding::periodic)) < 1e-10);
}

TEST_CASE("fourier_derivative agrees with fourth-order differences on a bump") {
  auto gap = [](int n) {
    const Grid2 g = Grid2::square(n, 1.0);
    std::vector<double> f(g.size());
    for (int j = 0; j < g.ny(); ++j) {
      for (int i = 0; i < g.nx(); ++i) {
        const double x = g.x(i) - 0.1, y = g.y(j) + 0.05;
        f[g.index(i, j)] = std::exp(-(x * x + 2 * y * y) / 0.04);
      }
    }
    double m = 0.0;
    for (Axis axis : {Axis::x1, Axis::x2}) {
      const auto spectral = fourier_derivative(g, f, axis);
      const auto fd = oracle::fd4(g, f, axis == Axis::x1 ? 1 : 2);
      for (int j = 4; j < g.ny() - 4; ++j) {
        for (int i = 4; i < g.nx() - 4; ++i) {
          m = std::max(m, std::abs(spectral[g.index(i, j)] - fd[g.index(i, j)]));
        }
      }
    }
    return m;
  };
  const double coarse = gap(64), fine = gap(128);
  CHECK(fine < 2e-3);
  CHECK(std::log2(coarse / fine) > 3.5);
}

TEST_CASE("fourier_derivative is linear") {
  const Grid2 g = Grid2::square(48, 1.0);
  const SymTensorField2 r = random_field(g, 5);
  std::vector<double> combo(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) combo[k] = 2.0 * r.e11[k] - 0.5 * r.e22[k];
  const auto a = fourier_derivative(g, r.e11, Axis::x2);
  const auto b = fourier_derivative(g, r.e22, Axis::x2);
  const auto c = fourier_derivative(g, combo, Axis::x2);
  double err = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    err = std::max(err, std::abs(c[k] - (2.0 * a[k] - 0.5 * b[k])));
    scale = std::max(scale, std::abs(c[k]));
  }
  CHECK(err <= 1e-12 * scale);
}

TEST_CASE("body_force_rhs examples") {
  const ElasticConstants k;
  const double a = k.E / (1 - k.nu * k.nu);
  SUBCASE("constant field") {
    const Grid2 g = Grid2::square(32, 1.0);
    const VectorField2 b = body_force_rhs(uniform_stress(g, 0.3, -0.1, 0.7), k, FftPadding::periodic);
    CHECK(max_abs(b.u1) < 1e-12);
    CHECK(max_abs(b.u2) < 1e-12);
  }
  SUBCASE("equilibrium strain gives zero force inside the domain") {
    // Airy strain windowed to 1 on r < 0.9, so Div sigma = 0 there exactly.
    const Grid2 g = Grid2::square(222, 1.11);
    SymTensorField2 s(g);
    for (int j = 0; j < g.ny(); ++j) {
      for (int i = 0; i < g.nx(); ++i) {
        const double w = plateau(std::hypot(g.x(i), g.y(j)), 0.9, 1.08);
        const StressSample st = airy_stress(g.x(i), g.y(j));
        const std::size_t id = g.index(i, j);
        s.e11[id] = w * (st.s11 - k.nu * st.s22) / k.E;
        s.e22[id] = w * (st.s22 - k.nu * st.s11) / k.E;
        s.e12[id] = w * (1 + k.nu) * st.s12 / k.E;
      }
    }
    const VectorField2 b = body_force_rhs(s, k);
    const auto d11 = fourier_derivative(g, s.e11, Axis::x1);
    double bmax = 0.0, scale = 0.0;
    for (int j = 0; j < g.ny(); ++j) {
      for (int i = 0; i < g.nx(); ++i) {
        const std::size_t id = g.index(i, j);
        scale = std::max(scale, std::abs(a * d11[id]));
        if (std::hypot(g.x(i), g.y(j)) < 0.85) {
          bmax = std::max({bmax, std::abs(b.u1[id]), std::abs(b.u2[id])});
        }
      }
    }
    CHECK(bmax < 1e-3 * scale);
  }
  SUBCASE("windowed linear ramp") {
    const Grid2 g = Grid2::square(128, 1.0);
    SymTensorField2 s(g);
    for (int j = 0; j < g.ny(); ++j) {
      for (int i = 0; i < g.nx(); ++i) {
        s.e11[g.index(i, j)] = g.x(i) * plateau(std::hypot(g.x(i), g.y(j)), 0.3, 0.8);
      }
    }
    const VectorField2 b = body_force_rhs(s, k);
    const auto fd = oracle::fd4(g, s.e11, 1);
    double plateau_err = 0.0, fd_err = 0.0, b2_err = 0.0;
    for (int j = 2; j < g.ny() - 2; ++j) {
      for (int i = 2; i < g.nx() - 2; ++i) {
        const std::size_t id = g.index(i, j);
        fd_err = std::max(fd_err, std::abs(b.u1[id] + a * fd[id]));
        if (std::hypot(g.x(i), g.y(j)) < 0.25) {
          plateau_err = std::max(plateau_err, std::abs(b.u1[id] + a));
          b2_err = std::max(b2_err, std::abs(b.u2[id]));
        }
      }
    }
    CHECK(plateau_err < 1e-4 * a);
    CHECK(fd_err < 2e-2 * a);
    CHECK(b2_err < 1e-4 * a);
  }
}

TEST_CASE("body force of a divergence-free strain is the trace gradient") {
  // Div eps = 0 leaves b = -E nu / (1 - nu^2) grad(tr eps). The phantom is only
  // C1 across its support radius 0.7, so compare inside r < 0.6.
  const Grid2 g = Grid2::square(160, 1.11);
  const SymTensorField2 s = support::sample_strain(g, support::CompactSolenoidal{});
  std::vector<double> tr(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) tr[i] = s.e11[i] + s.e22[i];
  for (double nu : {0.0, 0.28}) {
    const ElasticConstants k{1.0, nu};
    const double scale = nu / (1 - nu * nu);
    const VectorField2 b = body_force_rhs(s, k);
    const auto t1 = oracle::fd4(g, tr, 1), t2 = oracle::fd4(g, tr, 2);
    double err = 0.0, ref = 0.0;
    for (int j = 2; j < g.ny() - 2; ++j) {
      for (int i = 2; i < g.nx() - 2; ++i) {
        const std::size_t id = g.index(i, j);
        if (std::hypot(g.x(i), g.y(j)) > 0.6) continue;
        err = std::max({err, std::abs(b.u1[id] + scale * t1[id]), std::abs(b.u2[id] + scale * t2[id])});
        ref = std::max({ref, std::abs(t1[id]), std::abs(t2[id])});
      }
    }
    CAPTURE(nu);
    CHECK(err < 1e-3 * ref);
  }
}

TEST_CASE("mask_field examples and idempotence") {
  const Grid2 g = Grid2::square(222, 1.11);
  const SymTensorField2 f = random_field(g, 2);
  const SymTensorField2 same = mask_field(f, Mask(g, 1));
  CHECK(same.e11 == f.e11);
  CHECK(same.e12 == f.e12);
  const SymTensorField2 zero = mask_field(f, Mask(g, 0));
  CHECK(max_abs(zero.e11) == 0.0);
  CHECK(max_abs(zero.e22) == 0.0);

  const Mask disk = make_mask(g, make_disk(1000));
  std::size_t brute = 0;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) brute += std::hypot(g.x(i), g.y(j)) <= 1.0;
  }
  CHECK(disk.count() == brute);
  const SymTensorField2 once = mask_field(f, disk);
  const SymTensorField2 twice = mask_field(once, disk);
  CHECK(once.e11 == twice.e11);
  CHECK(once.e12 == twice.e12);
  CHECK(once.e22 == twice.e22);
}

TEST_CASE("relative_error examples") {
  const Grid2 g = Grid2::square(40, 1.0);
  const SymTensorField2 truth = random_field(g, 9);
  const Mask all(g, 1);
  CHECK(relative_error(truth, truth, all) == 0.0);
  CHECK(relative_error(SymTensorField2(g), truth, all) == doctest::Approx(1.0).epsilon(1e-14));
  for (double alpha : {1.1, 0.5, -2.0}) {
    SymTensorField2 scaled(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
      scaled.e11[k] = alpha * truth.e11[k];
      scaled.e12[k] = alpha * truth.e12[k];
      scaled.e22[k] = alpha * truth.e22[k];
    }
    CHECK(relative_error(scaled, truth, all) == doctest::Approx(std::abs(alpha - 1)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(relative_error(truth, SymTensorField2(g), all), Error);
  CHECK_THROWS_AS(relative_error(truth, truth, Mask(g, 0)), Error);
}

TEST_CASE("field validation rejects wrong sizes and non-finite values") {
  const Grid2 g = Grid2::square(4, 1.0);
  SymTensorField2 f(g);
  f.e12.pop_back();
  CHECK_THROWS_AS(f.validate(), Error);
  SymTensorField2 h(g);
  h.e22[3] = std::nan("");
  CHECK_THROWS_AS(h.validate(), Error);
}
