#include <Eigen/QR>
#include <cmath>
#include <numbers>
#include <random>

#include "../oracles/segments.hpp"
#include "doctest.h"
#include "straintomo/boundary_system.hpp"

using namespace straintomo;

namespace {

constexpr double pi = std::numbers::pi;

ScanGeometry single_ray(double angle, double offset) {
  ScanGeometry g;
  g.n_angles = 1;
  g.angle_start = angle;
  g.n_rays = 1;
  g.s_min = offset;
  g.ray_spacing = 0.01;
  return g;
}

BoundaryPolyline square() { return BoundaryPolyline({{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}}); }

// Orthonormal basis of the three rigid motions of one component.
Eigen::MatrixXd rigid_basis(const BoundaryPolyline& b, int component = -1) {
  Eigen::MatrixXd m(2 * b.node_count(), 3);
  m.col(0) = to_unknowns(rigid_motion_nodes(b, 1, 0, 0, component));
  m.col(1) = to_unknowns(rigid_motion_nodes(b, 0, 1, 0, component));
  m.col(2) = to_unknowns(rigid_motion_nodes(b, 0, 0, 1, component));
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  return qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), 3);
}

// Smooth non-rigid displacement on the nodes.
std::vector<Vec2> wavy(const BoundaryPolyline& b) {
  std::vector<Vec2> u(b.node_count());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Vec2 p = b.node(i);
    u[i] = {0.1 * std::sin(2 * p.x + p.y) + 0.05 * p.x * p.x, 0.07 * std::cos(3 * p.y) - 0.02 * p.x * p.y};
  }
  return u;
}

}  // namespace

TEST_CASE("intersect_ray on the unit disk") {
  const BoundaryPolyline disk = make_disk(1000);
  const auto hits = intersect_ray(0.0, 0.0, disk);
  REQUIRE(hits.size() == 2);
  CHECK(hits[0].entering);
  CHECK_FALSE(hits[1].entering);
  CHECK(norm(hits[0].point - Vec2{-1, 0}) < 2e-5);
  CHECK(norm(hits[1].point - Vec2{1, 0}) < 2e-5);
  CHECK(hits[0].t < hits[1].t);
  CHECK(intersect_ray(0.3, 1.5, disk).empty());
}

TEST_CASE("intersect_ray agrees with the brute-force oracle on the annulus") {
  const BoundaryPolyline ring = make_disk_with_hole(1000);
  const auto hits = intersect_ray(0.0, 0.0, ring);
  REQUIRE(hits.size() == 4);
  const double xs[] = {-1.0, -0.4, 0.4, 1.0};
  for (int k = 0; k < 4; ++k) {
    CHECK(hits[k].point.x == doctest::Approx(xs[k]).epsilon(1e-4));
    CHECK(hits[k].entering == (k % 2 == 0));
  }

  std::mt19937 rng(3);
  std::uniform_real_distribution<double> ang(0, 2 * pi), off(-1.2, 1.2);
  for (int trial = 0; trial < 300; ++trial) {
    const double a = ang(rng), s = off(rng);
    const auto got = intersect_ray(a, s, ring);
    const auto expect = oracle::line_crossings(a, s, ring);
    REQUIRE(got.size() == expect.size());
    for (std::size_t k = 0; k < got.size(); ++k) {
      CHECK(std::abs(got[k].t - expect[k].t) < 1e-12);
      CHECK(norm(got[k].point - expect[k].point) < 1e-12);
      CHECK(got[k].entering == (k % 2 == 0));
      CHECK(got[k].alpha >= 0.0);
      CHECK(got[k].alpha <= 1.0);
    }
  }
}

TEST_CASE("alpha weights the segment's first node") {
  const BoundaryPolyline sq = square();
  // Vertical line x = 0.5 crosses the bottom edge (-1,-1)->(1,-1) at 3/4 of its length.
  const auto hits = intersect_ray(pi / 2, -0.5, sq);
  REQUIRE(hits.size() == 2);
  CHECK(hits[0].segment == 0);
  CHECK(hits[0].alpha == doctest::Approx(0.25));
  CHECK(hits[0].point.x == doctest::Approx(0.5));
}

TEST_CASE("a ray through two vertices gives exactly four nonzeros") {
  // Square with its diagonal along xi; vertices built from the same cos/sin
  // the ray uses, so they lie exactly on the line.
  const double angle = 0.3, c = std::cos(angle), s = std::sin(angle);
  const BoundaryPolyline sq({{{c, s}, {-s, c}, {-c, -s}, {s, -c}}});
  Sinogram residual(single_ray(angle, 0.0));
  const BoundarySystem sys = assemble_system(residual.geometry, sq, residual);
  REQUIRE(sys.a.rows() == 1);
  int nonzeros = 0;
  const Eigen::VectorXd row = Eigen::VectorXd(sys.a.row(0).transpose());
  for (int k = 0; k < row.size(); ++k) nonzeros += row[k] != 0.0;
  CHECK(nonzeros == 4);
  CHECK(row[4] == doctest::Approx(-c));  // entry at -xi, node 2
  CHECK(row[5] == doctest::Approx(-s));
  CHECK(row[0] == doctest::Approx(c));  // exit at +xi, node 0
  CHECK(row[1] == doctest::Approx(s));
}

TEST_CASE("a tangential touch at a vertex yields no crossing") {
  const BoundaryPolyline diamond({{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}});
  CHECK(intersect_ray(pi / 2, -1.0, diamond).empty());  // line x = 1 touches (1, 0)
}

TEST_CASE("rigid motions lie in the kernel of A") {
  const BoundaryPolyline ring = make_disk_with_hole(300);
  const BoundarySystem sys = assemble_system(ScanGeometry::covering(1.2, 120, 0.03), ring);
  const Eigen::VectorXd t = to_unknowns(rigid_motion_nodes(ring, 0.7, -1.3, 0.0));
  CHECK((sys.a * t).cwiseAbs().maxCoeff() < 1e-13);
  const Eigen::VectorXd rot = to_unknowns(rigid_motion_nodes(ring, 0.0, 0.0, 1.0));
  const double a_norm = svd_report(sys, false).singular_values[0];
  CHECK((sys.a * rot).norm() <= 1e-12 * a_norm * rot.norm());
  for (int c = 0; c < 2; ++c) {
    const Eigen::VectorXd g = to_unknowns(rigid_motion_nodes(ring, 0.2, 0.5, -0.8, c));
    CHECK((sys.a * g).norm() <= 1e-10 * a_norm * g.norm());
  }
}

TEST_CASE("min_norm_solve examples") {
  BoundarySystem sys;
  sys.n_nodes = 1;
  sys.a.resize(2, 2);
  sys.a.insert(0, 0) = 1.0;
  sys.a.makeCompressed();
  sys.rhs = Eigen::Vector2d(2.0, 0.0);
  const MinNormSolution sol = min_norm_solve(sys);
  REQUIRE(sol.displacement.size() == 1);
  CHECK(sol.displacement[0].x == doctest::Approx(2.0));
  CHECK(std::abs(sol.displacement[0].y) < 1e-15);
  CHECK(sol.rank == 1);

  BoundarySystem zero;
  zero.n_nodes = 1;
  zero.a.resize(2, 2);
  zero.rhs = Eigen::Vector2d(1.0, 0.0);
  CHECK_THROWS_AS(min_norm_solve(zero), Error);
}

TEST_CASE("assemble_system rejects scans that miss the boundary") {
  const BoundaryPolyline disk = make_disk(100);
  Sinogram far(single_ray(0.0, 5.0));
  CHECK_THROWS_AS(assemble_system(far.geometry, disk, far), Error);
  const ScanGeometry g = ScanGeometry::covering(1.2, 10, 0.1);
  CHECK_THROWS_AS(assemble_system(g, disk, Sinogram(ScanGeometry::covering(1.2, 11, 0.1))), Error);
}

TEST_CASE("grazing rays are excluded") {
  const BoundaryPolyline disk = make_disk(400);
  ScanGeometry geom;
  geom.n_angles = 20;
  geom.s_min = -1.2;
  geom.ray_spacing = 0.0999;
  geom.n_rays = 25;
  const BoundarySystem sys = assemble_system(geom, disk);
  std::size_t short_chords = 0;
  for (int a = 0; a < geom.n_angles; ++a) {
    for (int r = 0; r < geom.n_rays; ++r) {
      const auto hits = oracle::line_crossings(geom.angle(a), geom.offset(r), disk);
      if (hits.size() == 2 && hits[1].t - hits[0].t < 2 * geom.ray_spacing) ++short_chords;
    }
  }
  CHECK(short_chords > 0);
  CHECK(sys.dropped_grazing == short_chords);
  for (const RayRow& row : sys.rows) {
    const auto hits = intersect_ray(row.angle, row.offset, disk);
    REQUIRE(hits.size() == 2);
    CHECK(hits[1].t - hits[0].t >= 2 * geom.ray_spacing);
  }
}

TEST_CASE("consistent data is recovered up to a rigid motion") {
  const BoundaryPolyline disk = make_disk(200);
  const ScanGeometry geom = ScanGeometry::covering(1.2, 200, 0.02);
  BoundarySystem sys = assemble_system(geom, disk);
  const Eigen::VectorXd truth = to_unknowns(wavy(disk));
  sys.rhs = sys.a * truth;
  const MinNormSolution sol = min_norm_solve(sys);
  CHECK(sol.rank == 2 * disk.node_count() - 3);
  const Eigen::MatrixXd q = rigid_basis(disk);
  const Eigen::VectorXd expect = truth - q * (q.transpose() * truth);
  CHECK((to_unknowns(sol.displacement) - expect).norm() < 1e-8 * truth.norm());

  BoundarySystem doubled = sys;
  doubled.rhs *= 2.0;
  CHECK((to_unknowns(min_norm_solve(doubled).displacement) - 2.0 * to_unknowns(sol.displacement)).norm() <
        1e-10 * truth.norm());

  // Adding a null-space vector to the generator leaves A U unchanged.
  BoundarySystem shifted = sys;
  shifted.rhs = sys.a * (truth + to_unknowns(rigid_motion_nodes(disk, 0.3, 0.1, 0.4)));
  CHECK((shifted.rhs - sys.rhs).norm() < 1e-12 * sys.rhs.norm());

  BoundarySystem zero_rhs = sys;
  zero_rhs.rhs.setZero();
  CHECK(to_unknowns(min_norm_solve(zero_rhs).displacement).norm() == 0.0);
}

TEST_CASE("rigid_motion_nodes examples") {
  const BoundaryPolyline b({{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}, {{3, 0}, {4, 0}, {3, 1}}});
  for (const Vec2& v : rigid_motion_nodes(b, 0.5, -2.0, 0.0)) CHECK(v == Vec2{0.5, -2.0});
  const auto rot = rigid_motion_nodes(b, 0, 0, 1);
  CHECK(rot[0] == Vec2{0, 1});
  const auto second = rigid_motion_nodes(b, 1, 1, 0, 1);
  for (std::size_t i = 0; i < 4; ++i) CHECK(second[i] == Vec2{0, 0});
  for (std::size_t i = 4; i < 7; ++i) CHECK(second[i] == Vec2{1, 1});
  const auto back = from_unknowns(to_unknowns(rot));
  CHECK(back == rot);
}

TEST_CASE("svd_report null basis spans the rigid motions") {
  for (const BoundaryPolyline& shape : {make_disk(100), make_disk_with_hole(100)}) {
    const BoundarySystem sys = assemble_system(ScanGeometry::covering(1.2, 100, 0.05), shape);
    const SvdReport rep = svd_report(sys);
    CHECK(rep.near_zero == 3 * shape.component_count());
    REQUIRE(rep.null_vectors.size() == rep.near_zero);
    Eigen::MatrixXd basis(2 * shape.node_count(), rep.near_zero);
    for (std::size_t k = 0; k < rep.near_zero; ++k) basis.col(k) = to_unknowns(rep.null_vectors[k]);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(basis.rows(), basis.cols());
    for (int c = 0; c < static_cast<int>(shape.component_count()); ++c) {
      for (auto [c1, c2, beta] : {std::tuple{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.3, -0.2, 1.0}}) {
        const Eigen::VectorXd g = to_unknowns(rigid_motion_nodes(shape, c1, c2, beta, c));
        CHECK((g - q * (q.transpose() * g)).norm() < 1e-8 * g.norm());
      }
    }
    // Spectral gap between the null group and the rest.
    const auto& s = rep.singular_values;
    const std::size_t n = static_cast<std::size_t>(s.size());
    CHECK(s[n - rep.near_zero - 1] > 1e6 * std::max(s[n - rep.near_zero], 1e-300));
    CHECK(rep.condition_number == doctest::Approx(s[0] / s[n - rep.near_zero - 1]));
  }
}

TEST_CASE("BoundaryPolyline validation") {
  CHECK_THROWS_AS(BoundaryPolyline({{{0, 0}, {1, 0}}}).validate(), Error);
  CHECK_THROWS_AS(BoundaryPolyline({{{0, 0}, {1, 1}, {1, 0}, {0, 1}}}).validate(), Error);
  CHECK_THROWS_AS(
      BoundaryPolyline({circle_loop({0, 0}, 1, 50), circle_loop({0.5, 0}, 1, 50)}).validate(), Error);
  CHECK_NOTHROW(make_three_disks(100).validate());
  CHECK(make_disk(4).contains({0, 0}));
  CHECK_FALSE(make_disk_with_hole(100).contains({0, 0}));
}
