#include <doctest.h>

#include <random>

#include "vlab/geometry.hpp"

using namespace vlab;

namespace {

Vec v2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

Vec v3(double x, double y, double z) {
  Vec v(3);
  v << x, y, z;
  return v;
}

Plane random_plane(std::mt19937_64& rng, int n, int m) {
  std::normal_distribution<double> gauss;
  while (true) {
    std::vector<Vec> basis;
    for (int j = 0; j < m; ++j) {
      Vec v(n);
      for (int i = 0; i < n; ++i) v(i) = gauss(rng);
      basis.push_back(v);
    }
    try {
      return Plane::from_basis(basis);
    } catch (const Error&) {
      // astronomically unlikely rank deficiency; redraw
    }
  }
}

}  // namespace

TEST_CASE("plane_from_basis on axis and diagonal lines") {
  const Plane x_axis = Plane::from_basis({v2(1, 0)});
  CHECK(x_axis.proj()(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(x_axis.proj()(0, 1) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(x_axis.proj()(1, 1) == doctest::Approx(0.0).epsilon(1e-14));

  const Plane diag = Plane::from_basis({v2(1, 1)});
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(std::abs(diag.proj()(i, j) - 0.5) < 1e-13);

  const Plane xy = Plane::from_basis({v3(1, 0, 0), v3(0, 1, 0)});
  CHECK(xy.m() == 2);
  Mat expected = Eigen::Vector3d(1, 1, 0).asDiagonal();
  CHECK((xy.proj() - expected).norm() < 1e-13);
}

TEST_CASE("degenerate basis is rejected") {
  CHECK_THROWS_WITH_AS(Plane::from_basis({v2(1, 1), v2(2, 2)}),
                       "degenerate basis", Error);
}

TEST_CASE("plane invariants hold for random planes") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 3);
    const int m = 1 + static_cast<int>(rng() % static_cast<unsigned>(n));
    const Plane p = random_plane(rng, n, m);
    CHECK((p.proj() * p.proj() - p.proj()).norm() <= 1e-12);
    CHECK(std::abs(p.proj().trace() - p.m()) <= 1e-12);
    CHECK((p.proj() - p.proj().transpose()).norm() <= 1e-12);
  }
}

TEST_CASE("plane_distance values from closed forms") {
  const Plane x_axis = Plane::line2d(0.0);
  const Plane y_axis = Plane::line2d(1.5707963267948966);
  const Plane diag = Plane::line2d(0.7853981633974483);
  CHECK(plane_distance(x_axis, x_axis) == 0.0);
  CHECK(plane_distance(x_axis, y_axis) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(plane_distance(x_axis, diag) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(plane_distance(x_axis, Plane::from_basis({v3(1, 0, 0)})),
                  Error);
}

TEST_CASE("plane_distance is a metric on random planes") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const Plane a = random_plane(rng, 3, 1);
    const Plane b = random_plane(rng, 3, 1);
    const Plane c = random_plane(rng, 3, 1);
    const double ab = plane_distance(a, b);
    CHECK(ab == doctest::Approx(plane_distance(b, a)).epsilon(1e-14));
    CHECK(plane_distance(a, c) <= ab + plane_distance(b, c) + 1e-12);
    CHECK(plane_distance(a, a) == 0.0);
    if (ab < 1e-12) CHECK((a.proj() - b.proj()).norm() < 1e-12);
  }
}

TEST_CASE("projection pythagoras") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 40; ++trial) {
    const Plane p = random_plane(rng, 3, 2);
    Vec x(3), a(3);
    for (int i = 0; i < 3; ++i) {
      x(i) = gauss(rng);
      a(i) = gauss(rng);
    }
    const Vec d = x - a;
    CHECK(p.project(d).squaredNorm() + p.reject(d).squaredNorm() ==
          doctest::Approx(d.squaredNorm()).epsilon(1e-10));
  }
}

TEST_CASE("region predicates") {
  const Plane x_axis = Plane::line2d(0.0);
  const Region cyl = Region::cylinder(x_axis, v2(0, 0), 1.0, 1.0);
  CHECK(cyl.contains(v2(0.5, 0.5)));
  CHECK(!cyl.contains(v2(0.5, 1.5)));
  CHECK(!cyl.contains(v2(1.5, 0.5)));

  const Region cone = Region::cone_complement(x_axis, v2(0, 0), 1.0);
  CHECK(cone.contains(v2(1, 2)));
  CHECK(!cone.contains(v2(2, 1)));

  const Region ball = Region::closed_ball(v2(0, 0), 1.0);
  CHECK(ball.contains(v2(1, 0)));
  CHECK(!Region::open_ball(v2(0, 0), 1.0).contains(v2(1, 0)));

  const Region ann = Region::annulus(v2(0, 0), 0.5, 1.0);
  CHECK(ann.contains(v2(0.75, 0)));
  CHECK(!ann.contains(v2(0.25, 0)));

  const Region half = Region::half_space(v2(0, 0), v2(1, 0));
  CHECK(half.contains(v2(0.1, -3)));
  CHECK(!half.contains(v2(-0.1, 3)));
}

TEST_CASE("flatten round-trips") {
  const Plane diag = Plane::line2d(0.7853981633974483);
  const Plane back = Plane::unflatten(diag.flatten(), 2);
  CHECK(plane_distance(diag, back) <= 1e-14);
}
