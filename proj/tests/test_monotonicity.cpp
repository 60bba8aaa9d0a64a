#include <doctest.h>

#include <cmath>

#include "vlab/monotonicity.hpp"
#include "vlab/scene.hpp"

using namespace vlab;

namespace {

constexpr double kPi = 3.141592653589793238462643383279;

Vec v2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

// Radii aligned with the midpoint grid of a line through `a`, so interval
// masses are exact: with a on a cell midpoint, r = (k + 1/2) h captures
// whole cells only.
std::vector<double> snapped_radii(double h, std::initializer_list<int> ks) {
  std::vector<double> out;
  for (int k : ks) out.push_back((k + 0.5) * h);
  return out;
}

}  // namespace

TEST_CASE("density ratio closed forms") {
  const int res = 4096;
  const double h = 2.0 / res;
  const auto line = build_scene(line_through(v2(0, 0), 0.0, 1.0, res));
  // a = an atom position, radius snapped to the grid
  const Vec a = line.atoms()[res / 2].position;
  const double r = (512 + 0.5) * h;
  const auto dr = density_ratio(line, a, r);
  CHECK(dr.ratio == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(dr.normalized == doctest::Approx(1.0).epsilon(1e-9));

  // line-fan of 5 lines through the center
  Primitive fan;
  fan.kind = "line-fan";
  fan.center = v2(0, 0);
  fan.angles = {0.1, 0.7, 1.3, 1.9, 2.5};
  fan.extent = 1.0;
  fan.resolution = 4096;
  const auto fans = build_scene(SceneSpec{2, 1, {fan}});
  const auto dr5 = density_ratio(fans, v2(0, 0), 1024 * h);
  CHECK(dr5.normalized == doctest::Approx(5.0).epsilon(1e-6));

  // line at distance 0.5 from the center: chord-length ratio
  const auto far = build_scene(line_through(v2(0, 0.5), 0.0, 1.0, 1 << 18));
  const auto drf = density_ratio(far, v2(0, 0), 1.0);
  CHECK(std::abs(drf.ratio - std::sqrt(3.0)) < 1e-5);

  CHECK_THROWS_AS(density_ratio(line, a, 0.0), Error);
}

TEST_CASE("tilt integral closed forms") {
  // any line through a has zero tilt (x - a is tangent to S, up to projector
  // rounding)
  const auto line = build_scene(line_through(v2(0, 0), 0.35, 1.0, 4096));
  CHECK(tilt_integral(line, v2(0, 0), 0.0, 0.9) <= 1e-12);

  // line at distance d = 0.5: antiderivative t/sqrt(d^2+t^2) gives sqrt(3)
  const auto far = build_scene(line_through(v2(0, 0.5), 0.0, 1.0, 1 << 18));
  CHECK(std::abs(tilt_integral(far, v2(0, 0), 0.0, 1.0) - std::sqrt(3.0)) <
        1e-5);

  // circle through a: closed-form oracle
  // G(s,r) = 2 (sqrt(1 - s^2/4) - sqrt(1 - r^2/4)) for the unit circle,
  // from |x-a| = 2 sin(phi/2) and defect |S_perp(x-a)| = |x-a| sin(phi/2).
  const auto circ = build_scene(circle(v2(0, -1), 1.0, 1 << 17));
  const double s = 0.1, r = 0.5;
  const double oracle = 2.0 * (std::sqrt(1.0 - s * s / 4.0) -
                               std::sqrt(1.0 - r * r / 4.0));
  CHECK(std::abs(tilt_integral(circ, v2(0, 0), s, r) - oracle) < 1e-5);

  // and a strict-policy error when an atom sits exactly at the center
  std::vector<Atom> atoms;
  Atom at_center;
  at_center.position = v2(0, 0);
  at_center.tangent = Plane::line2d(0.0);
  at_center.weight = 1.0;
  atoms.push_back(at_center);
  const QuadratureVarifold point(2, 1, atoms, SceneRecord{"point", {}});
  CHECK_THROWS_WITH_AS(
      tilt_integral(point, v2(0, 0), 0.0, 1.0, CenterAtomPolicy::Error),
      "singular quadrature at center", Error);
  CHECK(tilt_integral(point, v2(0, 0), 0.0, 1.0) == 0.0);
}

TEST_CASE("tilt integral is monotone in its limits") {
  const auto circ = build_scene(circle(v2(0, -1), 1.0, 8192));
  const Vec a = v2(0, 0);
  const double g1 = tilt_integral(circ, a, 0.2, 0.8);
  CHECK(g1 >= 0.0);
  CHECK(tilt_integral(circ, a, 0.1, 0.8) >= g1);      // smaller s grows it
  CHECK(tilt_integral(circ, a, 0.2, 1.0) >= g1);      // larger r grows it
}

TEST_CASE("monotonicity on a flat line is an equality") {
  const int res = 8192;
  const double h = 2.0 / res;
  const auto line = build_scene(line_through(v2(0, 0), 0.6, 1.0, res));
  const Vec a = line.atoms()[res / 2].position;
  const auto grid = snapped_radii(h, {50, 100, 400, 800, 1600, 3000});
  const auto rep =
      check_monotonicity(line, a, grid.back(), 2.0, 0.0, grid, 1e-9);
  CHECK(rep.premises_pass);
  CHECK(rep.pass);
  CHECK(rep.residual <= 1e-9);
  for (double ratio : rep.ratios)
    CHECK(ratio == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("monotonicity on two transversal lines: constant ratio 4") {
  const int res = 8192;
  const double h = 2.0 / res;
  SceneSpec spec = line_through(v2(0, 0), 0.0, 1.0, res);
  spec.primitives.push_back(
      line_through(v2(0, 0), 1.1, 1.0, res).primitives[0]);
  const auto v = build_scene(spec);
  // the hub is a cell boundary (even resolution), so radii k*h are exact
  std::vector<double> grid;
  for (int k : {64, 128, 512, 1024, 2048, 4000}) grid.push_back(k * h);
  const auto rep = check_monotonicity(v, v2(0, 0), grid.back(), 2.0, 0.0,
                                      grid, 1e-9);
  CHECK(rep.pass);
  for (double ratio : rep.ratios)
    CHECK(ratio == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("monotonicity on the unit circle") {
  const auto circ = build_scene(circle(v2(0, -1), 1.0, 1 << 15));
  const Vec a = v2(0, 0);

  SUBCASE("r small enough that Lambda*delta <= 1") {
    const double r = 0.2;
    const double delta = smallness(circ, a, r, 2.0) * (1.0 + 1e-12);
    const auto rep = check_monotonicity(circ, a, r, 2.0, delta, {}, 1e-5);
    CHECK(rep.premises_pass);
    CHECK(rep.pass);
    CHECK(rep.residual <= 1e-5);
  }
  SUBCASE("r = 0.5: inequalities still hold but Lambda*delta > 1 is flagged") {
    const double r = 0.5;
    const double delta = smallness(circ, a, r, 2.0) * (1.0 + 1e-12);
    const auto rep = check_monotonicity(circ, a, r, 2.0, delta, {}, 1e-5);
    CHECK(!rep.premises_pass);
    CHECK(rep.residual <= 1e-5);
    CHECK(mu_lambda(1, 2.0).lambda_const * delta > 1.0);
  }
}

TEST_CASE("stationary scenes have nondecreasing density ratios") {
  SceneSpec spec = line_through(v2(0, 0), 0.0, 1.0, 4096);
  spec.primitives.push_back(
      line_through(v2(0, 0), 0.8, 1.0, 4096).primitives[0]);
  const auto v = build_scene(spec);
  const double h = 2.0 / 4096;
  const auto grid = log_radius_grid(0.02, 0.9, 25);
  double prev = 0.0;
  for (double s : grid) {
    const double ratio = v.mass(Region::closed_ball(v2(0, 0), s)) / s;
    CHECK(ratio >= prev - 4.0 * h / s);  // quadrature slack, one cell per line
    prev = ratio;
  }
}

TEST_CASE("monotonicity report is scale invariant") {
  const int res = 8192;
  const double h = 2.0 / res;
  const auto grid = snapped_radii(h, {100, 400, 1600, 3000});

  const auto line = build_scene(line_through(v2(0, 0), 0.3, 1.0, res));
  const Vec a = line.atoms()[res / 2].position;
  const auto rep1 =
      check_monotonicity(line, a, grid.back(), 2.0, 0.0, grid, 1e-9);

  // same scene scaled by c = 3: points and radii scale, weights scale by c^m
  const double c = 3.0;
  const auto scaled = build_scene(line_through(v2(0, 0), 0.3, c * 1.0, res));
  const Vec a2 = scaled.atoms()[res / 2].position;
  std::vector<double> grid2;
  for (double s : grid) grid2.push_back(c * s);
  const auto rep2 =
      check_monotonicity(scaled, a2, grid2.back(), 2.0, 0.0, grid2, 1e-9);
  for (size_t i = 0; i < rep1.ratios.size(); ++i)
    CHECK(rep1.ratios[i] == doctest::Approx(rep2.ratios[i]).epsilon(1e-12));
  CHECK(rep1.residual == doctest::Approx(rep2.residual).epsilon(1e-12));
}

TEST_CASE("lower bound mass lemma") {
  const int res = 8192;
  const auto line = build_scene(line_through(v2(0, 0), 0.0, 2.0, res));

  SUBCASE("line through a, gamma = 1/2, delta = 0") {
    const auto rep = check_lower_bound_mass(line, line, v2(0, 0), 1.0, 2.0,
                                            0.0, 0.5);
    CHECK(rep.premises_pass);
    CHECK(rep.pass);
    CHECK(rep.bound == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.actual == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(rep.margin == doctest::Approx(1.0).epsilon(1e-2));
  }
  SUBCASE("W only in the outer annulus violates premise (ii)") {
    const auto w = line.restrict(Region::annulus(v2(0, 0), 0.5, 1.0),
                                 "outer annulus");
    const auto rep =
        check_lower_bound_mass(line, w, v2(0, 0), 1.0, 2.0, 0.0, 0.5);
    CHECK(!rep.premises_pass);
  }
  SUBCASE("gamma near 0 approaches the e^{-Lambda delta} omega_m bound") {
    const double delta = 0.1;
    const auto rep = check_lower_bound_mass(line, line, v2(0, 0), 1.0, 2.0,
                                            delta, 0.01);
    CHECK(rep.premises_pass);
    CHECK(rep.pass);
    const double lam = mu_lambda(1, 2.0).lambda_const;
    const double expected =
        std::exp(-lam * delta * std::pow(0.99, 0.5)) * 0.99 * 2.0;
    CHECK(rep.bound == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("center support lemma on partitions") {
  ConstantsConfig config;
  config.gamma = 1.0;

  SUBCASE("two transversal lines through a, Q = 2") {
    const ConstantsTable t = solve_constants(3, 2, 1, 2.0, 2, config);
    const int res = 8192;
    SceneSpec spec = line_through(v2(0, 0), 0.0, 1.0, res);
    spec.primitives.push_back(
        line_through(v2(0, 0), 1.2, 1.0, res).primitives[0]);
    const auto v = build_scene(spec);
    const Plane x_axis = Plane::line2d(0.0);
    std::vector<QuadratureVarifold> pi;
    pi.push_back(v.restrict([&](const Atom& a) {
      return plane_distance(a.tangent, x_axis) < 0.1;
    }, "x-axis line"));
    pi.push_back(v.restrict([&](const Atom& a) {
      return plane_distance(a.tangent, x_axis) >= 0.1;
    }, "other line"));
    const auto rep = check_center_support(v, pi, v2(0, 0), 0.9, 2.0, t);
    CHECK(rep.premises_pass);
    CHECK(rep.pass);
    CHECK(rep.pi_prime_count == 2);
    CHECK(rep.tilt_at_zero <= 0.25);  // 2^{-3} omega_1
    for (const auto& comp : rep.components) CHECK(comp.contains_center);
  }
  SUBCASE("far component is not in Pi'") {
    const ConstantsTable t = solve_constants(3, 2, 1, 2.0, 1, config);
    const double r = 1.0;
    SceneSpec spec = line_through(v2(0, 0), 0.0, 2.0, 8192);
    Primitive seg;
    seg.kind = "segment";
    seg.from = v2(-0.1, 0.9);
    seg.to = v2(0.1, 0.9);
    seg.resolution = 64;
    spec.primitives.push_back(seg);
    const auto v = build_scene(spec);
    std::vector<QuadratureVarifold> pi;
    pi.push_back(v.restrict([](const Atom& a) {
      return std::abs(a.position(1)) < 0.5;
    }, "through line"));
    pi.push_back(v.restrict([](const Atom& a) {
      return std::abs(a.position(1)) >= 0.5;
    }, "far segment"));
    const auto rep = check_center_support(v, pi, v2(0, 0), r, 2.0, t);
    CHECK(rep.premises_pass);
    CHECK(rep.pi_prime_count == 1);
    CHECK(rep.components[1].meets_half_ball == false);
    CHECK(rep.pass);
  }
}
