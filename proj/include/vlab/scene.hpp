#pragma once

#include <string>
#include <vector>

#include "vlab/varifold.hpp"

namespace vlab {

// Analytic scene primitives. Tangents, H and B come from the closed form of
// each primitive, never from neighbor differences, so the checkers downstream
// test the stated inequalities rather than discretization error.
//
// kinds:
//   plane-patch  {a + v : v in span(basis), |v| <= extent}; m = basis count
//   segment      straight segment from -> to
//   circle-arc   circle of `radius` about `center`, angles [angle_from, angle_to]
//   graph-curve  y = u(x) over `interval` in R^2; u per `function`:
//                  linear    u = coeff * x
//                  parabola  u = coeff * x^2
//                  power     u = coeff * x^exponent (interval in x >= 0)
//                  abs-power u = coeff * |x|^exponent
//   line-fan     lines through `center` at the given `angles`, clipped to
//                |v| <= extent
//   sine-zeros   C^1 graph of alternating sine arches vanishing exactly at
//                the ascending `zeros`; per-arch amplitude = amplitude * width
struct Primitive {
  std::string kind;
  int multiplicity = 1;
  int resolution = 64;

  Vec center;
  std::vector<Vec> basis;
  double extent = 1.0;

  Vec from, to;

  double radius = 1.0;
  double angle_from = 0.0;
  double angle_to = 6.283185307179586476925286766559;

  std::string function = "linear";
  double coeff = 1.0;
  double exponent = 2.0;
  double interval_lo = -1.0;
  double interval_hi = 1.0;

  std::vector<double> angles;

  std::vector<double> zeros;
  double amplitude = 0.5;
};

struct SceneSpec {
  int n = 2;
  int m = 1;
  std::vector<Primitive> primitives;
};

// Midpoint-rule quadrature of the scene. Throws on unknown or zero-measure
// primitives and on resolutions below 8.
QuadratureVarifold build_scene(const SceneSpec& spec);

// Shorthand builders used all over the tests.
SceneSpec line_through(const Vec& center, double theta, double extent,
                       int resolution, int multiplicity = 1);
SceneSpec circle(const Vec& center, double radius, int resolution);

}  // namespace vlab
