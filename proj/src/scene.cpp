#include "vlab/scene.hpp"

#include <cmath>
#include <sstream>

namespace vlab {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;

struct Builder {
  int n;
  int m;
  std::vector<Atom> atoms;
  std::int64_t next_id = 0;

  void push(Atom atom) {
    atom.id = next_id++;
    atoms.push_back(std::move(atom));
  }
};

Mat curve_second_form(const Vec& t, const Vec& nrm, double kappa) {
  // dP/ds = kappa (n t^T + t n^T); B(v) = (v . t) dP/ds.
  const int n = static_cast<int>(t.size());
  Mat dp = kappa * (nrm * t.transpose() + t * nrm.transpose());
  Eigen::Map<const Vec> dp_flat(dp.data(), dp.size());
  Mat b(static_cast<Eigen::Index>(n) * n, n);
  for (int i = 0; i < n; ++i) b.col(i) = t(i) * dp_flat;
  return b;
}

// Atom of a planar curve given position, unit tangent, signed curvature and
// inward normal direction (the curvature vector is kappa * nrm).
Atom curve_atom(const Vec& pos, const Vec& t, const Vec& nrm, double kappa,
                double weight, double cell) {
  Atom a;
  a.position = pos;
  a.tangent = Plane::from_basis({t});
  a.weight = weight;
  a.mean_curvature = kappa * nrm;
  a.tangent_derivative = curve_second_form(t / t.norm(), nrm, kappa);
  a.cell_size = cell;
  return a;
}

void build_segment_line(Builder& b, const Vec& center, const Vec& direction,
                        double t_lo, double t_hi, int cells, int mult) {
  if (t_hi <= t_lo) throw Error("zero-measure primitive: empty segment");
  const Vec u = direction / direction.norm();
  const Plane plane = Plane::from_basis({u});
  const double h = (t_hi - t_lo) / cells;
  const int n = static_cast<int>(center.size());
  Mat zero_b = Mat::Zero(static_cast<Eigen::Index>(n) * n, n);
  for (int i = 0; i < cells; ++i) {
    Atom a;
    a.position = center + (t_lo + (i + 0.5) * h) * u;
    a.tangent = plane;
    a.weight = h * mult;
    a.mean_curvature = Vec::Zero(n);
    a.tangent_derivative = zero_b;
    a.cell_size = h;
    b.push(std::move(a));
  }
}

void build_plane_patch(Builder& b, const Primitive& p) {
  if (p.basis.empty()) throw Error("plane-patch needs a basis");
  if (p.extent <= 0) throw Error("zero-measure primitive: extent <= 0");
  const int m = static_cast<int>(p.basis.size());
  if (m != b.m) throw Error("plane-patch dimension differs from scene m");
  if (m == 1) {
    build_segment_line(b, p.center, p.basis[0], -p.extent, p.extent,
                       p.resolution, p.multiplicity);
    return;
  }
  if (m != 2) throw Error("plane-patch supports m = 1 or 2");
  // Polar grid over the disk; midpoint in r integrates the area element
  // exactly, so the total patch mass is pi * extent^2 to rounding.
  const Plane plane = Plane::from_basis(p.basis);
  const Mat onb = plane.orthonormal_basis();
  const int n = b.n;
  const int nr = p.resolution;
  const int ntheta = std::max(8, 4 * p.resolution);
  const double dr = p.extent / nr;
  const double dtheta = 2.0 * kPi / ntheta;
  Mat zero_b = Mat::Zero(static_cast<Eigen::Index>(n) * n, n);
  for (int i = 0; i < nr; ++i) {
    const double rc = (i + 0.5) * dr;
    for (int j = 0; j < ntheta; ++j) {
      const double th = (j + 0.5) * dtheta;
      Atom a;
      a.position = p.center + onb.col(0) * (rc * std::cos(th)) +
                   onb.col(1) * (rc * std::sin(th));
      a.tangent = plane;
      a.weight = rc * dr * dtheta * p.multiplicity;
      a.mean_curvature = Vec::Zero(n);
      a.tangent_derivative = zero_b;
      a.cell_size = std::hypot(dr, rc * dtheta);
      b.push(std::move(a));
    }
  }
}

void build_circle_arc(Builder& b, const Primitive& p) {
  if (b.n != 2 || b.m != 1) throw Error("circle-arc is a planar curve");
  if (p.radius <= 0) throw Error("zero-measure primitive: radius <= 0");
  if (p.angle_to <= p.angle_from)
    throw Error("zero-measure primitive: empty arc");
  const double dtheta = (p.angle_to - p.angle_from) / p.resolution;
  for (int i = 0; i < p.resolution; ++i) {
    const double th = p.angle_from + (i + 0.5) * dtheta;
    Vec radial(2), tangent(2);
    radial << std::cos(th), std::sin(th);
    tangent << -std::sin(th), std::cos(th);
    Atom a = curve_atom(Vec(p.center + p.radius * radial), tangent,
                        Vec(-radial), 1.0 / p.radius,
                        p.radius * dtheta * p.multiplicity, p.radius * dtheta);
    b.push(std::move(a));
  }
}

struct GraphFunction {
  std::function<double(double)> u, du, ddu;
};

GraphFunction graph_function(const Primitive& p) {
  const double c = p.coeff;
  const double alpha = p.exponent;
  if (p.function == "linear")
    return {[c](double x) { return c * x; }, [c](double) { return c; },
            [](double) { return 0.0; }};
  if (p.function == "parabola")
    return {[c](double x) { return c * x * x; },
            [c](double x) { return 2.0 * c * x; },
            [c](double) { return 2.0 * c; }};
  if (p.function == "power")
    return {[c, alpha](double x) { return c * std::pow(x, alpha); },
            [c, alpha](double x) { return c * alpha * std::pow(x, alpha - 1); },
            [c, alpha](double x) {
              return c * alpha * (alpha - 1) * std::pow(x, alpha - 2);
            }};
  if (p.function == "abs-power")
    return {[c, alpha](double x) { return c * std::pow(std::abs(x), alpha); },
            [c, alpha](double x) {
              const double s = x < 0 ? -1.0 : 1.0;
              return c * alpha * s * std::pow(std::abs(x), alpha - 1);
            },
            [c, alpha](double x) {
              return c * alpha * (alpha - 1) * std::pow(std::abs(x), alpha - 2);
            }};
  throw Error("unknown graph function: " + p.function);
}

void push_graph_cells(Builder& b, const GraphFunction& f, double lo, double hi,
                      int cells, int mult) {
  const double h = (hi - lo) / cells;
  for (int i = 0; i < cells; ++i) {
    const double x = lo + (i + 0.5) * h;
    const double up = f.du(x);
    const double upp = f.ddu(x);
    const double len = std::sqrt(1.0 + up * up);
    Vec pos(2), t(2), nrm(2);
    pos << x, f.u(x);
    t << 1.0 / len, up / len;
    nrm << -up / len, 1.0 / len;
    const double kappa = upp / (len * len * len);
    b.push(curve_atom(pos, t, nrm, kappa, len * h * mult, len * h));
  }
}

void build_graph_curve(Builder& b, const Primitive& p) {
  if (b.n != 2 || b.m != 1) throw Error("graph-curve is a planar curve");
  if (p.interval_hi <= p.interval_lo)
    throw Error("zero-measure primitive: empty interval");
  if (p.function == "power" && p.interval_lo < 0)
    throw Error("power graph requires a nonnegative interval");
  int cells = p.resolution;
  // abs-power with exponent < 2 has a curvature singularity at 0; an even
  // cell count on a symmetric interval keeps midpoints away from it.
  if (p.function == "abs-power" && cells % 2 == 1) ++cells;
  push_graph_cells(b, graph_function(p), p.interval_lo, p.interval_hi, cells,
                   p.multiplicity);
}

void build_line_fan(Builder& b, const Primitive& p) {
  if (b.n != 2 || b.m != 1) throw Error("line-fan is planar");
  if (p.angles.empty()) throw Error("zero-measure primitive: no angles");
  int cells = p.resolution;
  if (cells % 2 == 1) ++cells;  // keep the hub off the midpoint grid
  for (double theta : p.angles) {
    Vec u(2);
    u << std::cos(theta), std::sin(theta);
    build_segment_line(b, p.center, u, -p.extent, p.extent, cells,
                       p.multiplicity);
  }
}

void build_sine_zeros(Builder& b, const Primitive& p) {
  if (b.n != 2 || b.m != 1) throw Error("sine-zeros is planar");
  if (p.zeros.size() < 2)
    throw Error("zero-measure primitive: need at least two zeros");
  for (size_t j = 0; j + 1 < p.zeros.size(); ++j)
    if (p.zeros[j + 1] <= p.zeros[j])
      throw Error("sine-zeros requires strictly ascending zeros");
  const double c = p.amplitude;
  for (size_t j = 0; j + 1 < p.zeros.size(); ++j) {
    const double x0 = p.zeros[j];
    const double w = p.zeros[j + 1] - x0;
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    // Arch u = sign * c * w * sin(pi (x - x0) / w); slopes at the zeros are
    // +-c*pi, so alternating signs make the spline C^1.
    GraphFunction f{
        [=](double x) { return sign * c * w * std::sin(kPi * (x - x0) / w); },
        [=](double x) { return sign * c * kPi * std::cos(kPi * (x - x0) / w); },
        [=](double x) {
          return -sign * c * kPi * kPi / w * std::sin(kPi * (x - x0) / w);
        }};
    push_graph_cells(b, f, x0, x0 + w, p.resolution, p.multiplicity);
  }
}

}  // namespace

QuadratureVarifold build_scene(const SceneSpec& spec) {
  Builder b{spec.n, spec.m, {}, 0};
  std::ostringstream desc;
  desc << "scene n=" << spec.n << " m=" << spec.m << ":";
  for (const Primitive& p : spec.primitives) {
    if (p.resolution < 8) throw Error("resolution must be at least 8");
    if (p.multiplicity < 1) throw Error("multiplicity must be positive");
    if (p.kind == "plane-patch") build_plane_patch(b, p);
    else if (p.kind == "segment") {
      if ((p.to - p.from).norm() == 0)
        throw Error("zero-measure primitive: degenerate segment");
      const double len = (p.to - p.from).norm();
      build_segment_line(b, Vec(0.5 * (p.from + p.to)), Vec(p.to - p.from),
                         -len / 2, len / 2, p.resolution, p.multiplicity);
    } else if (p.kind == "circle-arc") build_circle_arc(b, p);
    else if (p.kind == "graph-curve") build_graph_curve(b, p);
    else if (p.kind == "line-fan") build_line_fan(b, p);
    else if (p.kind == "sine-zeros") build_sine_zeros(b, p);
    else throw Error("unknown primitive: " + p.kind);
    desc << " " << p.kind << "(res=" << p.resolution
         << ",mult=" << p.multiplicity << ")";
  }
  if (b.atoms.empty()) throw Error("scene produced no atoms");
  return QuadratureVarifold(spec.n, spec.m, std::move(b.atoms),
                            SceneRecord{desc.str(), {}});
}

SceneSpec line_through(const Vec& center, double theta, double extent,
                       int resolution, int multiplicity) {
  Primitive p;
  p.kind = "plane-patch";
  p.center = center;
  Vec u(2);
  u << std::cos(theta), std::sin(theta);
  p.basis = {u};
  p.extent = extent;
  p.resolution = resolution;
  p.multiplicity = multiplicity;
  return SceneSpec{2, 1, {p}};
}

SceneSpec circle(const Vec& center, double radius, int resolution) {
  Primitive p;
  p.kind = "circle-arc";
  p.center = center;
  p.radius = radius;
  p.resolution = resolution;
  return SceneSpec{2, 1, {p}};
}

}  // namespace vlab
