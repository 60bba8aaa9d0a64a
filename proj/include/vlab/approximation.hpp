#pragma once

#include <json.hpp>

#include "vlab/constants.hpp"
#include "vlab/monotonicity.hpp"
#include "vlab/varifold.hpp"

namespace vlab {

// Copy of V tracking the tangent map: value = flattened projector (a point
// of Y = R^{n x n}), value_derivative = B where the scene provides it.
QuadratureVarifold tangent_field(const QuadratureVarifold& v);

struct ConicalReport {
  double lam0 = 0.0;
  double offending_mass = 0.0;
  double tolerance = 0.0;  // one atom weight
  std::vector<CheckItem> items;
  bool premises_pass = true;
  bool pass = false;
  nlohmann::json to_json() const;
};

// Height estimate as a checker: under two-sided density bounds, small
// curvature and small mean tilt, no mass may sit in the sigma-cone
// complement inside B(a, lam0 r).
ConicalReport check_conical(const QuadratureVarifold& v, const Vec& a,
                            double r, const Plane& p, double sigma,
                            const ConstantsTable& table, int Q);

struct CylinderReport {
  double s = 0.0;  // lam1 r / 2
  double cylinder_ratio = 0.0;
  double shell_mass = 0.0;
  double neighborhood_ratio = 0.0;
  std::vector<CheckItem> items;
  bool premises_pass = true;
  bool pass = false;
  nlohmann::json to_json() const;
};

// The three cylinder-estimate conclusions at s = lam1 r / 2: two-sided
// cylinder mass, empty shell, and the 4^m(Q+delta2) bound on the closed
// 2s-neighborhood of the cylinder.
CylinderReport check_cylinder(const QuadratureVarifold& v, const Vec& a,
                              double r, const Plane& p,
                              const ConstantsTable& table, int Q);

struct FiberPoint {
  Vec offset;  // coordinates in the P^perp frame, length n-m
  int multiplicity = 1;
};

struct GraphCell {
  std::vector<int> index;  // m-dimensional grid index
  Vec base_center;         // P-frame coordinates, length m
  std::vector<FiberPoint> fiber;
};

struct QValuedGraph {
  Plane base;
  Vec center;
  double radius = 0.0;  // s: cells tile [-s, s]^m
  int cellcount = 0;
  int total_multiplicity = 0;  // Q
  double lip_estimate = 0.0;
  std::vector<GraphCell> cells;  // Z = the nonempty cells
  Mat frame_p;                   // n x m
  Mat frame_perp;                // n x (n-m)
  bool greedy_matching = false;  // fiber matching fell back to greedy
  std::vector<CheckItem> items;
  bool premises_pass = true;
  bool pass = false;
  nlohmann::json to_json() const;
};

// Bin the cylinder mass over a P-grid, cluster fiber offsets into integer
// multiplicities (projection-Jacobian weighted, so tilted sheets count
// correctly), and estimate the Lipschitz constant by optimal matching of
// adjacent fibers.
QValuedGraph extract_graph(const QuadratureVarifold& v, const Plane& p,
                           const Vec& a, double s, double lip_bound,
                           int cellcount, const ConstantsTable& table, int Q);

// The varifold induced by the graph: one atom per fiber point per cell with
// tangent and area factor from a least-squares affine fit across
// face-adjacent cells. Isolated cells fall back to the base plane and are
// flagged.
QuadratureVarifold graph_varifold(const QValuedGraph& g);

struct DetectedPlane {
  Plane plane;
  Vec offset;  // the affine part: (I - S) x for every x on the plane
  int multiplicity = 0;
  double mass = 0.0;
  double chord_measure = 0.0;  // H^m of the affine plane inside B(a, r)
};

struct PlaneDecomposition {
  std::vector<DetectedPlane> planes;
  double residual_mass = 0.0;
  std::vector<CheckItem> items;
  bool pass = false;
  nlohmann::json to_json() const;
};

// Structure detector for null-curvature scenes: clusters atoms by
// (tangent plane, affine offset) and recovers integer multiplicities from
// density ratios. Throws "not a null-curvature varifold" if any atom in the
// ball carries |B| > 1e-10.
PlaneDecomposition detect_planes(const QuadratureVarifold& v, const Vec& a,
                                 double r);

struct DecayReport {
  std::vector<double> grid;
  std::vector<double> delta_v_mass;   // sum of w|H| over closed t-balls
  std::vector<double> decay_bound;    // t^{m-1} C' (t/r)^mu
  std::vector<double> blowup_defect;  // max |P_perp(x-a)|/t over the t-ball
  std::vector<double> density;        // normalized density ratios
  double c_prime = 0.0;
  int limit_q = 0;
  std::vector<CheckItem> items;
  bool premises_pass = true;
  bool pass = false;
  nlohmann::json to_json() const;
};

// Tangent-cone uniqueness as a decay certificate: the first-variation mass
// decay ||dV||(B(a,t)) <= t^{m-1} C' (t/r)^mu on a radius grid, plus blow-up
// convergence to the plane P with integer limit density.
DecayReport check_tangent_cone_decay(const QuadratureVarifold& v, const Vec& a,
                                     double r, const Plane& p, double c,
                                     double q);

}  // namespace vlab
