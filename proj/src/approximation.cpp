#include "vlab/approximation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "vlab/partition.hpp"

namespace vlab {

namespace {

// Density/curvature/tilt premises shared by the conical and cylinder
// checkers, evaluated on a log grid of radii with one-cell mass slack.
void push_cone_premises(std::vector<CheckItem>& items,
                        const QuadratureVarifold& v, const Vec& a, double r,
                        const Plane& p, double eps, const ConstantsTable& t,
                        int Q) {
  const int m = v.m();
  const double omega = unit_ball_volume(m);
  const double lo =
      std::min(r / 2.0, std::max(r / 50.0, 64.0 * v.max_cell_size()));
  const auto grid = log_radius_grid(lo, r, 20);
  double worst_upper = -std::numeric_limits<double>::infinity();
  double worst_lower = -std::numeric_limits<double>::infinity();
  double worst_tilt = -std::numeric_limits<double>::infinity();
  for (double tt : grid) {
    const Region ball = Region::closed_ball(a, tt);
    const double mass = v.mass(ball);
    const double ratio = mass / std::pow(tt, m);
    const double slack = 4.0 * v.max_cell_size() / tt;
    worst_upper = std::max(worst_upper,
                           ratio - ((Q + t.delta2) * omega + slack));
    worst_lower = std::max(worst_lower,
                           ((Q - t.delta1) * omega - slack) - ratio);
    double tilt = 0.0;
    for (const Atom& atom : v.atoms())
      if (ball.contains(atom.position))
        tilt += atom.weight * plane_distance(atom.tangent, p);
    worst_tilt = std::max(worst_tilt, tilt - eps * mass);
  }
  items.push_back({"t^-m ||V||(B) <= (Q+delta2) omega on grid", worst_upper,
                   0.0, worst_upper <= 0.0, "premise", ""});
  items.push_back({"t^-m ||V||(B) >= (Q-delta1) omega on grid", worst_lower,
                   0.0, worst_lower <= 0.0, "premise", ""});
  const double curv = v.lq_seminorm(Region::closed_ball(a, r),
                                    FieldSelector::MeanCurvature,
                                    static_cast<double>(m));
  items.push_back({"||H||_m over B(a,r) <= eps", curv, eps,
                   curv <= eps + 1e-15, "premise", ""});
  items.push_back({"int |S-P| dV <= eps ||V||(B) on grid", worst_tilt, 0.0,
                   worst_tilt <= 1e-12, "premise", ""});
}

double max_atom_weight(const QuadratureVarifold& v, const Region& region) {
  double w = 0.0;
  for (const Atom& a : v.atoms())
    if (region.contains(a.position)) w = std::max(w, a.weight);
  return w;
}

// m-Jacobian of the projection of the atom's tangent plane onto the frame
// of P: |det(frame_p^T S_frame)|. Equals cos(theta) for curves.
double projection_jacobian(const Mat& frame_p, const Plane& s) {
  const Mat m_proj = frame_p.transpose() * s.orthonormal_basis();
  return std::abs(m_proj.determinant());
}

std::vector<Vec> expand_fiber(const std::vector<FiberPoint>& fiber) {
  std::vector<Vec> points;
  for (const FiberPoint& fp : fiber)
    for (int k = 0; k < fp.multiplicity; ++k) points.push_back(fp.offset);
  return points;
}

// Optimal matching distance: min over pairings of the max offset gap.
// Exact permutation search up to Q = 5, greedy beyond.
double matching_distance(std::vector<Vec> a, std::vector<Vec> b,
                         std::vector<int>* assignment, bool* used_greedy) {
  const int q = static_cast<int>(a.size());
  if (q == 0 || a.size() != b.size())
    throw Error("fiber multiplicity mismatch in matching");
  std::vector<int> perm(q);
  std::iota(perm.begin(), perm.end(), 0);
  if (q <= 5) {
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> best_perm = perm;
    do {
      double worst = 0.0;
      for (int i = 0; i < q; ++i)
        worst = std::max(worst, (a[static_cast<size_t>(i)] -
                                 b[static_cast<size_t>(perm[static_cast<size_t>(i)])]).norm());
      if (worst < best) {
        best = worst;
        best_perm = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (assignment) *assignment = best_perm;
    return best;
  }
  if (used_greedy) *used_greedy = true;
  std::vector<bool> taken(static_cast<size_t>(q), false);
  std::vector<int> greedy(static_cast<size_t>(q), -1);
  double worst = 0.0;
  for (int i = 0; i < q; ++i) {
    double best = std::numeric_limits<double>::infinity();
    int pick = -1;
    for (int j = 0; j < q; ++j) {
      if (taken[static_cast<size_t>(j)]) continue;
      const double d = (a[static_cast<size_t>(i)] - b[static_cast<size_t>(j)]).norm();
      if (d < best) {
        best = d;
        pick = j;
      }
    }
    taken[static_cast<size_t>(pick)] = true;
    greedy[static_cast<size_t>(i)] = pick;
    worst = std::max(worst, best);
  }
  if (assignment) *assignment = greedy;
  return worst;
}

}  // namespace

QuadratureVarifold tangent_field(const QuadratureVarifold& v) {
  std::vector<Atom> atoms = v.atoms();
  for (Atom& a : atoms) {
    a.value = a.tangent.flatten();
    if (a.tangent_derivative) a.value_derivative = a.tangent_derivative;
  }
  SceneRecord rec = v.scene();
  rec.notes.push_back("tracking f = tangent map");
  return QuadratureVarifold(v.n(), v.m(), std::move(atoms), std::move(rec));
}

ConicalReport check_conical(const QuadratureVarifold& v, const Vec& a,
                            double r, const Plane& p, double sigma,
                            const ConstantsTable& table, int Q) {
  ConicalReport rep;
  rep.lam0 = table.lam0;
  push_cone_premises(rep.items, v, a, r, p, table.eps5, table, Q);
  rep.premises_pass = premises_ok(rep.items);

  const Region ball = Region::open_ball(a, table.lam0 * r);
  const Region cone = Region::cone_complement(p, a, sigma);
  rep.offending_mass = v.mass_where([&](const Atom& atom) {
    return ball.contains(atom.position) && cone.contains(atom.position);
  });
  rep.tolerance = 1.0001 * max_atom_weight(v, ball);
  rep.items.push_back({"mass in cone complement within B(a, lam0 r) = 0",
                       rep.offending_mass, rep.tolerance,
                       rep.offending_mass <= rep.tolerance, "conclusion",
                       "tolerance is one atom weight"});
  rep.pass = rep.premises_pass && conclusions_ok(rep.items);
  return rep;
}

nlohmann::json ConicalReport::to_json() const {
  nlohmann::json j;
  j["lam0"] = lam0;
  j["offending_mass"] = offending_mass;
  j["tolerance"] = tolerance;
  j["checks"] = items_to_json(items);
  j["premises_pass"] = premises_pass;
  j["pass"] = pass;
  return j;
}

CylinderReport check_cylinder(const QuadratureVarifold& v, const Vec& a,
                              double r, const Plane& p,
                              const ConstantsTable& table, int Q) {
  CylinderReport rep;
  push_cone_premises(rep.items, v, a, r, p, table.eps6, table, Q);
  rep.premises_pass = premises_ok(rep.items);

  const int m = v.m();
  const double omega = unit_ball_volume(m);
  const double s = table.lam1 * r / 2.0;
  rep.s = s;
  const double sm = std::pow(s, m);
  const double atom_tol = 1.0001 * max_atom_weight(v, Region::open_ball(a, r));

  // (1) two-sided mass of the square cylinder
  const double cyl_mass = v.mass(Region::cylinder(p, a, s, s));
  rep.cylinder_ratio = cyl_mass / sm;
  rep.items.push_back({"s^-m ||V||(C(a,s,s)) >= (Q-delta1) omega",
                       rep.cylinder_ratio, (Q - table.delta1) * omega,
                       rep.cylinder_ratio >=
                           (Q - table.delta1) * omega - atom_tol / sm,
                       "conclusion", ""});
  rep.items.push_back(
      {"s^-m ||V||(C(a,s,s)) <= (Q+(1+delta2)/2) omega", rep.cylinder_ratio,
       (Q + (1.0 + table.delta2) / 2.0) * omega,
       rep.cylinder_ratio <=
           (Q + (1.0 + table.delta2) / 2.0) * omega + atom_tol / sm,
       "conclusion", ""});

  // (2) the shell between heights (1-2 delta3)s and (1+delta3)s is empty
  rep.shell_mass = v.mass_where([&](const Atom& atom) {
    const Vec d = atom.position - a;
    if (p.project(d).norm() >= s) return false;
    const double h = p.reject(d).norm();
    return h >= (1.0 - 2.0 * table.delta3) * s &&
           h < (1.0 + table.delta3) * s;
  });
  rep.items.push_back({"shell mass = 0", rep.shell_mass, atom_tol,
                       rep.shell_mass <= atom_tol, "conclusion", ""});

  // (3) closed 2s-neighborhood of the cylinder
  const double neighborhood_mass = v.mass_where([&](const Atom& atom) {
    const Vec d = atom.position - a;
    const double dp = std::max(p.project(d).norm() - s, 0.0);
    const double dh = std::max(p.reject(d).norm() - s, 0.0);
    return std::hypot(dp, dh) <= 2.0 * s;
  });
  rep.neighborhood_ratio = neighborhood_mass / sm;
  rep.items.push_back({"s^-m ||V||(closed 2s-neighborhood) <= 4^m (Q+delta2) omega",
                       rep.neighborhood_ratio,
                       std::pow(4.0, m) * (Q + table.delta2) * omega,
                       rep.neighborhood_ratio <=
                           std::pow(4.0, m) * (Q + table.delta2) * omega +
                               atom_tol / sm,
                       "conclusion", ""});
  rep.pass = rep.premises_pass && conclusions_ok(rep.items);
  return rep;
}

nlohmann::json CylinderReport::to_json() const {
  nlohmann::json j;
  j["s"] = s;
  j["cylinder_ratio"] = cylinder_ratio;
  j["shell_mass"] = shell_mass;
  j["neighborhood_ratio"] = neighborhood_ratio;
  j["checks"] = items_to_json(items);
  j["premises_pass"] = premises_pass;
  j["pass"] = pass;
  return j;
}

QValuedGraph extract_graph(const QuadratureVarifold& v, const Plane& p,
                           const Vec& a, double s, double lip_bound,
                           int cellcount, const ConstantsTable& table, int Q) {
  if (cellcount < 2) throw Error("extract_graph needs at least 2 cells");
  QValuedGraph g;
  g.base = p;
  g.center = a;
  g.radius = s;
  g.cellcount = cellcount;
  g.frame_p = p.orthonormal_basis();
  g.frame_perp = p.orthonormal_complement();
  const int m = v.m();
  const double width = 2.0 * s / cellcount;

  // Lipschitz-lemma style premises on the circumscribed ball.
  const double ball_r = s * std::sqrt(2.0);
  {
    const double omega = unit_ball_volume(m);
    const double lo = std::min(
        ball_r / 2.0, std::max(ball_r / 50.0, 64.0 * v.max_cell_size()));
    double worst_upper = -std::numeric_limits<double>::infinity();
    double worst_lower = -std::numeric_limits<double>::infinity();
    for (double t : log_radius_grid(lo, ball_r, 20)) {
      const double ratio =
          v.mass(Region::closed_ball(a, t)) / std::pow(t, m);
      const double slack = 4.0 * v.max_cell_size() / t;
      worst_upper = std::max(
          worst_upper, ratio - ((Q + table.lip_delta) * omega + slack));
      worst_lower = std::max(
          worst_lower, ((Q - table.lip_delta) * omega - slack) - ratio);
    }
    g.items.push_back({"t^-m ||V||(B) <= (Q+delta) omega on grid",
                       worst_upper, 0.0, worst_upper <= 0.0, "premise", ""});
    g.items.push_back({"t^-m ||V||(B) >= (Q-delta) omega on grid",
                       worst_lower, 0.0, worst_lower <= 0.0, "premise", ""});
  }
  const double curv = v.lq_seminorm(Region::closed_ball(a, ball_r),
                                    FieldSelector::MeanCurvature,
                                    static_cast<double>(m));
  g.items.push_back({"||H||_m over the cylinder ball <= eps7", curv,
                     table.eps7, curv <= table.eps7 + 1e-15, "premise", ""});
  double max_tilt = 0.0;
  const Region cyl = Region::cylinder(p, a, s, s);
  for (const Atom& atom : v.atoms())
    if (cyl.contains(atom.position))
      max_tilt = std::max(max_tilt, plane_distance(atom.tangent, p));
  g.items.push_back({"sup |T_V - P| over the cylinder <= eps7", max_tilt,
                     table.eps7, max_tilt <= table.eps7 + 1e-15, "premise",
                     ""});
  g.premises_pass = premises_ok(g.items);

  // Bin atoms by the P-frame coordinates of x - a.
  std::map<std::vector<int>, std::vector<int>> bins;
  const auto& atoms = v.atoms();
  for (int ai = 0; ai < static_cast<int>(atoms.size()); ++ai) {
    if (!cyl.contains(atoms[static_cast<size_t>(ai)].position)) continue;
    const Vec z = g.frame_p.transpose() *
                  (atoms[static_cast<size_t>(ai)].position - a);
    std::vector<int> index(static_cast<size_t>(m));
    bool in_grid = true;
    for (int axis = 0; axis < m; ++axis) {
      const int idx = static_cast<int>(std::floor((z(axis) + s) / width));
      if (idx < 0 || idx >= cellcount) in_grid = false;
      index[static_cast<size_t>(axis)] = idx;
    }
    if (in_grid) bins[index].push_back(ai);
  }
  if (bins.empty()) throw Error("empty graph extraction: no cells hit");

  const double cell_measure = std::pow(width, m);
  int common_q = -1;
  for (const auto& [index, members] : bins) {
    GraphCell cell;
    cell.index = index;
    cell.base_center = Vec(static_cast<Eigen::Index>(m));
    for (int axis = 0; axis < m; ++axis)
      cell.base_center(axis) = -s + (index[static_cast<size_t>(axis)] + 0.5) * width;

    std::vector<Vec> offsets;
    std::vector<double> base_masses;
    for (int ai : members) {
      const Atom& atom = atoms[static_cast<size_t>(ai)];
      offsets.push_back(Vec(g.frame_perp.transpose() * (atom.position - a)));
      base_masses.push_back(atom.weight *
                            projection_jacobian(g.frame_p, atom.tangent));
    }
    // Cluster the offsets: sheets further apart than the cell scale split.
    const double fiber_threshold = 0.5 * std::max(1.0, lip_bound) * width;
    const auto clusters = cluster_values(offsets, fiber_threshold / 2.0);
    int cell_q = 0;
    for (const auto& cluster : clusters) {
      double base_mass = 0.0;
      Vec mean = Vec::Zero(v.n() - m);
      double raw_mass = 0.0;
      for (int ci : cluster) {
        base_mass += base_masses[static_cast<size_t>(ci)];
        const double w = atoms[static_cast<size_t>(members[static_cast<size_t>(ci)])].weight;
        mean += w * offsets[static_cast<size_t>(ci)];
        raw_mass += w;
      }
      mean /= raw_mass;
      const double mult_real = base_mass / cell_measure;
      const int mult = static_cast<int>(std::lround(mult_real));
      if (mult < 1 || std::abs(mult_real - mult) > 0.1 * std::max(1, mult))
        throw Error("non-integer multiplicity: cell base mass " +
                    std::to_string(mult_real));
      cell.fiber.push_back({mean, mult});
      cell_q += mult;
    }
    std::sort(cell.fiber.begin(), cell.fiber.end(),
              [](const FiberPoint& x, const FiberPoint& y) {
                for (Eigen::Index i = 0; i < x.offset.size(); ++i)
                  if (x.offset(i) != y.offset(i)) return x.offset(i) < y.offset(i);
                return x.multiplicity < y.multiplicity;
              });
    if (common_q < 0) common_q = cell_q;
    if (cell_q != common_q)
      throw Error("non-integer multiplicity: cells disagree on Q");
    g.cells.push_back(std::move(cell));
  }
  g.total_multiplicity = common_q;

  // Lipschitz estimate over face-adjacent nonempty cells.
  std::map<std::vector<int>, int> cell_by_index;
  for (int i = 0; i < static_cast<int>(g.cells.size()); ++i)
    cell_by_index[g.cells[static_cast<size_t>(i)].index] = i;
  for (const auto& [index, i] : cell_by_index) {
    for (int axis = 0; axis < m; ++axis) {
      std::vector<int> neighbor = index;
      neighbor[static_cast<size_t>(axis)] += 1;
      const auto it = cell_by_index.find(neighbor);
      if (it == cell_by_index.end()) continue;
      const double d = matching_distance(
          expand_fiber(g.cells[static_cast<size_t>(i)].fiber),
          expand_fiber(g.cells[static_cast<size_t>(it->second)].fiber),
          nullptr, &g.greedy_matching);
      g.lip_estimate = std::max(g.lip_estimate, d / width);
    }
  }
  g.items.push_back({"lip(u) <= L", g.lip_estimate, lip_bound,
                     g.lip_estimate <= lip_bound, "conclusion",
                     g.greedy_matching ? "greedy matching (Q > 5): estimate"
                                         " may exceed the optimal value"
                                       : ""});

  // Conclusion (3): the graph varifold reproduces the cylinder mass.
  const double graph_mass = graph_varifold(g).total_mass();
  const double cyl_mass = v.mass(cyl);
  g.items.push_back({"graph mass = ||V||(cylinder)", graph_mass, cyl_mass,
                     std::abs(graph_mass - cyl_mass) <=
                         0.01 * (1.0 + cyl_mass),
                     "conclusion", "within 1%; affine scenes land at 1e-6"});
  g.pass = g.premises_pass && conclusions_ok(g.items);
  return g;
}

QuadratureVarifold graph_varifold(const QValuedGraph& g) {
  if (g.cells.empty()) throw Error("graph has no cells");
  const int m = static_cast<int>(g.frame_p.cols());
  const int n = static_cast<int>(g.frame_p.rows());
  const int codim = n - m;
  const double width = 2.0 * g.radius / g.cellcount;
  const double cell_measure = std::pow(width, m);

  std::map<std::vector<int>, int> cell_by_index;
  for (int i = 0; i < static_cast<int>(g.cells.size()); ++i)
    cell_by_index[g.cells[static_cast<size_t>(i)].index] = i;

  std::vector<Atom> atoms;
  std::int64_t next_id = 0;
  bool isolated_flagged = false;
  for (const GraphCell& cell : g.cells) {
    const auto points = expand_fiber(cell.fiber);
    // One slope matrix per expanded fiber point from matched neighbor
    // differences along each axis (central where possible).
    for (size_t pi = 0; pi < points.size(); ++pi) {
      Mat slope = Mat::Zero(codim, m);
      bool any_neighbor = false;
      for (int axis = 0; axis < m; ++axis) {
        std::vector<int> plus = cell.index, minus = cell.index;
        plus[static_cast<size_t>(axis)] += 1;
        minus[static_cast<size_t>(axis)] -= 1;
        const auto it_plus = cell_by_index.find(plus);
        const auto it_minus = cell_by_index.find(minus);
        Vec diff = Vec::Zero(codim);
        double dz = 0.0;
        auto matched_offset = [&](int cell_idx) {
          const auto nb = expand_fiber(
              g.cells[static_cast<size_t>(cell_idx)].fiber);
          std::vector<int> assignment;
          bool greedy = false;
          matching_distance(points, nb, &assignment, &greedy);
          return nb[static_cast<size_t>(assignment[pi])];
        };
        if (it_plus != cell_by_index.end() && it_minus != cell_by_index.end()) {
          diff = matched_offset(it_plus->second) -
                 matched_offset(it_minus->second);
          dz = 2.0 * width;
        } else if (it_plus != cell_by_index.end()) {
          diff = matched_offset(it_plus->second) - points[pi];
          dz = width;
        } else if (it_minus != cell_by_index.end()) {
          diff = points[pi] - matched_offset(it_minus->second);
          dz = width;
        }
        if (dz > 0) {
          slope.col(axis) = diff / dz;
          any_neighbor = true;
        }
      }
      if (!any_neighbor) isolated_flagged = true;

      const double area_factor = std::sqrt(
          (Mat::Identity(m, m) + slope.transpose() * slope).determinant());
      Atom atom;
      atom.position = g.center + g.frame_p * cell.base_center +
                      g.frame_perp * points[pi];
      std::vector<Vec> basis;
      for (int axis = 0; axis < m; ++axis)
        basis.push_back(Vec(g.frame_p.col(axis) +
                            g.frame_perp * slope.col(axis)));
      atom.tangent = Plane::from_basis(basis);
      atom.weight = cell_measure * area_factor;
      atom.mean_curvature = Vec::Zero(n);
      atom.tangent_derivative =
          Mat::Zero(static_cast<Eigen::Index>(n) * n, n);
      atom.cell_size = width * area_factor;
      atom.id = next_id++;
      atoms.push_back(std::move(atom));
    }
  }
  SceneRecord rec;
  rec.description = "graph varifold from Q-valued extraction";
  if (isolated_flagged)
    rec.notes.push_back("isolated cells: tangent fell back to the base plane");
  return QuadratureVarifold(n, m, std::move(atoms), std::move(rec));
}

nlohmann::json QValuedGraph::to_json() const {
  nlohmann::json j;
  j["radius"] = radius;
  j["cellcount"] = cellcount;
  j["Q"] = total_multiplicity;
  j["lip_estimate"] = lip_estimate;
  j["greedy_matching"] = greedy_matching;
  j["checks"] = items_to_json(items);
  j["premises_pass"] = premises_pass;
  j["pass"] = pass;
  nlohmann::json cells_json = nlohmann::json::array();
  for (const GraphCell& cell : cells) {
    nlohmann::json jc;
    jc["index"] = cell.index;
    nlohmann::json fiber = nlohmann::json::array();
    for (const FiberPoint& fp : cell.fiber) {
      nlohmann::json jf;
      nlohmann::json off = nlohmann::json::array();
      for (Eigen::Index i = 0; i < fp.offset.size(); ++i)
        off.push_back(fp.offset(i));
      jf["offset"] = std::move(off);
      jf["multiplicity"] = fp.multiplicity;
      fiber.push_back(std::move(jf));
    }
    jc["fiber"] = std::move(fiber);
    cells_json.push_back(std::move(jc));
  }
  j["cells"] = std::move(cells_json);
  return j;
}

PlaneDecomposition detect_planes(const QuadratureVarifold& v, const Vec& a,
                                 double r) {
  PlaneDecomposition dec;
  const Region ball = Region::open_ball(a, r);
  const int n = v.n();
  const int m = v.m();

  std::vector<int> inside;
  for (int i = 0; i < static_cast<int>(v.size()); ++i) {
    const Atom& atom = v.atoms()[static_cast<size_t>(i)];
    if (!ball.contains(atom.position)) continue;
    if (!atom.tangent_derivative || atom.tangent_derivative->norm() > 1e-10)
      throw Error("not a null-curvature varifold");
    inside.push_back(i);
  }
  if (inside.empty()) throw Error("detect_planes: empty ball");

  // Cluster by (tangent plane, affine offset), collapsing exact duplicates
  // first so the quadratic linkage runs on a handful of keys.
  std::vector<Vec> keys;
  keys.reserve(inside.size());
  for (int i : inside) {
    const Atom& atom = v.atoms()[static_cast<size_t>(i)];
    Vec key(static_cast<Eigen::Index>(n) * n + n);
    key.head(static_cast<Eigen::Index>(n) * n) = atom.tangent.flatten();
    key.tail(n) = atom.tangent.reject(atom.position);
    keys.push_back(std::move(key));
  }
  std::map<std::vector<double>, std::vector<int>> exact;
  for (size_t i = 0; i < keys.size(); ++i) {
    std::vector<double> k(keys[i].data(), keys[i].data() + keys[i].size());
    exact[std::move(k)].push_back(static_cast<int>(i));
  }
  std::vector<Vec> reps;
  std::vector<std::vector<int>> rep_members;
  for (const auto& [k, members] : exact) {
    reps.push_back(Eigen::Map<const Vec>(k.data(),
                                         static_cast<Eigen::Index>(k.size())));
    rep_members.push_back(members);
  }
  const auto clusters = cluster_values(reps, 0.5e-8);

  const double omega = unit_ball_volume(m);
  double total_mass = 0.0;
  for (int i : inside) total_mass += v.atoms()[static_cast<size_t>(i)].weight;

  for (const auto& cluster : clusters) {
    const int first_rep = cluster.front();
    const int first_local = rep_members[static_cast<size_t>(first_rep)].front();
    const Atom& witness =
        v.atoms()[static_cast<size_t>(inside[static_cast<size_t>(first_local)])];
    double mass = 0.0;
    for (int rep : cluster)
      for (int local : rep_members[static_cast<size_t>(rep)])
        mass += v.atoms()[static_cast<size_t>(inside[static_cast<size_t>(local)])]
                    .weight;

    DetectedPlane dp;
    dp.plane = witness.tangent;
    dp.offset = witness.tangent.reject(witness.position);
    dp.mass = mass;
    const double dist = (dp.offset - dp.plane.reject(a)).norm();
    const double chord_sq = r * r - dist * dist;
    if (chord_sq <= 0) {
      dec.residual_mass += mass;
      continue;
    }
    dp.chord_measure = (m == 1) ? 2.0 * std::sqrt(chord_sq)
                                : omega * std::pow(std::sqrt(chord_sq), m);
    const double mult_real = dp.mass / dp.chord_measure;
    const int mult = static_cast<int>(std::lround(mult_real));
    if (mult < 1 || std::abs(mult_real - mult) > 0.1 * mult) {
      dec.residual_mass += mass;
      dec.items.push_back({"non-integer multiplicity flagged", mult_real,
                           static_cast<double>(mult), false, "conclusion",
                           "cluster moved to residual"});
      continue;
    }
    dp.multiplicity = mult;
    dec.planes.push_back(std::move(dp));
  }
  std::sort(dec.planes.begin(), dec.planes.end(),
            [](const DetectedPlane& x, const DetectedPlane& y) {
              return x.mass > y.mass;
            });

  double accounted = dec.residual_mass;
  for (const DetectedPlane& dp : dec.planes) accounted += dp.mass;
  dec.items.push_back({"cluster masses + residual = ball mass", accounted,
                       total_mass,
                       std::abs(accounted - total_mass) <=
                           1e-9 * (1.0 + total_mass),
                       "conclusion", "exact bookkeeping"});
  dec.items.push_back({"residual mass", dec.residual_mass,
                       default_tolerances().quadrature,
                       dec.residual_mass <= default_tolerances().quadrature,
                       "conclusion", ""});
  dec.pass = conclusions_ok(dec.items);
  return dec;
}

nlohmann::json PlaneDecomposition::to_json() const {
  nlohmann::json j;
  j["residual_mass"] = residual_mass;
  j["pass"] = pass;
  j["checks"] = items_to_json(items);
  nlohmann::json planes_json = nlohmann::json::array();
  for (const DetectedPlane& dp : planes) {
    nlohmann::json jp;
    nlohmann::json off = nlohmann::json::array();
    for (Eigen::Index i = 0; i < dp.offset.size(); ++i)
      off.push_back(dp.offset(i));
    jp["offset"] = std::move(off);
    jp["multiplicity"] = dp.multiplicity;
    jp["mass"] = dp.mass;
    jp["chord_measure"] = dp.chord_measure;
    planes_json.push_back(std::move(jp));
  }
  j["planes"] = std::move(planes_json);
  return j;
}

DecayReport check_tangent_cone_decay(const QuadratureVarifold& v, const Vec& a,
                                     double r, const Plane& p, double c,
                                     double q) {
  DecayReport rep;
  const int m = v.m();
  const MuLambda ml = mu_lambda(m, q);

  const double ratio = v.mass(Region::closed_ball(a, r)) / std::pow(r, m);
  rep.items.push_back({"r^-m ||V||(B(a,r)) <= C", ratio, c, ratio <= c,
                       "premise", ""});
  const double small = smallness(v, a, r, q);
  rep.items.push_back({"r^mu ||H||_q <= C", small, c, small <= c, "premise",
                       ""});
  double worst_tilt_ratio = 0.0;
  for (const Atom& atom : v.atoms()) {
    const double dist = (atom.position - a).norm();
    if (dist > r || dist == 0.0) continue;
    worst_tilt_ratio =
        std::max(worst_tilt_ratio,
                 plane_distance(atom.tangent, p) / std::pow(dist, ml.mu));
  }
  rep.items.push_back({"|T_V(x) - P| <= C |x-a|^mu per atom",
                       worst_tilt_ratio, c, worst_tilt_ratio <= c, "premise",
                       ""});
  rep.premises_pass = premises_ok(rep.items);

  const double lo =
      std::min(r / 2.0, std::max(r / 50.0, 64.0 * v.max_cell_size()));
  rep.grid = log_radius_grid(lo, r, 20);
  double sup_ratio = 0.0;
  for (double t : rep.grid)
    sup_ratio = std::max(
        sup_ratio, v.mass(Region::closed_ball(a, t)) / std::pow(t, m));
  rep.c_prime = c * std::pow(sup_ratio, 1.0 - 1.0 / q);

  double worst_decay = -std::numeric_limits<double>::infinity();
  for (double t : rep.grid) {
    double dv = 0.0;
    double defect = 0.0;
    const Region ball = Region::closed_ball(a, t);
    for (const Atom& atom : v.atoms()) {
      if (!ball.contains(atom.position)) continue;
      dv += atom.weight * atom.mean_curvature->norm();
      defect = std::max(defect, p.reject(atom.position - a).norm() / t);
    }
    const double bound =
        std::pow(t, m - 1) * rep.c_prime * std::pow(t / r, ml.mu);
    rep.delta_v_mass.push_back(dv);
    rep.decay_bound.push_back(bound);
    rep.blowup_defect.push_back(defect);
    rep.density.push_back(v.mass(ball) / std::pow(t, m) /
                          unit_ball_volume(m));
    worst_decay = std::max(worst_decay, dv - bound);
  }
  rep.items.push_back({"||dV||(B(a,t)) <= t^{m-1} C' (t/r)^mu on grid",
                       worst_decay, 0.0, worst_decay <= 1e-12, "conclusion",
                       "C' from the monotone mass bound"});
  rep.items.push_back({"blow-up defect shrinks toward 0",
                       rep.blowup_defect.front(),
                       rep.blowup_defect.back() + 1e-12,
                       rep.blowup_defect.front() <=
                           rep.blowup_defect.back() + 1e-12,
                       "conclusion", "defect at t_min vs t_max"});
  rep.limit_q = static_cast<int>(std::lround(rep.density.front()));
  rep.items.push_back({"rescaled density tends to an integer Q",
                       rep.density.front(),
                       static_cast<double>(rep.limit_q),
                       std::abs(rep.density.front() - rep.limit_q) <= 0.1,
                       "conclusion", ""});
  rep.pass = rep.premises_pass && conclusions_ok(rep.items);
  return rep;
}

nlohmann::json DecayReport::to_json() const {
  nlohmann::json j;
  j["grid"] = grid;
  j["delta_v_mass"] = delta_v_mass;
  j["decay_bound"] = decay_bound;
  j["blowup_defect"] = blowup_defect;
  j["density"] = density;
  j["c_prime"] = c_prime;
  j["limit_q"] = limit_q;
  j["checks"] = items_to_json(items);
  j["premises_pass"] = premises_pass;
  j["pass"] = pass;
  return j;
}

}  // namespace vlab
