#include "vlab/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

namespace vlab {

namespace {

// Collapse bitwise-equal values, remembering which atoms share each
// representative. Scenes with exact shared tangents shrink massively here.
struct DedupedValues {
  std::vector<Vec> values;
  std::vector<std::vector<int>> members;  // atom indices per representative
};

DedupedValues dedupe(const std::vector<Vec>& raw) {
  DedupedValues out;
  std::unordered_map<std::string, int> index;
  for (int i = 0; i < static_cast<int>(raw.size()); ++i) {
    std::string key(reinterpret_cast<const char*>(raw[i].data()),
                    static_cast<size_t>(raw[i].size()) * sizeof(double));
    auto [it, inserted] = index.emplace(key, static_cast<int>(out.values.size()));
    if (inserted) {
      out.values.push_back(raw[i]);
      out.members.emplace_back();
    }
    out.members[static_cast<size_t>(it->second)].push_back(i);
  }
  return out;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

double min_set_distance(const std::vector<Vec>& a, const std::vector<Vec>& b) {
  double best = std::numeric_limits<double>::infinity();
  for (const Vec& x : a)
    for (const Vec& y : b) best = std::min(best, (x - y).norm());
  return best;
}

double dist_to_set(const Vec& x, const std::vector<Vec>& set) {
  double best = std::numeric_limits<double>::infinity();
  for (const Vec& y : set) best = std::min(best, (x - y).norm());
  return best;
}

Vec component_barycenter(const QuadratureVarifold& piece) {
  // Shared-value components get the exact value, not a rounded average.
  bool all_equal = true;
  for (const Atom& a : piece.atoms())
    if (*a.value != *piece.atoms().front().value) {
      all_equal = false;
      break;
    }
  if (all_equal && !piece.empty()) return *piece.atoms().front().value;
  Vec c;
  double mass = 0.0;
  for (const Atom& a : piece.atoms()) {
    if (c.size() == 0) c = Vec::Zero(a.value->size());
    c += a.weight * (*a.value);
    mass += a.weight;
  }
  return mass > 0 ? Vec(c / mass) : c;
}

}  // namespace

std::vector<std::vector<int>> cluster_values(const std::vector<Vec>& values,
                                             double tau) {
  if (tau < 0) throw Error("cluster threshold must be nonnegative");
  const int n = static_cast<int>(values.size());
  UnionFind uf(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if ((values[i] - values[j]).norm() <= 2.0 * tau) uf.unite(i, j);
  std::vector<std::vector<int>> clusters;
  std::unordered_map<int, int> root_to_cluster;
  for (int i = 0; i < n; ++i) {
    const int root = uf.find(i);
    auto [it, inserted] =
        root_to_cluster.emplace(root, static_cast<int>(clusters.size()));
    if (inserted) clusters.emplace_back();
    clusters[static_cast<size_t>(it->second)].push_back(i);
  }
  return clusters;
}

SeparationResult separate(const QuadratureVarifold& v,
                          const std::vector<Vec>& d_values,
                          const std::vector<Vec>& k_values, double delta) {
  if (delta < 0) throw Error("separation delta must be nonnegative");
  if (k_values.empty()) throw Error("separation needs a nonempty K");
  if (!v.has_values()) throw Error("separation needs tracked values");
  if (!d_values.empty() &&
      min_set_distance(k_values, d_values) <= 2.0 * delta)
    throw Error("value sets too close");

  std::vector<bool> in_w(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    const Vec& value = *v.atoms()[i].value;
    const double dk = dist_to_set(value, k_values);
    if (dk <= delta) {
      in_w[i] = true;
    } else if (d_values.empty() || dist_to_set(value, d_values) > delta) {
      throw Error("separation violated");
    }
  }
  size_t idx = 0;
  SeparationResult res{
      v.restrict([&](const Atom&) { return in_w[idx++]; }, "value near K"),
      QuadratureVarifold(v.n(), v.m(), {}, v.scene()), 0.0, {}, false};
  idx = 0;
  res.rest = v.restrict([&](const Atom&) { return !in_w[idx++]; },
                        "value away from K");

  // No-boundary certificate: first-variation additivity over the battery.
  const double scale = 1.0 + v.total_mass();
  for (const TestField& field : standard_test_fields(v.n())) {
    const double gap_v = v.first_variation_check(field).gap;
    const double gap_w =
        res.w.empty() ? 0.0 : res.w.first_variation_check(field).gap;
    const double gap_rest =
        res.rest.empty() ? 0.0 : res.rest.first_variation_check(field).gap;
    res.additivity_defect = std::max(
        res.additivity_defect, std::abs(gap_v - gap_w - gap_rest));
  }
  const double tol = default_tolerances().quadrature * scale;
  res.certified = res.additivity_defect <= tol;
  res.items.push_back({"first-variation additivity", res.additivity_defect,
                       tol, res.certified, "conclusion",
                       "|gap_V - gap_W - gap_rest| over the field battery"});
  return res;
}

PartitionAtScaleResult partition_at_scale(const QuadratureVarifold& v,
                                          const Vec& a, double r,
                                          double lambda, double q,
                                          const ConstantsTable& table, int Q) {
  if (!(lambda > 0 && lambda < 1)) throw Error("lambda must be in (0,1)");
  if (!v.has_values() || !v.has_field(FieldSelector::ValueDerivative))
    throw Error("partition needs tracked values and derivatives");
  PartitionAtScaleResult res;
  const int m = v.m();
  const double omega = unit_ball_volume(m);

  const double ratio = v.mass(Region::closed_ball(a, r)) / std::pow(r, m);
  const double slack = 4.0 * v.max_cell_size() / r;
  res.items.push_back({"r^-m ||V||(B(a,r)) <= (Q+1/4) omega", ratio,
                       (Q + 0.25) * omega,
                       ratio <= (Q + 0.25) * omega + slack, "premise",
                       "slack: up to four boundary cells"});
  const double curv = v.lq_seminorm(Region::closed_ball(a, r),
                                    FieldSelector::MeanCurvature,
                                    static_cast<double>(m));
  res.items.push_back({"||H||_m over ball <= eps2", curv, table.eps2,
                       curv <= table.eps2 + 1e-15, "premise", ""});
  const double lam_cap = table.eps2 / (1.0 + table.eps2);
  res.items.push_back({"lambda <= eps2/(1+eps2)", lambda, lam_cap,
                       lambda <= lam_cap + 1e-15, "warning",
                       "range condition of the lemma; construction proceeds"});
  res.premises_pass = premises_ok(res.items);

  // tau_m from the parent scale.
  const MuLambda ml = mu_lambda(m, q);
  const Region parent_ball = Region::open_ball(a, r);
  res.tau =
      (m == 1)
          ? table.gamma * v.lq_seminorm(parent_ball,
                                        FieldSelector::ValueDerivative, 1.0)
          : std::pow(table.gamma, m / ml.mu) *
                std::pow(1.0 - lambda, ml.mu) *
                v.lq_seminorm(parent_ball, FieldSelector::ValueDerivative, q);

  const QuadratureVarifold target =
      v.restrict(Region::open_ball(a, lambda * r), "B(a, lambda r)");
  if (target.empty()) {
    res.items.push_back({"target ball is nonempty", 0.0, 0.0, false,
                         "premise", "V_{lambda r} = 0"});
    res.premises_pass = false;
    return res;
  }

  std::vector<Vec> raw;
  raw.reserve(target.size());
  for (const Atom& atom : target.atoms()) raw.push_back(*atom.value);
  const DedupedValues dd = dedupe(raw);
  const auto clusters = cluster_values(dd.values, res.tau);

  // Deterministic order: by smallest atom id in the cluster.
  std::vector<std::pair<std::int64_t, std::vector<int>>> ordered;
  for (const auto& cluster : clusters) {
    std::int64_t lead = std::numeric_limits<std::int64_t>::max();
    std::vector<int> atom_indices;
    for (int rep : cluster)
      for (int ai : dd.members[static_cast<size_t>(rep)]) {
        atom_indices.push_back(ai);
        lead = std::min(lead, target.atoms()[static_cast<size_t>(ai)].id);
      }
    std::sort(atom_indices.begin(), atom_indices.end());
    ordered.emplace_back(lead, std::move(atom_indices));
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });

  // Each component goes through the value separation, which also certifies
  // the no-boundary property via first-variation additivity.
  std::vector<std::vector<Vec>> cluster_value_sets(ordered.size());
  for (size_t c = 0; c < ordered.size(); ++c) {
    std::unordered_map<std::string, bool> seen;
    for (int ai : ordered[c].second) {
      const Vec& val = *target.atoms()[static_cast<size_t>(ai)].value;
      std::string key(reinterpret_cast<const char*>(val.data()),
                      static_cast<size_t>(val.size()) * sizeof(double));
      if (seen.emplace(std::move(key), true).second)
        cluster_value_sets[c].push_back(val);
    }
  }
  double pieces_mass = 0.0;
  for (size_t c = 0; c < ordered.size(); ++c) {
    std::vector<Vec> d_values;
    for (size_t other = 0; other < ordered.size(); ++other)
      if (other != c)
        d_values.insert(d_values.end(), cluster_value_sets[other].begin(),
                        cluster_value_sets[other].end());
    SeparationResult sep =
        separate(target, d_values, cluster_value_sets[c], res.tau);
    res.items.push_back({"component " + std::to_string(c) +
                             " separation certificate",
                         sep.additivity_defect, sep.items.back().bound,
                         sep.certified, "conclusion", ""});
    pieces_mass += sep.w.total_mass();
    res.cluster_centers.push_back(component_barycenter(sep.w));
    res.pieces.push_back(std::move(sep.w));
  }

  res.items.push_back({"|Pi| <= Q", static_cast<double>(res.pieces.size()),
                       static_cast<double>(Q),
                       static_cast<int>(res.pieces.size()) <= Q, "conclusion",
                       "partition lemma violated if this fails"});
  const double target_mass = target.total_mass();
  res.items.push_back({"partition mass additivity", pieces_mass, target_mass,
                       std::abs(pieces_mass - target_mass) <=
                           1e-9 * (1.0 + target_mass),
                       "conclusion", ""});
  const double diam_bound = 2.0 * Q * res.tau + 1e-12;
  for (size_t i = 0; i < res.pieces.size(); ++i) {
    const double diam = res.pieces[i].support_diameter(
        QuadratureVarifold::ValueSelector::TrackedValue);
    res.items.push_back({"diam(values of component " + std::to_string(i) +
                             ") <= 2 Q tau",
                         diam, diam_bound, diam <= diam_bound, "conclusion",
                         ""});
  }
  res.pass = res.premises_pass && conclusions_ok(res.items);
  return res;
}

PartitionLadder nested_partition(const QuadratureVarifold& v, const Vec& a,
                                 double r, double lambda, int depth, double q,
                                 const ConstantsTable& table, int Q) {
  if (depth < 1) throw Error("ladder depth must be >= 1");
  PartitionLadder ladder;
  ladder.center = a;
  ladder.base_radius = r;
  ladder.lambda = lambda;
  ladder.depth = depth;

  const int m = v.m();
  const double omega = unit_ball_volume(m);
  // Theorem premise (i): the density-ratio bound along the whole ladder.
  std::vector<double> grid =
      log_radius_grid(std::min(r / 2.0, std::max(r / 50.0,
                                                 64.0 * v.max_cell_size())),
                      r, 20);
  for (int k = 1; k <= depth; ++k) grid.push_back(r * std::pow(lambda, k));
  std::sort(grid.begin(), grid.end());
  double worst_excess = -std::numeric_limits<double>::infinity();
  double worst_t = r;
  for (double t : grid) {
    const double ratio = v.mass(Region::closed_ball(a, t)) / std::pow(t, m);
    const double slack = 4.0 * v.max_cell_size() / t;
    const double excess = ratio - ((Q + 0.25) * omega + slack);
    if (excess > worst_excess) {
      worst_excess = excess;
      worst_t = t;
    }
  }
  ladder.items.push_back(
      {"t^-m ||V||(B(a,t)) <= (Q+1/4) omega for t <= r", worst_excess, 0.0,
       worst_excess <= 0.0, "premise",
       "worst at t = " + std::to_string(worst_t)});
  const double curv = v.lq_seminorm(Region::closed_ball(a, r),
                                    FieldSelector::MeanCurvature,
                                    static_cast<double>(m));
  ladder.items.push_back({"||H||_m over B(a,r) <= eps2", curv, table.eps2,
                          curv <= table.eps2 + 1e-15, "premise", ""});
  ladder.premises_pass = premises_ok(ladder.items);
  if (!ladder.premises_pass)
    throw Error("nested partition premise failure at level 0");

  // Level 0: Pi_0 = {V_r}.
  PartitionLevel root;
  root.radius = r;
  {
    ComponentRecord rec;
    rec.id = 0;
    rec.parent = -1;
    rec.piece = v.restrict(Region::open_ball(a, r), "B(a, r)");
    rec.mass = rec.piece.total_mass();
    rec.meets_half_ball = rec.piece.mass(Region::open_ball(a, r / 2.0)) > 0;
    rec.value_support_diameter = rec.piece.support_diameter(
        QuadratureVarifold::ValueSelector::TrackedValue);
    rec.cluster_center = component_barycenter(rec.piece);
    root.components.push_back(std::move(rec));
  }
  ladder.levels.push_back(std::move(root));

  for (int k = 0; k < depth; ++k) {
    const PartitionLevel& prev = ladder.levels.back();
    const double r_parent = prev.radius;
    const double r_next = lambda * r_parent;
    PartitionLevel level;
    level.radius = r_next;
    int next_id = 0;
    for (size_t p = 0; p < prev.components.size(); ++p) {
      const ComponentRecord& parent = prev.components[p];
      if (!parent.meets_half_ball) continue;
      const auto sub = partition_at_scale(parent.piece, a, r_parent, lambda,
                                          q, table, Q);
      if (!sub.premises_pass)
        throw Error("nested partition premise failure at level " +
                    std::to_string(k + 1));
      level.tau = std::max(level.tau, sub.tau);
      for (const CheckItem& item : sub.items) level.items.push_back(item);
      for (size_t i = 0; i < sub.pieces.size(); ++i) {
        ComponentRecord rec;
        rec.id = next_id++;
        rec.parent = static_cast<int>(p);
        rec.piece = sub.pieces[i];
        rec.mass = rec.piece.total_mass();
        rec.meets_half_ball =
            rec.piece.mass(Region::open_ball(a, r_next / 2.0)) > 0;
        rec.value_support_diameter = rec.piece.support_diameter(
            QuadratureVarifold::ValueSelector::TrackedValue);
        rec.cluster_center = sub.cluster_centers[i];
        level.components.push_back(std::move(rec));
      }
    }
    // Theorem (2): the displayed per-level diameter bound with the
    // level-(k-1) seminorm.
    const MuLambda ml = mu_lambda(m, q);
    double bound;
    if (m == 1) {
      bound = table.C0 * v.lq_seminorm(Region::open_ball(a, r_parent),
                                       FieldSelector::ValueDerivative, 1.0);
    } else {
      bound = table.C0 *
              v.lq_seminorm(Region::open_ball(a, r_parent),
                            FieldSelector::ValueDerivative, q) *
              std::pow(r_next, ml.mu);
    }
    for (const ComponentRecord& rec : level.components)
      level.items.push_back(
          {"level " + std::to_string(k + 1) + " diam <= C0-bound",
           rec.value_support_diameter, bound + 1e-12,
           rec.value_support_diameter <= bound + 1e-12, "conclusion", ""});
    ladder.levels.push_back(std::move(level));
  }

  // Nesting is structural (components are restrictions of their parents);
  // record |Pi'_k| and the stabilization index.
  for (const PartitionLevel& level : ladder.levels) {
    int count = 0;
    for (const ComponentRecord& rec : level.components)
      if (rec.meets_half_ball) ++count;
    ladder.pi_prime_counts.push_back(count);
  }
  ladder.k0 = 1;
  for (size_t k = 1; k < ladder.pi_prime_counts.size(); ++k)
    if (ladder.pi_prime_counts[k] != ladder.pi_prime_counts[k - 1])
      ladder.k0 = static_cast<int>(k);
  bool conclusions = true;
  for (const PartitionLevel& level : ladder.levels)
    conclusions = conclusions && conclusions_ok(level.items);
  ladder.pass = ladder.premises_pass && conclusions;
  return ladder;
}

nlohmann::json PartitionLadder::to_json() const {
  nlohmann::json j;
  j["base_radius"] = base_radius;
  j["lambda"] = lambda;
  j["depth"] = depth;
  j["k0"] = k0;
  j["pi_prime_counts"] = pi_prime_counts;
  j["premises_pass"] = premises_pass;
  j["pass"] = pass;
  j["checks"] = items_to_json(items);
  nlohmann::json levels_json = nlohmann::json::array();
  for (const PartitionLevel& level : levels) {
    nlohmann::json jl;
    jl["radius"] = level.radius;
    jl["tau"] = level.tau;
    jl["checks"] = items_to_json(level.items);
    nlohmann::json comps = nlohmann::json::array();
    for (const ComponentRecord& rec : level.components) {
      nlohmann::json jc;
      jc["id"] = rec.id;
      jc["parent"] = rec.parent;
      jc["atoms"] = rec.piece.size();
      jc["mass"] = rec.mass;
      jc["meets_half_ball"] = rec.meets_half_ball;
      jc["value_support_diameter"] = rec.value_support_diameter;
      comps.push_back(std::move(jc));
    }
    jl["components"] = std::move(comps);
    levels_json.push_back(std::move(jl));
  }
  j["levels"] = std::move(levels_json);
  return j;
}

HolderReport holder_certificate(const PartitionLadder& ladder,
                                const QuadratureVarifold& v, double sigma,
                                double q, const ConstantsTable& table) {
  HolderReport rep;
  rep.sigma = sigma;
  const Vec& a = ladder.center;
  const double r = ladder.base_radius;
  const int m = v.m();
  const double omega = unit_ball_volume(m);
  const MuLambda ml = mu_lambda(m, q);

  const double ratio = v.mass(Region::closed_ball(a, r)) / std::pow(r, m);
  const double slack = 4.0 * v.max_cell_size() / r;
  rep.items.push_back({"r^-m ||V||(B(a,r)) <= (Q+eps3) omega", ratio,
                       (table.Q + table.eps3) * omega,
                       ratio <= (table.Q + table.eps3) * omega + slack,
                       "premise", ""});
  const double small = smallness(v, a, r, q);
  rep.items.push_back({"r^mu ||H||_q <= eps4", small, table.eps4,
                       small <= table.eps4 + 1e-15, "premise", ""});
  const double df_norm =
      std::pow(r, ml.mu) * v.lq_seminorm(Region::closed_ball(a, r),
                                         FieldSelector::ValueDerivative, q);
  rep.items.push_back({"r^mu ||df||_q <= sigma", df_norm, sigma,
                       df_norm <= sigma + 1e-15, "premise", ""});
  // Theta^m(||V||, a) = Q, probed at the smallest radius that still holds a
  // representative atom count.
  const double t_min =
      std::min(r / 2.0, std::max(64.0 * v.max_cell_size(), r / 100.0));
  const double density_at_a =
      v.mass(Region::closed_ball(a, t_min)) / std::pow(t_min, m) / omega;
  rep.items.push_back({"Theta^m(||V||, a) = Q", density_at_a,
                       static_cast<double>(table.Q),
                       std::abs(density_at_a - table.Q) <= 0.1, "premise",
                       "probed at t = " + std::to_string(t_min)});
  const double lam_cap = table.eps4 / (1.0 + table.eps4);
  rep.items.push_back({"lambda <= eps4/(1+eps4)", ladder.lambda, lam_cap,
                       ladder.lambda <= lam_cap + 1e-15, "warning", ""});
  rep.premises_pass = premises_ok(rep.items);

  rep.k0 = ladder.k0;
  rep.items.push_back(
      {"|Pi'_k| eventually constant", static_cast<double>(ladder.k0),
       static_cast<double>(ladder.depth),
       ladder.k0 < static_cast<int>(ladder.levels.size()) - 1, "conclusion",
       "k0 must settle before the ladder ends"});

  // Follow each stabilized Pi' chain from level k0 to the deepest level,
  // checking value-support nesting and parent-map surjectivity.
  const auto& levels = ladder.levels;
  bool nesting_ok = true;
  bool surjective = true;
  std::vector<int> chain;  // component index per chain at the current level
  for (size_t ci = 0; ci < levels[static_cast<size_t>(ladder.k0)].components.size(); ++ci)
    if (levels[static_cast<size_t>(ladder.k0)].components[ci].meets_half_ball)
      chain.push_back(static_cast<int>(ci));
  std::vector<std::vector<int>> chains(chain.size());
  for (size_t i = 0; i < chain.size(); ++i) chains[i].push_back(chain[i]);
  for (size_t k = static_cast<size_t>(ladder.k0); k + 1 < levels.size(); ++k) {
    for (size_t i = 0; i < chains.size(); ++i) {
      const int parent_index = chains[i].back();
      int child = -1;
      for (size_t ci = 0; ci < levels[k + 1].components.size(); ++ci) {
        const ComponentRecord& rec = levels[k + 1].components[ci];
        if (rec.parent == parent_index && rec.meets_half_ball) {
          child = static_cast<int>(ci);
          break;
        }
      }
      if (child < 0) {
        surjective = false;
        break;
      }
      // child values must sit inside the parent's value support
      const auto& parent_piece =
          levels[k].components[static_cast<size_t>(parent_index)].piece;
      const auto& child_piece =
          levels[k + 1].components[static_cast<size_t>(child)].piece;
      std::vector<Vec> parent_values;
      for (const Atom& atom : parent_piece.atoms())
        parent_values.push_back(*atom.value);
      for (const Atom& atom : child_piece.atoms())
        if (dist_to_set(*atom.value, parent_values) > 1e-12) {
          nesting_ok = false;
          break;
        }
      chains[i].push_back(child);
    }
    if (!surjective || !nesting_ok) break;
  }
  rep.items.push_back({"Pi' parent map surjective past k0",
                       surjective ? 1.0 : 0.0, 1.0, surjective, "conclusion",
                       ""});
  rep.items.push_back({"value-support nesting along chains",
                       nesting_ok ? 1.0 : 0.0, 1.0, nesting_ok, "conclusion",
                       ""});

  if (surjective) {
    for (const auto& ch : chains) {
      const auto& final_piece =
          levels[levels.size() - 1].components[static_cast<size_t>(ch.back())]
              .piece;
      rep.upsilon.push_back(component_barycenter(final_piece));
    }
  }
  rep.items.push_back({"|Upsilon| <= Q",
                       static_cast<double>(rep.upsilon.size()),
                       static_cast<double>(table.Q),
                       static_cast<int>(rep.upsilon.size()) <= table.Q,
                       "conclusion", ""});

  // The displayed pointwise bound over the full lambda*r ball.
  const double lambda_r = ladder.lambda * r;
  const auto ball = v.restrict(Region::open_ball(a, lambda_r), "B(a, lr)");
  if (!rep.upsilon.empty()) {
    for (const Atom& atom : ball.atoms()) {
      const double lhs = dist_to_set(*atom.value, rep.upsilon);
      const double rhs =
          table.C1 * sigma *
          std::pow((atom.position - a).norm() / lambda_r, ml.mu);
      if (lhs > rhs + 1e-12) {
        ++rep.bound_violations;
        if (lhs - rhs > rep.worst.lhs - rep.worst.rhs)
          rep.worst = {atom.id, lhs, rhs};
      }
    }
  }
  rep.items.push_back({"dist(f(x), Upsilon) <= C1 sigma (|x-a|/lr)^mu",
                       static_cast<double>(rep.bound_violations), 0.0,
                       rep.bound_violations == 0, "conclusion",
                       "checked atom-by-atom on B(a, lambda r)"});
  rep.pass = rep.premises_pass && conclusions_ok(rep.items);
  return rep;
}

nlohmann::json HolderReport::to_json() const {
  nlohmann::json j;
  j["k0"] = k0;
  j["sigma"] = sigma;
  j["bound_violations"] = bound_violations;
  j["premises_pass"] = premises_pass;
  j["pass"] = pass;
  j["checks"] = items_to_json(items);
  nlohmann::json ups = nlohmann::json::array();
  for (const Vec& y : upsilon) {
    nlohmann::json jy = nlohmann::json::array();
    for (Eigen::Index i = 0; i < y.size(); ++i) jy.push_back(y(i));
    ups.push_back(std::move(jy));
  }
  j["upsilon"] = std::move(ups);
  if (worst.atom_id >= 0)
    j["worst_violation"] = {{"atom", worst.atom_id}, {"lhs", worst.lhs},
                            {"rhs", worst.rhs}};
  return j;
}

}  // namespace vlab
