#include "vlab/monotonicity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace vlab {

nlohmann::json items_to_json(const std::vector<CheckItem>& items) {
  nlohmann::json arr = nlohmann::json::array();
  for (const CheckItem& c : items)
    arr.push_back({{"name", c.name}, {"value", c.value}, {"bound", c.bound},
                   {"pass", c.pass}, {"kind", c.kind}, {"note", c.note}});
  return arr;
}

bool premises_ok(const std::vector<CheckItem>& items) {
  return std::all_of(items.begin(), items.end(), [](const CheckItem& c) {
    return c.kind != "premise" || c.pass;
  });
}

bool conclusions_ok(const std::vector<CheckItem>& items) {
  return std::all_of(items.begin(), items.end(), [](const CheckItem& c) {
    return c.kind != "conclusion" || c.pass;
  });
}

DensityRatio density_ratio(const QuadratureVarifold& v, const Vec& a,
                           double r) {
  if (r <= 0) throw Error("density ratio requires r > 0");
  if (v.empty()) throw Error("density ratio of the zero varifold");
  const double mass = v.mass(Region::closed_ball(a, r));
  const double ratio = mass / std::pow(r, v.m());
  return {ratio, ratio / unit_ball_volume(v.m())};
}

double tilt_integral(const QuadratureVarifold& v, const Vec& a, double s,
                     double r, CenterAtomPolicy policy) {
  if (!(0 <= s && s < r)) throw Error("tilt integral requires 0 <= s < r");
  double total = 0.0;
  const int m = v.m();
  for (const Atom& atom : v.atoms()) {
    const Vec d = atom.position - a;
    const double dist = d.norm();
    if (dist == 0.0) {
      if (s == 0.0 && policy == CenterAtomPolicy::Error)
        throw Error("singular quadrature at center");
      continue;  // excluded: bias bounded by one cell's weight
    }
    if (dist <= s || dist > r) continue;
    const double defect = atom.tangent.reject(d).squaredNorm();
    total += atom.weight * defect / std::pow(dist, m + 2);
  }
  return total;
}

double smallness(const QuadratureVarifold& v, const Vec& a, double r,
                 double q) {
  const MuLambda ml = mu_lambda(v.m(), q);
  return std::pow(r, ml.mu) *
         v.lq_seminorm(Region::closed_ball(a, r), FieldSelector::MeanCurvature,
                       q);
}

std::vector<double> log_radius_grid(double r_min, double r_max, int count) {
  if (!(0 < r_min && r_min < r_max)) throw Error("bad radius grid bounds");
  if (count < 2) throw Error("radius grid needs at least 2 points");
  std::vector<double> grid(count);
  const double step = std::log(r_max / r_min) / (count - 1);
  for (int i = 0; i < count; ++i) grid[i] = r_min * std::exp(step * i);
  grid.back() = r_max;
  return grid;
}

MonotonicityReport check_monotonicity(const QuadratureVarifold& v,
                                      const Vec& a, double r, double q,
                                      double delta,
                                      const std::vector<double>& grid,
                                      double pass_tolerance) {
  MonotonicityReport rep;
  rep.center = a;
  rep.radius = r;
  rep.delta = delta;
  rep.q = q;
  if (grid.empty()) {
    // Keep the smallest default radius well above the quadrature cell so
    // one-cell mass noise stays below the inequalities' exponential slack.
    double lo = std::max(r / 50.0, 64.0 * v.max_cell_size());
    lo = std::min(lo, r / 2.0);
    rep.grid = log_radius_grid(lo, r, 20);
  } else {
    rep.grid = grid;
  }
  std::sort(rep.grid.begin(), rep.grid.end());
  if (rep.grid.front() <= 0 || rep.grid.back() > r * (1 + 1e-12))
    throw Error("monotonicity grid must lie in (0, r]");

  const MuLambda ml = mu_lambda(v.m(), q);
  const double lam_delta = ml.lambda_const * delta;
  rep.items.push_back({"Lambda*delta <= 1", lam_delta, 1.0,
                       lam_delta <= 1.0 + 1e-12, "premise", ""});
  const double support_dist = v.distance_to_support(a);
  const double cell = 1.5 * v.max_cell_size();
  rep.items.push_back({"a in spt||V|| (within 1.5 cells)", support_dist, cell,
                       support_dist <= cell, "premise", ""});
  const double small = smallness(v, a, r, q);
  rep.items.push_back({"r^mu ||H||_q < delta", small, delta,
                       small <= delta + 1e-15, "premise",
                       "smallness = r^mu (int_B |H|^q d||V||)^{1/q}"});
  rep.premises_pass = premises_ok(rep.items);

  const int m = v.m();
  const size_t k = rep.grid.size();
  rep.ratios.resize(k);
  rep.tilt_to_r.resize(k);
  for (size_t i = 0; i < k; ++i) {
    const double s = rep.grid[i];
    rep.ratios[i] = v.mass(Region::closed_ball(a, s)) / std::pow(s, m);
    rep.tilt_to_r[i] = (s < r) ? tilt_integral(v, a, s, r) : 0.0;
  }

  for (size_t i = 0; i < k; ++i) {
    for (size_t j = i + 1; j < k; ++j) {
      const double s = rep.grid[i], t = rep.grid[j];
      if (!(s < t)) continue;
      const double g_st = rep.tilt_to_r[i] - rep.tilt_to_r[j];
      const double es = std::exp(lam_delta * std::pow(s / r, ml.mu));
      const double et = std::exp(lam_delta * std::pow(t / r, ml.mu));
      // e^{+}ratio(s) <= e^{+}ratio(t) - G(s,t)
      rep.residual_upper =
          std::max(rep.residual_upper,
                   es * rep.ratios[i] - (et * rep.ratios[j] - g_st));
      // e^{-}ratio(s) >= e^{-}ratio(t) - G(s,t)
      rep.residual_lower =
          std::max(rep.residual_lower,
                   (rep.ratios[j] / et - g_st) - rep.ratios[i] / es);
    }
  }
  rep.residual_upper = std::max(0.0, rep.residual_upper);
  rep.residual_lower = std::max(0.0, rep.residual_lower);
  rep.residual = std::max(rep.residual_upper, rep.residual_lower);
  rep.items.push_back({"both inequalities over all grid pairs", rep.residual,
                       pass_tolerance, rep.residual <= pass_tolerance,
                       "conclusion", ""});
  rep.pass = rep.premises_pass && conclusions_ok(rep.items);
  return rep;
}

nlohmann::json MonotonicityReport::to_json() const {
  nlohmann::json j;
  j["radius"] = radius;
  j["delta"] = delta;
  j["q"] = q;
  j["grid"] = grid;
  j["ratios"] = ratios;
  j["tilt_to_r"] = tilt_to_r;
  j["residual_upper"] = residual_upper;
  j["residual_lower"] = residual_lower;
  j["residual"] = residual;
  j["checks"] = items_to_json(items);
  j["premises_pass"] = premises_pass;
  j["pass"] = pass;
  return j;
}

std::string MonotonicityReport::to_csv() const {
  std::ostringstream out;
  out << "s,ratio,tilt_to_r\n";
  out.precision(17);
  for (size_t i = 0; i < grid.size(); ++i)
    out << grid[i] << "," << ratios[i] << "," << tilt_to_r[i] << "\n";
  return out.str();
}

LowerBoundMassReport check_lower_bound_mass(const QuadratureVarifold& v,
                                            const QuadratureVarifold& w,
                                            const Vec& a, double r, double q,
                                            double delta, double gamma) {
  if (!(gamma > 0 && gamma < 1)) throw Error("gamma must be in (0,1)");
  LowerBoundMassReport rep;
  const MuLambda ml = mu_lambda(v.m(), q);
  const double lam_delta = ml.lambda_const * delta;
  rep.items.push_back({"Lambda*delta < 1", lam_delta, 1.0, lam_delta < 1.0,
                       "premise", ""});
  const double small = smallness(v, a, r, q);
  rep.items.push_back({"r^mu ||H||_q <= delta", small, delta,
                       small <= delta + 1e-15, "premise", ""});
  const double w_mass = w.total_mass();
  const double v_mass = v.total_mass();
  rep.items.push_back({"W is a sub-varifold (mass)", w_mass, v_mass,
                       w_mass <= v_mass + 1e-12, "premise", ""});
  const double meets =
      w.empty() ? 0.0 : w.mass(Region::open_ball(a, gamma * r));
  rep.items.push_back({"spt||W|| meets B(a, gamma r)", meets, 0.0, meets > 0.0,
                       "premise", ""});
  rep.premises_pass = premises_ok(rep.items);

  rep.bound = std::exp(-lam_delta * std::pow(1.0 - gamma, ml.mu)) *
              std::pow(1.0 - gamma, v.m()) * unit_ball_volume(v.m());
  rep.actual = w.mass(Region::open_ball(a, r)) / std::pow(r, v.m());
  rep.margin = rep.actual - rep.bound;
  const double tol = default_tolerances().quadrature;
  rep.items.push_back({"r^-m ||W||(B(a,r)) >= bound", rep.actual,
                       rep.bound, rep.actual >= rep.bound - tol, "conclusion",
                       ""});
  rep.pass = rep.premises_pass && conclusions_ok(rep.items);
  return rep;
}

nlohmann::json LowerBoundMassReport::to_json() const {
  nlohmann::json j;
  j["bound"] = bound;
  j["actual"] = actual;
  j["margin"] = margin;
  j["checks"] = items_to_json(items);
  j["premises_pass"] = premises_pass;
  j["pass"] = pass;
  return j;
}

CenterSupportReport check_center_support(
    const QuadratureVarifold& v, const std::vector<QuadratureVarifold>& pi,
    const Vec& a, double r, double q, const ConstantsTable& table) {
  CenterSupportReport rep;
  const int m = v.m();
  const double omega = unit_ball_volume(m);

  const DensityRatio dr = density_ratio(v, a, r);
  rep.items.push_back({"r^-m ||V||(B) <= (Q+eps0) omega", dr.ratio,
                       (table.Q + table.eps0) * omega,
                       dr.ratio <= (table.Q + table.eps0) * omega + 1e-9,
                       "premise", ""});
  const double small = smallness(v, a, r, q);
  rep.items.push_back({"r^mu ||H||_q <= eps1", small, table.eps1,
                       small <= table.eps1 + 1e-15, "premise", ""});

  // Partition additivity: the pieces must add up to V inside B(a, r).
  double pi_mass = 0.0;
  for (const auto& w : pi) pi_mass += w.mass(Region::open_ball(a, r));
  const double v_mass = v.mass(Region::open_ball(a, r));
  rep.items.push_back({"partition mass additivity", pi_mass, v_mass,
                       std::abs(pi_mass - v_mass) <=
                           default_tolerances().quadrature * (1.0 + v_mass),
                       "premise", ""});
  rep.premises_pass = premises_ok(rep.items);

  rep.tilt_at_zero = tilt_integral(v, a, 0.0, r);
  const double tilt_bound = std::pow(2.0, -m - 2) * omega;
  rep.items.push_back({"G_V(0+, r) <= 2^-(m+2) omega", rep.tilt_at_zero,
                       tilt_bound, rep.tilt_at_zero <= tilt_bound + 1e-9,
                       "conclusion", "intermediate bound from the proof"});

  const double cell = 1.5 * v.max_cell_size();
  int idx = 0;
  for (const auto& w : pi) {
    CenterSupportComponent comp;
    comp.name = "component " + std::to_string(idx++);
    comp.meets_half_ball =
        !w.empty() && w.mass(Region::open_ball(a, r / 2.0)) > 0.0;
    if (comp.meets_half_ball) {
      ++rep.pi_prime_count;
      comp.support_distance = w.distance_to_support(a);
      comp.contains_center = comp.support_distance <= cell;
      rep.items.push_back({comp.name + " contains a (within 1.5 cells)",
                           comp.support_distance, cell, comp.contains_center,
                           "conclusion", ""});
      // liminf of the density ratio, probed at the smallest radius that
      // still holds a handful of atoms.
      const double probe = std::max(10.0 * w.max_cell_size(), r / 100.0);
      comp.small_scale_ratio =
          w.mass(Region::closed_ball(a, probe)) / std::pow(probe, m);
      const double bound = std::pow(2.0, -m - 1) * omega;
      rep.items.push_back(
          {comp.name + " small-scale ratio >= 2^-(m+1) omega",
           comp.small_scale_ratio, bound,
           comp.small_scale_ratio >= bound - default_tolerances().quadrature,
           "conclusion", ""});
    }
    rep.components.push_back(std::move(comp));
  }
  rep.items.push_back({"|Pi'| <= Q", static_cast<double>(rep.pi_prime_count),
                       static_cast<double>(table.Q),
                       rep.pi_prime_count <= table.Q, "conclusion", ""});
  rep.pass = rep.premises_pass && conclusions_ok(rep.items);
  return rep;
}

nlohmann::json CenterSupportReport::to_json() const {
  nlohmann::json j;
  j["checks"] = items_to_json(items);
  j["pi_prime_count"] = pi_prime_count;
  j["tilt_at_zero"] = tilt_at_zero;
  j["premises_pass"] = premises_pass;
  j["pass"] = pass;
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& c : components)
    comps.push_back({{"name", c.name},
                     {"meets_half_ball", c.meets_half_ball},
                     {"support_distance", c.support_distance},
                     {"small_scale_ratio", c.small_scale_ratio},
                     {"contains_center", c.contains_center}});
  j["components"] = std::move(comps);
  return j;
}

}  // namespace vlab
