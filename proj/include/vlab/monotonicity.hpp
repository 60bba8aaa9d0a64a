#pragma once

#include <json.hpp>

#include "vlab/constants.hpp"
#include "vlab/varifold.hpp"

namespace vlab {

// One verified premise or conclusion. `kind` is "premise", "conclusion" or
// "warning"; warnings never flip a report's pass flag.
struct CheckItem {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool pass = true;
  std::string kind = "premise";
  std::string note;
};

nlohmann::json items_to_json(const std::vector<CheckItem>& items);
bool premises_ok(const std::vector<CheckItem>& items);
bool conclusions_ok(const std::vector<CheckItem>& items);

struct DensityRatio {
  double ratio;       // r^{-m} mass(closed ball)
  double normalized;  // ratio / omega_m
};
DensityRatio density_ratio(const QuadratureVarifold& v, const Vec& a,
                           double r);

enum class CenterAtomPolicy { Exclude, Error };

// G_V(s, r): sum over atoms with s < |x-a| <= r of
// w |x-a|^{-m-2} |S_perp(x-a)|^2. With s = 0, an atom exactly at the center
// is excluded by default (its defect vanishes identically on C^1 scenes; the
// bias is bounded by one cell's weight) or rejected under the strict policy.
double tilt_integral(const QuadratureVarifold& v, const Vec& a, double s,
                     double r,
                     CenterAtomPolicy policy = CenterAtomPolicy::Exclude);

// r^mu (integral of |H|^q over the closed r-ball)^{1/q}: the smallness
// functional gating the monotonicity lemmas. The normalization (one r^mu
// power, seminorm over the full ball) is this library's reading and is
// recorded in every report.
double smallness(const QuadratureVarifold& v, const Vec& a, double r,
                 double q);

std::vector<double> log_radius_grid(double r_min, double r_max, int count);

struct MonotonicityReport {
  Vec center;
  double radius = 0.0;
  double delta = 0.0;
  double q = 0.0;
  std::vector<double> grid;
  std::vector<double> ratios;       // s^{-m} mass(closed ball s)
  std::vector<double> tilt_to_r;    // G(s_j, r)
  double residual_upper = 0.0;      // max violation, first inequality
  double residual_lower = 0.0;      // max violation, second inequality
  double residual = 0.0;
  std::vector<CheckItem> items;
  bool premises_pass = true;
  bool pass = false;
  nlohmann::json to_json() const;
  std::string to_csv() const;  // s, ratio, tilt rows
};

// Verifies both displayed inequalities over all grid pairs s < t. A custom
// grid may be supplied (e.g. cell-aligned radii on flat scenes); otherwise a
// 20-point logarithmic grid over [r/50, r] is used.
MonotonicityReport check_monotonicity(const QuadratureVarifold& v,
                                      const Vec& a, double r, double q,
                                      double delta,
                                      const std::vector<double>& grid = {},
                                      double pass_tolerance = 1e-6);

struct LowerBoundMassReport {
  double bound = 0.0;
  double actual = 0.0;
  double margin = 0.0;
  std::vector<CheckItem> items;
  bool premises_pass = true;
  bool pass = false;
  nlohmann::json to_json() const;
};

// r^{-m} mass(W, B(a,r)) >= e^{-Lambda delta (1-gamma)^mu} (1-gamma)^m omega
// whenever W meets B(a, gamma r).
LowerBoundMassReport check_lower_bound_mass(const QuadratureVarifold& v,
                                            const QuadratureVarifold& w,
                                            const Vec& a, double r, double q,
                                            double delta, double gamma);

struct CenterSupportComponent {
  std::string name;
  bool meets_half_ball = false;
  double support_distance = 0.0;  // nearest atom distance to a
  double small_scale_ratio = 0.0;
  bool contains_center = false;
};

struct CenterSupportReport {
  std::vector<CheckItem> items;
  std::vector<CenterSupportComponent> components;
  int pi_prime_count = 0;
  double tilt_at_zero = 0.0;
  bool premises_pass = true;
  bool pass = false;
  nlohmann::json to_json() const;
};

// The support lemma as a checker: every component meeting the half ball must
// reach the center, the proof's tilt bound G_V(0+, r) <= 2^{-m-2} omega_m
// must hold, and |Pi'| <= Q.
CenterSupportReport check_center_support(
    const QuadratureVarifold& v, const std::vector<QuadratureVarifold>& pi,
    const Vec& a, double r, double q, const ConstantsTable& table);

}  // namespace vlab
