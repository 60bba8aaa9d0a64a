#pragma once

#include <json.hpp>

#include "vlab/constants.hpp"
#include "vlab/monotonicity.hpp"
#include "vlab/varifold.hpp"

namespace vlab {

// Single-linkage clusters of Y-points at threshold 2*tau (ties at exactly
// 2*tau merge). The tau-thickenings of distinct clusters are pairwise
// disjoint by construction. Returns index sets, deterministic order.
std::vector<std::vector<int>> cluster_values(const std::vector<Vec>& values,
                                             double tau);

struct SeparationResult {
  QuadratureVarifold w;
  QuadratureVarifold rest;
  // max over the test-field battery of |gap_V - gap_W - gap_rest|, the
  // discrete stand-in for boundary(V, E) = 0.
  double additivity_defect = 0.0;
  std::vector<CheckItem> items;
  bool certified = false;
};

// Value-based splitting: W = atoms whose tracked value lies within `delta`
// of K. Requires dist(K, D) > 2*delta and every atom value resolvable to
// K or D; anything in between is a straddler and trips
// "separation violated".
SeparationResult separate(const QuadratureVarifold& v,
                          const std::vector<Vec>& d_values,
                          const std::vector<Vec>& k_values, double delta);

struct ComponentRecord {
  int id = 0;
  int parent = -1;  // index into the previous level's components
  QuadratureVarifold piece;
  double mass = 0.0;
  bool meets_half_ball = false;
  double value_support_diameter = 0.0;
  Vec cluster_center;  // mass-weighted barycenter of the component's values
};

struct PartitionLevel {
  double radius = 0.0;  // r_k
  double tau = 0.0;     // tau_m used to construct this level (0 at k = 0)
  std::vector<ComponentRecord> components;
  std::vector<CheckItem> items;
};

struct PartitionAtScaleResult {
  std::vector<QuadratureVarifold> pieces;
  std::vector<Vec> cluster_centers;
  double tau = 0.0;
  std::vector<CheckItem> items;
  bool premises_pass = true;
  bool pass = false;
};

// One application of the partition lemma: cluster the tracked values of
// V restricted to B(a, lambda r) at tau_m and separate. tau_m follows the
// lemma: m = 1 uses Gamma * L1(df) over B(a, r); m > 1 uses
// Gamma^{m/mu} (1-lambda)^mu * Lq(df). The range condition
// lambda <= eps2/(1+eps2) is reported as a warning, not a premise: the
// construction is well defined for any lambda in (0,1).
PartitionAtScaleResult partition_at_scale(const QuadratureVarifold& v,
                                          const Vec& a, double r,
                                          double lambda, double q,
                                          const ConstantsTable& table, int Q);

struct PartitionLadder {
  Vec center;
  double base_radius = 0.0;
  double lambda = 0.0;
  int depth = 0;
  std::vector<PartitionLevel> levels;  // levels[0] = {V_r}
  std::vector<CheckItem> items;        // theorem-level premises
  int k0 = 0;                          // first index with |Pi'_k| constant
  std::vector<int> pi_prime_counts;
  bool premises_pass = true;
  bool pass = false;
  nlohmann::json to_json() const;
};

// The scale ladder r_k = lambda^k r: each level's Pi' components are
// restricted to the next ball and re-partitioned with the parent-scale
// tau_m. Premise failure at a level aborts with the level index.
PartitionLadder nested_partition(const QuadratureVarifold& v, const Vec& a,
                                 double r, double lambda, int depth, double q,
                                 const ConstantsTable& table, int Q);

struct HolderViolation {
  std::int64_t atom_id = -1;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct HolderReport {
  int k0 = 0;
  std::vector<Vec> upsilon;  // limit values y_i
  std::vector<CheckItem> items;
  int bound_violations = 0;
  HolderViolation worst;
  double sigma = 0.0;
  bool premises_pass = true;
  bool pass = false;
  nlohmann::json to_json() const;
};

// The corollary as a certificate: detects k0, extracts the limit values
// along the stabilized Pi' chains (verifying value-support nesting), and
// checks dist(f(x), Upsilon) <= C1 sigma (|x-a| / (lambda r))^mu on every
// atom of the lambda*r ball.
HolderReport holder_certificate(const PartitionLadder& ladder,
                                const QuadratureVarifold& v, double sigma,
                                double q, const ConstantsTable& table);

}  // namespace vlab
