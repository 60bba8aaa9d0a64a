#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vlab/geometry.hpp"

namespace vlab {

// One quadrature atom: a point-plane pair with mass, plus whatever sampled
// fields the generating primitive has closed forms for.
//
//   mean_curvature      H(V,x), an n-vector
//   tangent_derivative  B_V(x), the weak derivative of the tangent map as a
//                       linear map R^n -> Y with Y = R^{n x n} flattened
//                       column-major; stored as an (n*n) x n matrix whose
//                       column j is B(e_j) flattened
//   value               f(x), a tracked Y-valued sample
//   value_derivative    weak derivative of f, dim(Y) x n
struct Atom {
  Vec position;
  Plane tangent;
  double weight = 0.0;
  std::optional<Vec> mean_curvature;
  std::optional<Mat> tangent_derivative;
  std::optional<Vec> value;
  std::optional<Mat> value_derivative;
  double cell_size = 0.0;  // ambient diameter of the generating cell
  std::int64_t id = -1;    // stable across restrictions
};

enum class FieldSelector { MeanCurvature, SecondForm, ValueDerivative };

std::string field_name(FieldSelector f);

// Contract a second-fundamental-form sample against the plane S:
// H_j = sum_{i,k} S_{ik} [B(e_i)]_{jk}. Equals the contraction over any
// orthonormal basis of S.
Vec trace_contract(const Mat& second_form, const Plane& s);

// A smooth test field with closed-form derivative, (Dg)_{ij} = d_j g_i.
struct TestField {
  std::string name;
  std::function<Vec(const Vec&)> g;
  std::function<Mat(const Vec&)> Dg;
};

// Deterministic battery used by separation certificates: the n constant
// fields, the identity field, and a Gaussian-clipped radial field.
std::vector<TestField> standard_test_fields(int n);

struct FirstVariationResult {
  double lhs = 0.0;  // sum w * (S : Dg)
  double rhs = 0.0;  // -sum w * <H, g>
  double gap = 0.0;
};

struct SceneRecord {
  std::string description;       // provenance of the generating primitives
  std::vector<std::string> notes;  // restriction predicates etc.
};

class QuadratureVarifold {
 public:
  // The zero varifold in R^1; checkers reject it, containers need it.
  QuadratureVarifold() : n_(1), m_(1) {}
  QuadratureVarifold(int n, int m, std::vector<Atom> atoms, SceneRecord scene);

  int n() const { return n_; }
  int m() const { return m_; }
  bool empty() const { return atoms_.empty(); }
  std::size_t size() const { return atoms_.size(); }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const SceneRecord& scene() const { return scene_; }

  double total_mass() const;
  double mass(const Region& region) const;
  double mass_where(const std::function<bool(const Atom&)>& pred) const;

  // (sum_{x in region} w |field|^q)^(1/q). Throws naming the first atom
  // missing the selected field.
  double lq_seminorm(const Region& region, FieldSelector field,
                     double q) const;

  FirstVariationResult first_variation_check(const TestField& field) const;

  // Atom filter; provenance is annotated with `note`. An empty result is the
  // zero varifold and is allowed here (checkers reject it themselves).
  QuadratureVarifold restrict(const std::function<bool(const Atom&)>& pred,
                              const std::string& note) const;
  QuadratureVarifold restrict(const Region& region,
                              const std::string& note) const;

  // Max pairwise distance of tangent values (selector S) or tracked values
  // (selector fval) over all atoms. Exact duplicates are collapsed first.
  enum class ValueSelector { Tangent, TrackedValue };
  double support_diameter(ValueSelector selector) const;

  // Largest cell diameter among atoms; 0 for an empty varifold.
  double max_cell_size() const;
  // Distance from `a` to the nearest atom; +inf for an empty varifold.
  double distance_to_support(const Vec& a) const;

  bool has_field(FieldSelector field) const;
  bool has_values() const;

 private:
  int n_;
  int m_;
  std::vector<Atom> atoms_;
  SceneRecord scene_;
};

}  // namespace vlab
