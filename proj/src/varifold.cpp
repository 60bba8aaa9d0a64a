#include "vlab/varifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace vlab {

std::string field_name(FieldSelector f) {
  switch (f) {
    case FieldSelector::MeanCurvature: return "H";
    case FieldSelector::SecondForm: return "B";
    case FieldSelector::ValueDerivative: return "df";
  }
  return "?";
}

Vec trace_contract(const Mat& second_form, const Plane& s) {
  const int n = s.n();
  Vec h = Vec::Zero(n);
  for (int i = 0; i < n; ++i) {
    Eigen::Map<const Mat> bi(second_form.col(i).data(), n, n);
    for (int k = 0; k < n; ++k) h += s.proj()(i, k) * bi.col(k);
  }
  return h;
}

std::vector<TestField> standard_test_fields(int n) {
  std::vector<TestField> fields;
  for (int k = 0; k < n; ++k) {
    Vec ek = Vec::Unit(n, k);
    fields.push_back({"constant_e" + std::to_string(k),
                      [ek](const Vec&) { return ek; },
                      [n](const Vec&) { return Mat::Zero(n, n); }});
  }
  fields.push_back({"identity", [](const Vec& x) { return x; },
                    [n](const Vec&) { return Mat::Identity(n, n); }});
  // g(x) = exp(-|x|^2) x, Dg = exp(-|x|^2)(I - 2 x x^T)
  fields.push_back({"gaussian_radial",
                    [](const Vec& x) { return std::exp(-x.squaredNorm()) * x; },
                    [n](const Vec& x) {
                      const double e = std::exp(-x.squaredNorm());
                      return Mat(e * (Mat::Identity(n, n) -
                                      2.0 * x * x.transpose()));
                    }});
  return fields;
}

QuadratureVarifold::QuadratureVarifold(int n, int m, std::vector<Atom> atoms,
                                       SceneRecord scene)
    : n_(n), m_(m), atoms_(std::move(atoms)), scene_(std::move(scene)) {
  if (n < 1 || m < 1 || m > n) throw Error("invalid varifold dimensions");
  for (const Atom& a : atoms_) {
    if (a.weight <= 0) throw Error("atom weight must be positive");
    if (a.position.size() != n || a.tangent.n() != n || a.tangent.m() != m)
      throw Error("atom dimensions inconsistent with varifold");
  }
}

double QuadratureVarifold::total_mass() const {
  double total = 0.0;
  for (const Atom& a : atoms_) total += a.weight;
  return total;
}

double QuadratureVarifold::mass(const Region& region) const {
  double total = 0.0;
  for (const Atom& a : atoms_)
    if (region.contains(a.position)) total += a.weight;
  return total;
}

double QuadratureVarifold::mass_where(
    const std::function<bool(const Atom&)>& pred) const {
  double total = 0.0;
  for (const Atom& a : atoms_)
    if (pred(a)) total += a.weight;
  return total;
}

double QuadratureVarifold::lq_seminorm(const Region& region,
                                       FieldSelector field, double q) const {
  if (q < 1) throw Error("lq_seminorm requires q >= 1");
  double total = 0.0;
  for (const Atom& a : atoms_) {
    if (!region.contains(a.position)) continue;
    double norm = 0.0;
    switch (field) {
      case FieldSelector::MeanCurvature:
        if (!a.mean_curvature)
          throw Error("atom " + std::to_string(a.id) + " is missing field H");
        norm = a.mean_curvature->norm();
        break;
      case FieldSelector::SecondForm:
        if (!a.tangent_derivative)
          throw Error("atom " + std::to_string(a.id) + " is missing field B");
        norm = a.tangent_derivative->norm();
        break;
      case FieldSelector::ValueDerivative:
        if (!a.value_derivative)
          throw Error("atom " + std::to_string(a.id) + " is missing field df");
        norm = a.value_derivative->norm();
        break;
    }
    total += a.weight * std::pow(norm, q);
  }
  return std::pow(total, 1.0 / q);
}

FirstVariationResult QuadratureVarifold::first_variation_check(
    const TestField& field) const {
  FirstVariationResult res;
  for (const Atom& a : atoms_) {
    if (!a.mean_curvature) throw Error("first variation check needs H");
    const Mat dg = field.Dg(a.position);
    res.lhs += a.weight * (a.tangent.proj().array() * dg.array()).sum();
    res.rhs -= a.weight * a.mean_curvature->dot(field.g(a.position));
  }
  res.gap = std::abs(res.lhs - res.rhs);
  return res;
}

QuadratureVarifold QuadratureVarifold::restrict(
    const std::function<bool(const Atom&)>& pred,
    const std::string& note) const {
  std::vector<Atom> kept;
  for (const Atom& a : atoms_)
    if (pred(a)) kept.push_back(a);
  SceneRecord rec = scene_;
  rec.notes.push_back("restrict: " + note);
  return QuadratureVarifold(n_, m_, std::move(kept), std::move(rec));
}

QuadratureVarifold QuadratureVarifold::restrict(
    const Region& region, const std::string& note) const {
  return restrict(
      [&region](const Atom& a) { return region.contains(a.position); }, note);
}

namespace {

// Collapse bitwise-identical value vectors so diameters over scenes with
// shared exact tangents stay cheap.
std::vector<Vec> dedupe_exact(std::vector<Vec> values) {
  std::unordered_map<std::string, Vec> seen;
  for (auto& v : values) {
    std::string key(reinterpret_cast<const char*>(v.data()),
                    static_cast<size_t>(v.size()) * sizeof(double));
    seen.emplace(std::move(key), std::move(v));
  }
  std::vector<Vec> unique;
  unique.reserve(seen.size());
  for (auto& [k, v] : seen) unique.push_back(std::move(v));
  return unique;
}

}  // namespace

double QuadratureVarifold::support_diameter(ValueSelector selector) const {
  std::vector<Vec> values;
  values.reserve(atoms_.size());
  for (const Atom& a : atoms_) {
    if (selector == ValueSelector::Tangent) {
      values.push_back(a.tangent.flatten());
    } else {
      if (!a.value) throw Error("atom " + std::to_string(a.id) +
                                " is missing a tracked value");
      values.push_back(*a.value);
    }
  }
  values = dedupe_exact(std::move(values));
  double diam = 0.0;
  for (size_t i = 0; i < values.size(); ++i)
    for (size_t j = i + 1; j < values.size(); ++j)
      diam = std::max(diam, (values[i] - values[j]).norm());
  return diam;
}

double QuadratureVarifold::max_cell_size() const {
  double mx = 0.0;
  for (const Atom& a : atoms_) mx = std::max(mx, a.cell_size);
  return mx;
}

double QuadratureVarifold::distance_to_support(const Vec& a) const {
  double best = std::numeric_limits<double>::infinity();
  for (const Atom& atom : atoms_)
    best = std::min(best, (atom.position - a).norm());
  return best;
}

bool QuadratureVarifold::has_field(FieldSelector field) const {
  for (const Atom& a : atoms_) {
    switch (field) {
      case FieldSelector::MeanCurvature:
        if (!a.mean_curvature) return false;
        break;
      case FieldSelector::SecondForm:
        if (!a.tangent_derivative) return false;
        break;
      case FieldSelector::ValueDerivative:
        if (!a.value_derivative) return false;
        break;
    }
  }
  return true;
}

bool QuadratureVarifold::has_values() const {
  for (const Atom& a : atoms_)
    if (!a.value) return false;
  return true;
}

}  // namespace vlab
