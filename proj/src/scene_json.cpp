#include "vlab/scene_json.hpp"

#include <fstream>

namespace vlab {

using nlohmann::json;

namespace {

Vec vec_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw Error(where + ": expected an array");
  Vec v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

json vec_to_json(const Vec& v) {
  json j = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

json mat_to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat mat_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw Error(where + ": expected an array of rows");
  Mat m(j.size(), j[0].size());
  for (size_t i = 0; i < j.size(); ++i) {
    if (j[i].size() != j[0].size()) throw Error(where + ": ragged rows");
    for (size_t k = 0; k < j[i].size(); ++k)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          j[i][k].get<double>();
  }
  return m;
}

}  // namespace

SceneSpec scene_from_json(const json& doc) {
  SceneSpec spec;
  if (!doc.contains("n") || !doc.contains("m") || !doc.contains("primitives"))
    throw Error("scene JSON needs n, m and primitives");
  spec.n = doc["n"].get<int>();
  spec.m = doc["m"].get<int>();
  size_t index = 0;
  for (const json& jp : doc["primitives"]) {
    const std::string where = "primitives[" + std::to_string(index++) + "]";
    Primitive p;
    if (!jp.contains("kind")) throw Error(where + ": missing kind");
    p.kind = jp["kind"].get<std::string>();
    if (jp.contains("multiplicity")) p.multiplicity = jp["multiplicity"].get<int>();
    if (jp.contains("resolution")) p.resolution = jp["resolution"].get<int>();
    if (jp.contains("center")) p.center = vec_from_json(jp["center"], where + ".center");
    else p.center = Vec::Zero(spec.n);
    if (jp.contains("basis")) {
      for (const json& bv : jp["basis"])
        p.basis.push_back(vec_from_json(bv, where + ".basis"));
    }
    if (jp.contains("extent")) p.extent = jp["extent"].get<double>();
    if (jp.contains("from")) p.from = vec_from_json(jp["from"], where + ".from");
    if (jp.contains("to")) p.to = vec_from_json(jp["to"], where + ".to");
    if (jp.contains("radius")) p.radius = jp["radius"].get<double>();
    if (jp.contains("angle_from")) p.angle_from = jp["angle_from"].get<double>();
    if (jp.contains("angle_to")) p.angle_to = jp["angle_to"].get<double>();
    if (jp.contains("function")) p.function = jp["function"].get<std::string>();
    if (jp.contains("coeff")) p.coeff = jp["coeff"].get<double>();
    if (jp.contains("exponent")) p.exponent = jp["exponent"].get<double>();
    if (jp.contains("interval")) {
      const json& iv = jp["interval"];
      if (!iv.is_array() || iv.size() != 2)
        throw Error(where + ".interval: expected [lo, hi]");
      p.interval_lo = iv[0].get<double>();
      p.interval_hi = iv[1].get<double>();
    }
    if (jp.contains("angles"))
      p.angles = jp["angles"].get<std::vector<double>>();
    if (jp.contains("zeros")) p.zeros = jp["zeros"].get<std::vector<double>>();
    if (jp.contains("amplitude")) p.amplitude = jp["amplitude"].get<double>();
    spec.primitives.push_back(std::move(p));
  }
  return spec;
}

json scene_to_json(const SceneSpec& spec) {
  json doc;
  doc["n"] = spec.n;
  doc["m"] = spec.m;
  json prims = json::array();
  for (const Primitive& p : spec.primitives) {
    json jp;
    jp["kind"] = p.kind;
    jp["multiplicity"] = p.multiplicity;
    jp["resolution"] = p.resolution;
    if (p.center.size() > 0) jp["center"] = vec_to_json(p.center);
    if (!p.basis.empty()) {
      json basis = json::array();
      for (const Vec& v : p.basis) basis.push_back(vec_to_json(v));
      jp["basis"] = std::move(basis);
    }
    if (p.kind == "plane-patch" || p.kind == "line-fan") jp["extent"] = p.extent;
    if (p.kind == "segment") {
      jp["from"] = vec_to_json(p.from);
      jp["to"] = vec_to_json(p.to);
    }
    if (p.kind == "circle-arc") {
      jp["radius"] = p.radius;
      jp["angle_from"] = p.angle_from;
      jp["angle_to"] = p.angle_to;
    }
    if (p.kind == "graph-curve") {
      jp["function"] = p.function;
      jp["coeff"] = p.coeff;
      jp["exponent"] = p.exponent;
      jp["interval"] = json::array({p.interval_lo, p.interval_hi});
    }
    if (p.kind == "line-fan") jp["angles"] = p.angles;
    if (p.kind == "sine-zeros") {
      jp["zeros"] = p.zeros;
      jp["amplitude"] = p.amplitude;
    }
    prims.push_back(std::move(jp));
  }
  doc["primitives"] = std::move(prims);
  return doc;
}

SceneSpec load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scene file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error("scene JSON parse error in " + path + ": " + e.what());
  }
  return scene_from_json(doc);
}

json varifold_to_json(const QuadratureVarifold& v) {
  json doc;
  doc["version"] = 1;
  doc["n"] = v.n();
  doc["m"] = v.m();
  doc["scene"] = v.scene().description;
  doc["notes"] = v.scene().notes;
  json atoms = json::array();
  for (const Atom& a : v.atoms()) {
    json ja;
    ja["id"] = a.id;
    ja["x"] = vec_to_json(a.position);
    ja["proj"] = mat_to_json(a.tangent.proj());
    ja["w"] = a.weight;
    ja["cell"] = a.cell_size;
    if (a.mean_curvature) ja["H"] = vec_to_json(*a.mean_curvature);
    if (a.tangent_derivative) ja["B"] = mat_to_json(*a.tangent_derivative);
    if (a.value) ja["f"] = vec_to_json(*a.value);
    if (a.value_derivative) ja["df"] = mat_to_json(*a.value_derivative);
    atoms.push_back(std::move(ja));
  }
  doc["atoms"] = std::move(atoms);
  return doc;
}

QuadratureVarifold varifold_from_json(const json& doc) {
  const int n = doc.at("n").get<int>();
  const int m = doc.at("m").get<int>();
  std::vector<Atom> atoms;
  for (const json& ja : doc.at("atoms")) {
    Atom a;
    a.id = ja.at("id").get<std::int64_t>();
    a.position = vec_from_json(ja.at("x"), "atom.x");
    a.tangent = Plane::from_projection(mat_from_json(ja.at("proj"), "atom.proj"));
    a.weight = ja.at("w").get<double>();
    a.cell_size = ja.value("cell", 0.0);
    if (ja.contains("H")) a.mean_curvature = vec_from_json(ja["H"], "atom.H");
    if (ja.contains("B")) a.tangent_derivative = mat_from_json(ja["B"], "atom.B");
    if (ja.contains("f")) a.value = vec_from_json(ja["f"], "atom.f");
    if (ja.contains("df")) a.value_derivative = mat_from_json(ja["df"], "atom.df");
    atoms.push_back(std::move(a));
  }
  SceneRecord rec;
  rec.description = doc.value("scene", std::string{});
  if (doc.contains("notes"))
    rec.notes = doc["notes"].get<std::vector<std::string>>();
  return QuadratureVarifold(n, m, std::move(atoms), std::move(rec));
}

}  // namespace vlab
