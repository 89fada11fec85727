#include "symcover/body_json.hpp"

#include <fstream>
#include <sstream>

namespace symcover {
namespace {

using nlohmann::json;

json vec_json(const Vec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Vec json_vec(const json& j, const char* what) {
  if (!j.is_array()) throw Error(ErrorKind::BodyParse, std::string(what) + " must be an array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw Error(ErrorKind::BodyParse, std::string(what) + " must be numeric");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

const json& field(const json& j, const char* name) {
  if (!j.contains(name)) throw Error(ErrorKind::BodyParse, std::string("missing field '") + name + "'");
  return j.at(name);
}

int int_field(const json& j, const char* name) {
  const json& f = field(j, name);
  if (!f.is_number_integer()) throw Error(ErrorKind::BodyParse, std::string(name) + " must be an integer");
  return f.get<int>();
}

double num_field(const json& j, const char* name) {
  const json& f = field(j, name);
  if (!f.is_number()) throw Error(ErrorKind::BodyParse, std::string(name) + " must be a number");
  return f.get<double>();
}

}  // namespace

json spec_to_json(const ConvexBodySpec& spec) {
  return std::visit(
      [](const auto& k) -> json {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, kinds::HPolytope>) {
          json hs = json::array();
          for (const auto& h : k.halfspaces) hs.push_back({{"normal", vec_json(h.normal)}, {"offset", h.offset}});
          return {{"kind", "h_polytope"}, {"halfspaces", hs}};
        } else if constexpr (std::is_same_v<T, kinds::VPolytope>) {
          json vs = json::array();
          for (const auto& v : k.vertices) vs.push_back(vec_json(v));
          return {{"kind", "v_polytope"}, {"vertices", vs}};
        } else if constexpr (std::is_same_v<T, kinds::LpBall>) {
          return {{"kind", "lp_ball"}, {"p", k.p}, {"n", k.n}};
        } else if constexpr (std::is_same_v<T, kinds::Cube>) {
          return {{"kind", "cube"}, {"n", k.n}};
        } else if constexpr (std::is_same_v<T, kinds::Simplex>) {
          return {{"kind", "simplex"}, {"n", k.n}, {"centered", k.centered}};
        } else if constexpr (std::is_same_v<T, kinds::CrossPolytope>) {
          return {{"kind", "cross_polytope"}, {"n", k.n}};
        } else if constexpr (std::is_same_v<T, kinds::AffineImage>) {
          json rows = json::array();
          for (Eigen::Index r = 0; r < k.matrix.rows(); ++r) rows.push_back(vec_json(k.matrix.row(r).transpose()));
          return {{"kind", "affine_image"}, {"inner", spec_to_json(*k.inner)}, {"matrix", rows},
                  {"shift", vec_json(k.shift)}};
        } else if constexpr (std::is_same_v<T, kinds::Intersection>) {
          return {{"kind", "intersection"}, {"a", spec_to_json(*k.a)}, {"b", spec_to_json(*k.b)}};
        } else if constexpr (std::is_same_v<T, kinds::Reflection>) {
          return {{"kind", "reflection"}, {"inner", spec_to_json(*k.inner)}};
        } else if constexpr (std::is_same_v<T, kinds::Scaled>) {
          return {{"kind", "scaled"}, {"inner", spec_to_json(*k.inner)}, {"lambda", k.lambda}};
        } else {
          return {{"kind", "translated"}, {"inner", spec_to_json(*k.inner)}, {"v", vec_json(k.v)}};
        }
      },
      spec.kind);
}

SpecPtr spec_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::BodyParse, "body spec must be a JSON object");
  const json& kind_field = field(j, "kind");
  if (!kind_field.is_string()) throw Error(ErrorKind::BodyParse, "kind must be a string");
  const std::string kind = kind_field.get<std::string>();

  if (kind == "h_polytope") {
    std::vector<Halfspace> hs;
    for (const auto& h : field(j, "halfspaces")) hs.push_back({json_vec(field(h, "normal"), "normal"), num_field(h, "offset")});
    return shapes::h_polytope(std::move(hs));
  }
  if (kind == "v_polytope") {
    std::vector<Vec> vs;
    for (const auto& v : field(j, "vertices")) vs.push_back(json_vec(v, "vertex"));
    return shapes::v_polytope(std::move(vs));
  }
  if (kind == "lp_ball") return shapes::lp_ball(num_field(j, "p"), int_field(j, "n"));
  if (kind == "cube") return shapes::cube(int_field(j, "n"));
  if (kind == "simplex") {
    bool centered = true;
    if (j.contains("centered")) centered = j.at("centered").get<bool>();
    return shapes::simplex(int_field(j, "n"), centered);
  }
  if (kind == "cross_polytope") return shapes::cross_polytope(int_field(j, "n"));
  if (kind == "affine_image") {
    const json& rows = field(j, "matrix");
    if (!rows.is_array() || rows.empty()) throw Error(ErrorKind::BodyParse, "matrix must be a nonempty array of rows");
    Mat m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const Vec row = json_vec(rows[r], "matrix row");
      if (row.size() != m.cols()) throw Error(ErrorKind::BodyParse, "ragged matrix");
      m.row(static_cast<Eigen::Index>(r)) = row.transpose();
    }
    return shapes::affine_image(spec_from_json(field(j, "inner")), std::move(m), json_vec(field(j, "shift"), "shift"));
  }
  if (kind == "intersection") return shapes::intersection(spec_from_json(field(j, "a")), spec_from_json(field(j, "b")));
  if (kind == "reflection") return shapes::reflection(spec_from_json(field(j, "inner")));
  if (kind == "scaled") return shapes::scaled(spec_from_json(field(j, "inner")), num_field(j, "lambda"));
  if (kind == "translated") return shapes::translated(spec_from_json(field(j, "inner")), json_vec(field(j, "v"), "v"));
  throw Error(ErrorKind::BodyParse, "unknown body kind '" + kind + "'");
}

SpecPtr load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::BodyParse, "cannot open body file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::BodyParse, path + ": " + e.what());
  }
  return spec_from_json(j);
}

void save_spec(const ConvexBodySpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::BodyParse, "cannot write body file " + path);
  out << spec_to_json(spec).dump(2) << '\n';
}

std::uint64_t spec_hash(const ConvexBodySpec& spec) {
  const std::string text = spec_to_json(spec).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace symcover
