#include "symcover/presets.hpp"

#include "symcover/body_json.hpp"
#include "symcover/rng.hpp"

#include <filesystem>
#include <sstream>

namespace symcover {

namespace {

constexpr std::uint64_t kCorpusSeed = 20240601;

int parse_dim(const std::string& text, const std::string& name) {
  std::size_t used = 0;
  int n = 0;
  try {
    n = std::stoi(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || n < 1) throw Error(ErrorKind::BodyParse, "bad dimension in preset '" + name + "'");
  return n;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string part;
  while (std::getline(in, part, ':')) out.push_back(part);
  return out;
}

}  // namespace

SpecPtr random_h_polytope(int n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorKind::DomainError, "dimension must be positive");
  for (std::uint64_t attempt = 0;; ++attempt) {
    Rng rng(derive_seed(seed, attempt));
    std::vector<Halfspace> hs;
    for (int i = 0; i < 3 * n + 2; ++i) hs.push_back({rng.unit_vector(n), rng.uniform(0.5, 1.5)});
    SpecPtr spec = shapes::h_polytope(std::move(hs));
    try {
      make_body(spec);
      return spec;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Unbounded) throw;
    }
  }
}

const std::vector<Preset>& preset_corpus() {
  static const std::vector<Preset> corpus = [] {
    std::vector<Preset> c;
    c.push_back({"triangle", shapes::triangle(), false, true});
    c.push_back({"cube3", shapes::cube(3), true, true});
    c.push_back({"simplex3", shapes::simplex(3, true), false, true});
    c.push_back({"cross4", shapes::cross_polytope(4), true, true});
    c.push_back({"lp1.5", shapes::lp_ball(1.5, 3), true, true});
    c.push_back({"lp3", shapes::lp_ball(3.0, 4), true, true});
    c.push_back({"lp4", shapes::lp_ball(4.0, 2), true, true});
    c.push_back({"simplex6", shapes::simplex(6, true), false, true});
    for (int n : {2, 4, 6, 8}) {
      c.push_back({"hpoly" + std::to_string(n), random_h_polytope(n, derive_seed(kCorpusSeed, n)), false, false});
    }
    return c;
  }();
  return corpus;
}

Preset find_preset(const std::string& name) {
  for (const auto& p : preset_corpus()) {
    if (p.name == name) return p;
  }
  const auto parts = split(name);
  if (parts.size() == 2) {
    const int n = parse_dim(parts[1], name);
    if (parts[0] == "cube") return {name, shapes::cube(n), true, true};
    if (parts[0] == "simplex") return {name, shapes::simplex(n, true), n == 1, true};
    if (parts[0] == "cross") return {name, shapes::cross_polytope(n), true, true};
    if (parts[0] == "ball") return {name, shapes::lp_ball(2.0, n), true, true};
    if (parts[0] == "hpoly") return {name, random_h_polytope(n, derive_seed(kCorpusSeed, n)), false, false};
  }
  if (parts.size() == 3 && parts[0] == "lp") {
    double p = 0.0;
    try {
      p = std::stod(parts[1]);
    } catch (const std::exception&) {
      throw Error(ErrorKind::BodyParse, "bad exponent in preset '" + name + "'");
    }
    return {name, shapes::lp_ball(p, parse_dim(parts[2], name)), true, true};
  }
  throw Error(ErrorKind::BodyParse, "unknown preset '" + name + "'");
}

SpecPtr resolve_body(const std::string& name_or_path) {
  if (std::filesystem::exists(name_or_path)) return load_spec(name_or_path);
  return find_preset(name_or_path).spec;
}

}  // namespace symcover
