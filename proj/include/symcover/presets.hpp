#pragma once

#include "symcover/body.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace symcover {

struct Preset {
  std::string name;
  SpecPtr spec;
  bool symmetric = false;  // centrally symmetric about the origin
  bool centered = false;   // barycenter exactly at the origin
};

/// The shipped corpus: triangle, cube3, simplex3, cross4, lp1.5, lp3, lp4,
/// simplex6 and the seed-pinned random H-polytopes hpoly2, hpoly4, hpoly6,
/// hpoly8.
const std::vector<Preset>& preset_corpus();

/// 3n+2 random unit normals with offsets in [0.5, 1.5]; redrawn (with a
/// derived seed) until the polytope is bounded.
SpecPtr random_h_polytope(int n, std::uint64_t seed);

/// Looks up a corpus name or a family form: cube:N, simplex:N, cross:N,
/// ball:N, lp:P:N, hpoly:N, triangle. Throws BodyParse on unknown names.
Preset find_preset(const std::string& name);

/// A preset name, or otherwise a path to a JSON body file.
SpecPtr resolve_body(const std::string& name_or_path);

}  // namespace symcover
