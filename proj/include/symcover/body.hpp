#pragma once

#include "symcover/common.hpp"
#include "symcover/polygon.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

namespace symcover {

class Rng;
struct ConvexBodySpec;
using SpecPtr = std::shared_ptr<const ConvexBodySpec>;

/// {x : normal·x <= offset}
struct Halfspace {
  Vec normal;
  double offset = 0.0;
};

namespace kinds {
struct HPolytope {
  std::vector<Halfspace> halfspaces;
};
struct VPolytope {
  std::vector<Vec> vertices;
};
struct LpBall {
  double p = 2.0;
  int n = 0;
};
struct Cube {
  int n = 0;
};
/// conv{0, e_1, ..., e_n}, translated to barycenter 0 when centered.
struct Simplex {
  int n = 0;
  bool centered = true;
};
struct CrossPolytope {
  int n = 0;
};
/// {matrix·x + shift : x in inner}
struct AffineImage {
  SpecPtr inner;
  Mat matrix;
  Vec shift;
};
struct Intersection {
  SpecPtr a;
  SpecPtr b;
};
/// -inner
struct Reflection {
  SpecPtr inner;
};
struct Scaled {
  SpecPtr inner;
  double lambda = 1.0;
};
struct Translated {
  SpecPtr inner;
  Vec v;
};
}  // namespace kinds

/// Declarative body description; immutable tree shared through SpecPtr.
struct ConvexBodySpec {
  using Kind = std::variant<kinds::HPolytope, kinds::VPolytope, kinds::LpBall, kinds::Cube,
                            kinds::Simplex, kinds::CrossPolytope, kinds::AffineImage,
                            kinds::Intersection, kinds::Reflection, kinds::Scaled,
                            kinds::Translated>;
  Kind kind;

  /// Ambient dimension; throws DimMismatch when composed parts disagree.
  int dim() const;
};

namespace shapes {
SpecPtr h_polytope(std::vector<Halfspace> halfspaces);
SpecPtr v_polytope(std::vector<Vec> vertices);
SpecPtr lp_ball(double p, int n);
SpecPtr cube(int n);
SpecPtr simplex(int n, bool centered = true);
SpecPtr cross_polytope(int n);
SpecPtr affine_image(SpecPtr inner, Mat matrix, Vec shift);
SpecPtr intersection(SpecPtr a, SpecPtr b);
SpecPtr reflection(SpecPtr inner);
SpecPtr scaled(SpecPtr inner, double lambda);
SpecPtr translated(SpecPtr inner, Vec v);
/// The triangle with vertices (1,0), (0,1), (-1,-1); barycenter 0, area 3/2.
SpecPtr triangle();
}  // namespace shapes

enum class BodyStatus {
  full,        // nonempty interior
  degenerate,  // nonempty, no interior
  empty,
};

namespace detail {
struct Geometry;
}

/// A compiled body: membership, gauge and support oracles over a spec.
/// Immutable and safe to share between threads.
class Body {
 public:
  const ConvexBodySpec& spec() const { return *spec_; }
  const SpecPtr& spec_ptr() const { return spec_; }
  std::uint64_t id() const;
  int dim() const;
  BodyStatus status() const;
  bool is_empty() const { return status() == BodyStatus::empty; }

  /// Euclidean radius of a ball about the origin containing the body.
  double bounding_radius() const;
  const Vec& interior_point() const;
  /// Axis-aligned box containing the body (exact when support is exact).
  const Vec& box_lo() const;
  const Vec& box_hi() const;

  /// Closed membership with absolute tolerance 1e-12 on normalized constraints.
  bool membership(VecRef x) const;
  /// Positive iff x is strictly inside; roughly a distance to the boundary.
  double interior_margin(VecRef x) const;
  /// Minkowski functional about the origin. Throws OriginNotInterior.
  double gauge(VecRef x) const;
  /// max over the body of <x, u>.
  double support(VecRef u) const;
  /// A maximizer of <x, u> over the body.
  Vec support_point(VecRef u) const;
  /// Parameter interval {t : x + t d in body} for x inside.
  std::pair<double, double> chord(VecRef x, VecRef d) const;

  /// True when the oracles certify K = −K (constraint rows closed under
  /// negation and every ball part centered at 0).
  bool origin_symmetric() const;

  /// Whether a complete H-representation is available.
  bool polyhedral() const;
  /// Rows are unit outer normals. Only valid when polyhedral().
  const Mat& h_normals() const;
  const Vec& h_offsets() const;
  /// Points whose convex hull is the body, one per row, when known.
  const std::optional<Points>& vertices() const;
  /// Exact polygon for 2-D polyhedral bodies.
  const std::optional<Polygon2D>& polygon() const;

  std::optional<double> exact_volume() const;
  std::optional<Vec> exact_barycenter() const;
  /// Exact Chebyshev radius for polyhedra, a lower estimate otherwise.
  double inradius_estimate() const;

  /// True when an exact i.i.d. uniform sampler exists (affine images of cube,
  /// simplex, cross-polytope, lp-balls, and every 2-D polygon).
  bool has_direct_sampler() const;
  void sample_direct(Rng& rng, Eigen::Ref<Vec> out) const;

 private:
  friend Body make_body(const SpecPtr& spec);
  friend Body symmetric_intersection(const Body& body, VecRef x);
  friend Body make_body_allow_degenerate(const SpecPtr& spec);

  SpecPtr spec_;
  std::shared_ptr<const detail::Geometry> geom_;

  const detail::Geometry& geom() const;
};

/// Compiles a spec. Throws EmptyBody, Unbounded, DimMismatch, InvalidSpec.
Body make_body(const SpecPtr& spec);

/// Like make_body, but degenerate and empty results are returned as values.
Body make_body_allow_degenerate(const SpecPtr& spec);

/// K ∩ (x − K). The result may be degenerate or empty.
Body symmetric_intersection(const Body& body, VecRef x);

/// Decides x ∈ A + B: LP feasibility for polytopes, support-point distance
/// minimization otherwise. Throws UnsupportedBodyKind.
bool minkowski_membership(const Body& a, const Body& b, VecRef x);

/// Convenience: the body s·K.
Body scaled_body(const Body& body, double lambda);

}  // namespace symcover
