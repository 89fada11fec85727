#pragma once

#include "symcover/common.hpp"

#include <vector>

namespace symcover {

using Point2 = Eigen::Vector2d;

/// Half-plane {x : normal·x <= offset}.
struct HalfPlane {
  Point2 normal;
  double offset = 0.0;
};

/// Convex polygon, counterclockwise, no repeated vertices. An empty vertex
/// list is the empty polygon.
struct Polygon2D {
  std::vector<Point2> vertices;

  bool empty() const { return vertices.size() < 3; }
  double area() const;
  Point2 centroid() const;
  bool contains(const Point2& p, double tol = 1e-12) const;
  std::vector<HalfPlane> halfplanes() const;

  Polygon2D reflected() const;
  Polygon2D translated(const Point2& v) const;
  Polygon2D scaled(double factor) const;
};

/// Convex hull (Andrew's monotone chain), counterclockwise, collinear points dropped.
Polygon2D convex_hull(std::vector<Point2> points);

/// Sutherland–Hodgman clip of a convex polygon by one half-plane.
Polygon2D clip(const Polygon2D& poly, const HalfPlane& h);

/// Exact area of a convex polygon clipped by every half-plane in turn.
double clip_area_2d(const Polygon2D& poly, const std::vector<HalfPlane>& halfplanes);

Polygon2D polygon_intersect_2d(const Polygon2D& p, const Polygon2D& q);

/// Minkowski sum as the hull of all pairwise vertex sums.
Polygon2D minkowski_sum_2d(const Polygon2D& p, const Polygon2D& q);

}  // namespace symcover
