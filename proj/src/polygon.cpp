#include "symcover/polygon.hpp"

#include <algorithm>
#include <cmath>

namespace symcover {
namespace {

double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

// Removes consecutive near-duplicates left behind by clipping.
Polygon2D tidy(std::vector<Point2> pts) {
  std::vector<Point2> out;
  for (const auto& p : pts) {
    if (out.empty() || (p - out.back()).norm() > 1e-14) out.push_back(p);
  }
  while (out.size() > 1 && (out.front() - out.back()).norm() <= 1e-14) out.pop_back();
  if (out.size() < 3) return {};
  Polygon2D poly{std::move(out)};
  if (poly.area() <= 0.0) return {};
  return poly;
}

}  // namespace

double Polygon2D::area() const {
  if (vertices.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0, n = vertices.size(); i < n; ++i) {
    const Point2& a = vertices[i];
    const Point2& b = vertices[(i + 1) % n];
    twice += a.x() * b.y() - a.y() * b.x();
  }
  return 0.5 * twice;
}

Point2 Polygon2D::centroid() const {
  double twice = 0.0;
  Point2 acc = Point2::Zero();
  for (std::size_t i = 0, n = vertices.size(); i < n; ++i) {
    const Point2& a = vertices[i];
    const Point2& b = vertices[(i + 1) % n];
    const double w = a.x() * b.y() - a.y() * b.x();
    twice += w;
    acc += w * (a + b);
  }
  if (twice == 0.0) throw Error(ErrorKind::EmptyBody, "centroid of a degenerate polygon");
  return acc / (3.0 * twice);
}

bool Polygon2D::contains(const Point2& p, double tol) const {
  if (empty()) return false;
  for (const auto& h : halfplanes()) {
    if (h.normal.dot(p) > h.offset + tol * (1.0 + std::abs(h.offset))) return false;
  }
  return true;
}

std::vector<HalfPlane> Polygon2D::halfplanes() const {
  std::vector<HalfPlane> out;
  for (std::size_t i = 0, n = vertices.size(); i < n; ++i) {
    const Point2& a = vertices[i];
    const Point2& b = vertices[(i + 1) % n];
    const Point2 edge = b - a;
    // Interior lies to the left of each counterclockwise edge.
    Point2 normal(edge.y(), -edge.x());
    const double len = normal.norm();
    normal /= len;
    out.push_back({normal, normal.dot(a)});
  }
  return out;
}

Polygon2D Polygon2D::reflected() const {
  Polygon2D out;
  for (const auto& v : vertices) out.vertices.push_back(-v);
  return out;  // point reflection preserves orientation
}

Polygon2D Polygon2D::translated(const Point2& v) const {
  Polygon2D out;
  for (const auto& p : vertices) out.vertices.push_back(p + v);
  return out;
}

Polygon2D Polygon2D::scaled(double factor) const {
  Polygon2D out;
  for (const auto& p : vertices) out.vertices.push_back(factor * p);
  return out;
}

Polygon2D convex_hull(std::vector<Point2> points) {
  std::sort(points.begin(), points.end(), [](const Point2& a, const Point2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  points.erase(std::unique(points.begin(), points.end()), points.end());
  if (points.size() < 3) return {};
  std::vector<Point2> hull(2 * points.size());
  std::size_t k = 0;
  for (const auto& p : points) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = points.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], points[i]) <= 0.0) --k;
    hull[k++] = points[i];
  }
  hull.resize(k - 1);
  return tidy(std::move(hull));
}

Polygon2D clip(const Polygon2D& poly, const HalfPlane& h) {
  if (poly.empty()) return {};
  std::vector<Point2> out;
  const std::size_t n = poly.vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = poly.vertices[i];
    const Point2& b = poly.vertices[(i + 1) % n];
    const double da = h.normal.dot(a) - h.offset;
    const double db = h.normal.dot(b) - h.offset;
    if (da <= 0.0) out.push_back(a);
    if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0)) {
      const double t = da / (da - db);
      out.push_back(a + t * (b - a));
    }
  }
  return tidy(std::move(out));
}

double clip_area_2d(const Polygon2D& poly, const std::vector<HalfPlane>& halfplanes) {
  Polygon2D current = poly;
  for (const auto& h : halfplanes) {
    current = clip(current, h);
    if (current.empty()) return 0.0;
  }
  return current.area();
}

Polygon2D polygon_intersect_2d(const Polygon2D& p, const Polygon2D& q) {
  if (p.empty() || q.empty()) return {};
  Polygon2D current = p;
  for (const auto& h : q.halfplanes()) {
    current = clip(current, h);
    if (current.empty()) return {};
  }
  return current;
}

Polygon2D minkowski_sum_2d(const Polygon2D& p, const Polygon2D& q) {
  std::vector<Point2> sums;
  sums.reserve(p.vertices.size() * q.vertices.size());
  for (const auto& a : p.vertices) {
    for (const auto& b : q.vertices) sums.push_back(a + b);
  }
  return convex_hull(std::move(sums));
}

}  // namespace symcover
