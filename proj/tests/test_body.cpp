#include "symcover/body.hpp"
#include "symcover/body_json.hpp"
#include "symcover/polygon.hpp"
#include "symcover/presets.hpp"
#include "symcover/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace symcover;

namespace {

Vec v2(double a, double b) {
  Vec x(2);
  x << a, b;
  return x;
}

// Edge-merge Minkowski sum of two counterclockwise convex polygons.
Polygon2D edge_merge_sum(const Polygon2D& p, const Polygon2D& q) {
  auto bottom = [](const Polygon2D& poly) {
    std::size_t k = 0;
    for (std::size_t i = 1; i < poly.vertices.size(); ++i) {
      const auto& a = poly.vertices[i];
      const auto& b = poly.vertices[k];
      if (a.y() < b.y() || (a.y() == b.y() && a.x() < b.x())) k = i;
    }
    return k;
  };
  const std::size_t n = p.vertices.size(), m = q.vertices.size();
  const std::size_t i0 = bottom(p), j0 = bottom(q);
  std::vector<Point2> out;
  std::size_t i = 0, j = 0;
  while (i < n || j < m) {
    const Point2 a = p.vertices[(i0 + i) % n], b = q.vertices[(j0 + j) % m];
    out.push_back(a + b);
    const Point2 ea = p.vertices[(i0 + i + 1) % n] - a;
    const Point2 eb = q.vertices[(j0 + j + 1) % m] - b;
    const double cross = ea.x() * eb.y() - ea.y() * eb.x();
    if (j >= m || (i < n && cross > 0)) {
      ++i;
    } else if (i >= n || cross < 0) {
      ++j;
    } else {
      ++i;
      ++j;
    }
  }
  return convex_hull(out);
}

Polygon2D random_polygon(Rng& rng, int k) {
  std::vector<Point2> pts;
  for (int i = 0; i < k; ++i) pts.emplace_back(rng.uniform(-1, 1), rng.uniform(-1, 1));
  return convex_hull(pts);
}

}  // namespace

TEST_CASE("cube oracles agree") {
  const Body cube = make_body(shapes::cube(3));
  Rng rng(1);
  for (int t = 0; t < 500; ++t) {
    Vec x(3);
    for (int i = 0; i < 3; ++i) x[i] = rng.uniform(-1.5, 1.5);
    const double g = x.cwiseAbs().maxCoeff();
    CHECK(cube.gauge(x) == doctest::Approx(g));
    CHECK(cube.membership(x) == (g <= 1.0));
    const Vec u = rng.unit_vector(3);
    CHECK(cube.support(u) == doctest::Approx(u.cwiseAbs().sum()));
  }
  CHECK(cube.exact_volume().value() == doctest::Approx(8.0));
  CHECK(cube.origin_symmetric());
  CHECK(cube.inradius_estimate() == doctest::Approx(1.0));
}

TEST_CASE("lp ball gauge and support are dual") {
  const Body ball = make_body(shapes::lp_ball(3.0, 4));
  Rng rng(2);
  for (int t = 0; t < 200; ++t) {
    const Vec x = rng.unit_vector(4) * rng.uniform(0.1, 2.0);
    const double g = std::pow(x.array().abs().pow(3.0).sum(), 1.0 / 3.0);
    CHECK(ball.gauge(x) == doctest::Approx(g).epsilon(1e-10));
    const Vec u = rng.unit_vector(4);
    const double q = 1.5;
    CHECK(ball.support(u) == doctest::Approx(std::pow(u.array().abs().pow(q).sum(), 1.0 / q)).epsilon(1e-10));
    CHECK(u.dot(ball.support_point(u)) == doctest::Approx(ball.support(u)).epsilon(1e-9));
  }
}

TEST_CASE("membership matches gauge on the corpus") {
  Rng rng(3);
  for (const auto& p : preset_corpus()) {
    const Body b = make_body(p.spec);
    for (int t = 0; t < 200; ++t) {
      const Vec x = rng.unit_vector(b.dim()) * rng.uniform(0.0, b.bounding_radius());
      const double g = b.gauge(x);
      if (std::abs(g - 1.0) > 1e-9) CHECK_MESSAGE(b.membership(x) == (g < 1.0), p.name);
    }
    CHECK_MESSAGE(b.interior_margin(b.interior_point()) > 0.0, p.name);
    for (int i = 0; i < b.dim(); ++i) {
      Vec e = Vec::Zero(b.dim());
      e[i] = 1.0;
      CHECK(b.box_hi()[i] == doctest::Approx(b.support(e)).epsilon(1e-7));
    }
  }
}

TEST_CASE("triangle polygon path") {
  const Body t = make_body(shapes::triangle());
  REQUIRE(t.polygon());
  CHECK(t.polygon()->area() == doctest::Approx(1.5));
  CHECK(t.exact_barycenter()->norm() < 1e-12);
  CHECK_FALSE(t.origin_symmetric());
}

TEST_CASE("errors on bad specs") {
  CHECK_THROWS_AS(make_body(shapes::h_polytope({{v2(1, 0), 1.0}, {v2(-1, 0), 1.0}})), Error);
  try {
    make_body(shapes::h_polytope({{v2(1, 0), 1.0}, {v2(-1, 0), 1.0}}));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Unbounded);
  }
  try {
    make_body(shapes::h_polytope({{v2(1, 0), -1.0}, {v2(-1, 0), -1.0}, {v2(0, 1), 1.0}, {v2(0, -1), 1.0}}));
    FAIL("expected EmptyBody");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyBody);
  }
  try {
    make_body(shapes::intersection(shapes::cube(2), shapes::cube(3)));
    FAIL("expected DimMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DimMismatch);
  }
  const Body shifted = make_body(shapes::translated(shapes::cube(2), v2(3, 0)));
  try {
    shifted.gauge(v2(1, 1));
    FAIL("expected OriginNotInterior");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OriginNotInterior);
  }
}

TEST_CASE("spec JSON round trip preserves the hash") {
  for (const auto& p : preset_corpus()) {
    const auto j = spec_to_json(*p.spec);
    const SpecPtr back = spec_from_json(j);
    CHECK(spec_hash(*back) == spec_hash(*p.spec));
  }
  CHECK_THROWS_AS(spec_from_json(nlohmann::json{{"kind", "torus"}}), Error);
}

TEST_CASE("symmetric intersection is symmetric about x/2") {
  const Body t = make_body(shapes::triangle());
  Rng rng(4);
  for (int s = 0; s < 20; ++s) {
    const Vec x = v2(rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4));
    const Body si = symmetric_intersection(t, x);
    for (int k = 0; k < 50; ++k) {
      const Vec y = v2(rng.uniform(-1, 1), rng.uniform(-1, 1));
      CHECK(si.membership(y) == si.membership(x - y));
      CHECK(si.membership(y) == (t.membership(y) && t.membership(x - y)));
    }
  }
}

TEST_CASE("2-D Minkowski sum matches the edge-merge oracle") {
  Rng rng(5);
  for (int s = 0; s < 30; ++s) {
    const Polygon2D p = random_polygon(rng, 8), q = random_polygon(rng, 6);
    const Polygon2D a = minkowski_sum_2d(p, q), b = edge_merge_sum(p, q);
    CHECK(a.area() == doctest::Approx(b.area()).epsilon(1e-10));
    CHECK(a.vertices.size() == b.vertices.size());
  }
}

TEST_CASE("minkowski membership agrees with the exact polygon sum") {
  Rng rng(6);
  const Body a = make_body(shapes::triangle());
  const Body b = make_body(shapes::scaled(shapes::cube(2), 0.3));
  const Body ball = make_body(shapes::scaled(shapes::lp_ball(2.0, 2), 0.3));
  const Polygon2D sum = minkowski_sum_2d(*a.polygon(), *b.polygon());
  for (int t = 0; t < 300; ++t) {
    const Vec x = v2(rng.uniform(-1.6, 1.6), rng.uniform(-1.6, 1.6));
    const Point2 p(x[0], x[1]);
    const bool inside = sum.contains(p, 1e-9);
    // Skip points within 1e-6 of the boundary.
    double margin = 1e9;
    for (const auto& h : sum.halfplanes()) margin = std::min(margin, std::abs(h.normal.dot(p) - h.offset) / h.normal.norm());
    if (margin < 1e-6) continue;
    CHECK(minkowski_membership(a, b, x) == inside);
    // Triangle + disc: distance from the triangle at most 0.3.
    const Body tri = a;
    double dist = 0.0;
    if (!tri.polygon()->contains(p)) {
      dist = 1e9;
      const auto& vs = tri.polygon()->vertices;
      for (std::size_t i = 0; i < vs.size(); ++i) {
        const Point2 u = vs[i], w = vs[(i + 1) % vs.size()];
        const double s = std::clamp((p - u).dot(w - u) / (w - u).squaredNorm(), 0.0, 1.0);
        dist = std::min(dist, (p - (u + s * (w - u))).norm());
      }
    }
    if (std::abs(dist - 0.3) > 1e-5) CHECK(minkowski_membership(a, ball, x) == (dist <= 0.3));
  }
}

TEST_CASE("polygon clipping matches a brute-force area") {
  Rng rng(7);
  for (int s = 0; s < 10; ++s) {
    const Polygon2D p = random_polygon(rng, 7), q = random_polygon(rng, 7);
    const double exact = polygon_intersect_2d(p, q).area();
    long hits = 0;
    const int grid = 400;
    for (int i = 0; i < grid; ++i) {
      for (int j = 0; j < grid; ++j) {
        const Point2 x(-1 + (i + 0.5) * 2.0 / grid, -1 + (j + 0.5) * 2.0 / grid);
        hits += p.contains(x) && q.contains(x);
      }
    }
    CHECK(exact == doctest::Approx(4.0 * hits / (grid * grid)).epsilon(0.02));
  }
}
