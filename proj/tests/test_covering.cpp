#include "symcover/covering.hpp"
#include "symcover/presets.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace symcover;

namespace {

Body cube(int n, double s = 1.0) { return make_body(shapes::scaled(shapes::cube(n), s)); }

std::set<std::vector<double>> rows_of(const Points& p) {
  std::set<std::vector<double>> out;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    std::vector<double> r;
    for (Eigen::Index j = 0; j < p.cols(); ++j) r.push_back(std::round(p(i, j) * 1e9) / 1e9);
    out.insert(r);
  }
  return out;
}

}  // namespace

TEST_CASE("greedy cover of the square by half squares") {
  const CoverCertificate c = cover_greedy(cube(2), cube(2, 0.5), {}, 1);
  CHECK(c.verified);
  CHECK(c.size() == 4);
  CHECK(rows_of(c.centers) == std::set<std::vector<double>>{{-0.5, -0.5}, {-0.5, 0.5}, {0.5, -0.5}, {0.5, 0.5}});
  CHECK(c.uncovered.rows() == 0);
}

TEST_CASE("greedy cover of the 3-cube by half cubes") {
  const CoverCertificate c = cover_greedy(cube(3), cube(3, 0.5), {}, 2);
  CHECK(c.verified);
  CHECK(c.size() == 8);
}

TEST_CASE("a body covers itself with one translate") {
  const Body t = make_body(shapes::triangle());
  const CoverCertificate c = cover_greedy(t, t, {}, 3);
  CHECK(c.verified);
  CHECK(c.size() == 1);
}

TEST_CASE("verification catches shrunk and empty covers") {
  CoverCertificate c = cover_greedy(cube(2), cube(2, 0.5), {}, 1);
  c.centers *= 0.9;
  const CoverCertificate bad = verify_cover(cube(2), c, {}, 1);
  CHECK_FALSE(bad.verified);
  CHECK(bad.uncovered.rows() > 0);
  bool corner = false;
  for (Eigen::Index i = 0; i < bad.uncovered.rows(); ++i) {
    corner = corner || bad.uncovered.row(i).cwiseAbs().minCoeff() > 1.0 - 1e-12;
  }
  CHECK(corner);
  c.centers.resize(0, 2);
  CHECK_FALSE(verify_cover(cube(2), c, {}, 1).verified);
}

TEST_CASE("open-interior semantics") {
  CoverCertificate c = cover_greedy(cube(2), cube(2, 0.5), {}, 1);
  c.open_interior = true;
  // Closed half squares meet the corners only on their boundary.
  CHECK_FALSE(verify_cover(cube(2), c, {}, 1).verified);
}

TEST_CASE("denser witnesses keep verified covers verified") {
  const CoverCertificate c = cover_greedy(cube(3), cube(3, 0.5), {}, 2);
  WitnessOptions dense;
  dense.density = 0.125;
  dense.max_grid = 400000;
  CHECK(verify_cover(cube(3), c, dense, 5).verified);
}

TEST_CASE("grid too coarse") {
  CoverOptions co;
  co.grid_step = 3.0;  // only the origin survives as a candidate
  try {
    cover_greedy(cube(2), cube(2, 0.5), co, 1);
    FAIL("expected GridTooCoarse");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::GridTooCoarse);
  }
}

TEST_CASE("separation greedy") {
  Points cand(4, 2);
  cand << 0.75, 0.75, -0.75, 0.75, 0.75, -0.75, -0.75, -0.75;
  CHECK(separation_greedy(cube(2), cube(2, 0.5), cand).count == 4);
  // B contains A − A: any two translates meet.
  CHECK(separation_greedy(cube(2), cube(2, 2.0), 2000, 1).count == 1);
  const PackingResult p = separation_greedy(cube(2), cube(2, 0.5), 5000, 2);
  for (Eigen::Index i = 0; i < p.centers.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < p.centers.rows(); ++j) {
      CHECK((p.centers.row(i) - p.centers.row(j)).cwiseAbs().maxCoeff() > 1.0);
    }
  }
  const VolumeBound vb = packing_volume_bound(cube(2), cube(2, 0.5), 1000, 3);
  CHECK(p.count <= vb.upper());
}

TEST_CASE("packing count stays below the cover count") {
  for (const char* name : {"triangle", "hpoly2"}) {
    const Body k = make_body(find_preset(name).spec);
    const Body t = make_body(shapes::scaled(symmetric_intersection(scaled_body(k, 0.6), Vec::Zero(2)).spec_ptr(), 0.5));
    const PackingResult p = separation_greedy(k, t, 5000, 4);
    const CoverCertificate c = cover_greedy(k, t, {}, 4);
    REQUIRE(c.verified);
    CHECK_MESSAGE(p.count <= c.size(), name);
  }
}

TEST_CASE("volume bounds on the square") {
  CHECK(nbar_volume_bound(cube(2), cube(2), 1000, 1).value.value == doctest::Approx(9.0));
  CHECK(nomega_volume_bound(cube(2), cube(2), 1000, 1).value.value == doctest::Approx(4.0));
  const VolumeBound v3 = nomega_volume_bound(cube(3), cube(3), 100000, 2);
  CHECK(std::abs(v3.value.value - 8.0) < 3.0 * v3.value.stderr_ + 1e-12);
  const VolumeBound n3 = nbar_volume_bound(cube(3), cube(3), 100000, 3);
  CHECK(std::abs(n3.value.value - 27.0) < 3.0 * n3.value.stderr_ + 1e-12);
  const Body shifted = make_body(shapes::translated(shapes::cube(2), Vec::Constant(2, 3.0)));
  CHECK_THROWS_AS(nbar_volume_bound(cube(2), shifted, 100, 1), Error);
}

TEST_CASE("fractional cover of the square") {
  FractionalOptions fo;
  fo.center_spacing = 0.5;
  fo.witness_spacing = 0.1;
  const FractionalCover fc = fractional_cover_lp(cube(2), cube(2, 0.5), fo, 1);
  CHECK(fc.total_weight == doctest::Approx(4.0));
  CHECK(fc.min_coverage >= 1.0 - 1e-9);
  CHECK(fc.gap() >= -1e-12);
  CHECK(fc.gap() <= 1e-6);
  // A covering body containing K needs weight one.
  const FractionalCover one = fractional_cover_lp(cube(2), cube(2, 1.0), fo, 1);
  CHECK(one.total_weight == doctest::Approx(1.0));
  CHECK(fc.total_weight <= nomega_volume_bound(cube(2), cube(2, 0.5), 1000, 1).upper());
}

TEST_CASE("fractional weight is feasible and monotone in T") {
  const Body t = make_body(shapes::triangle());
  FractionalOptions fo;
  fo.center_spacing = 0.1;
  fo.witness_spacing = 0.05;
  double prev = 1e9;
  for (double s : {0.4, 0.5, 0.7}) {
    const FractionalCover fc = fractional_cover_lp(t, scaled_body(t, s), fo, 2);
    // Independent re-check over every witness.
    const Body shape = scaled_body(t, s);
    for (Eigen::Index w = 0; w < fc.witnesses.rows(); ++w) {
      double cover = 0.0;
      for (Eigen::Index c = 0; c < fc.centers.rows(); ++c) {
        if (shape.membership((fc.witnesses.row(w) - fc.centers.row(c)).transpose())) cover += fc.weights[c];
      }
      CHECK(cover >= 1.0 - 1e-9);
    }
    CHECK(fc.total_weight <= prev + 1e-9);
    prev = fc.total_weight;
  }
}

TEST_CASE("rounding with a summand body") {
  const Body k = cube(2);
  const Body t = cube(2, 0.4);
  const FractionalCover fc = fractional_cover_lp(k, t, {}, 1);
  RoundOptions ro;
  ro.nbar = nbar_volume_bound(k, t, 1000, 1).upper();
  const RoundResult r = round_cover(k, t, t, fc, ro, 2);
  CHECK(r.certificate.verified);
  CHECK(r.certificate.size() <= r.rhs);
  CHECK(r.draws == static_cast<long>(std::ceil(fc.total_weight * (1 + std::log(ro.nbar)) - 1e-9)));
}

TEST_CASE("rounding rarely needs patches") {
  const Body k = make_body(shapes::triangle());
  const Body t1 = scaled_body(k, 0.5 * 0.99);
  const Body t2 = scaled_body(k, 0.5 * 0.99);
  const FractionalCover fc = fractional_cover_lp(k, t1, {}, 1);
  RoundOptions ro;
  ro.nbar = nbar_volume_bound(k, t2, 1000, 1).upper();
  ro.covering_body = scaled_body(k, 0.99);
  ro.witnesses.random_points = 2000;
  int clean = 0;
  for (int s = 0; s < 50; ++s) {
    const RoundResult r = round_cover(k, t1, t2, fc, ro, 100 + s);
    CHECK(r.certificate.verified);
    clean += r.patches == 0;
  }
  CHECK(clean >= 45);
}

TEST_CASE("pipeline rejects uncentered bodies") {
  const Body k = make_body(shapes::translated(shapes::cube(2), Vec::Constant(2, 0.1)));
  try {
    hadwiger_pipeline(k, {}, 1);
    FAIL("expected NotCentered");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotCentered);
  }
}

TEST_CASE("pipeline ledger on the square") {
  const HadwigerResult h = hadwiger_pipeline(cube(2), {}, 1);
  CHECK(h.ledger.overall_pass());
  CHECK(h.rounded.certificate.verified);
  CHECK(h.ledger.at("cover_vs_chain_bound").lhs <= h.ledger.at("cover_vs_chain_bound").rhs);
  const auto j = h.rounded.certificate.to_json();
  for (const char* key : {"centers", "body_spec", "verified", "witness_count", "margin", "patches"}) CHECK(j.contains(key));
}
