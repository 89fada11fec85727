#include "symcover/presets.hpp"
#include "symcover/rng.hpp"
#include "symcover/sampler.hpp"
#include "symcover/symmetry.hpp"

#include <doctest.h>

#include <cmath>

using namespace symcover;

TEST_CASE("triangle measures are exact") {
  const Body t = make_body(shapes::triangle());
  KbOptions ko;
  const KbResult kb = kb_measure(t, ko, 1);
  CHECK(kb.exact);
  CHECK(std::abs(kb.value.value - 2.0 / 3.0) < 1e-9);
  const MpResult mp = milman_pajor(t, 1000, 1);
  CHECK(std::abs(mp.value.value - 2.0 / 3.0) < 1e-9);
  CHECK(symmetry_ledger(2, kb, mp).overall_pass());
}

TEST_CASE("exact ratio agrees with direct Monte Carlo") {
  const Body t = make_body(shapes::triangle());
  const Points xs = sample_uniform(t, 40000, 2).points;
  Rng rng(3);
  for (int s = 0; s < 5; ++s) {
    Vec x(2);
    x << rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5);
    long hits = 0;
    for (Eigen::Index i = 0; i < xs.rows(); ++i) hits += t.membership(x - xs.row(i).transpose());
    const double p = static_cast<double>(hits) / xs.rows();
    const double se = std::sqrt(p * (1 - p) / xs.rows());
    CHECK(std::abs(sym_ratio(t, x, 1, 0).value - p) < 4.0 * se + 1e-12);
  }
}

TEST_CASE("ratio is zero outside 2K and at most one") {
  const Body s = make_body(shapes::simplex(3));
  Vec far = Vec::Constant(3, 5.0);
  CHECK(sym_ratio(s, far, 2000, 1).value == 0.0);
  Rng rng(4);
  for (int i = 0; i < 10; ++i) {
    const Vec x = rng.unit_vector(3) * 0.3;
    const double r = sym_ratio(s, x, 2000, i).value;
    CHECK(r >= 0.0);
    CHECK(r <= 1.0);
  }
}

TEST_CASE("symmetric bodies have measure one") {
  for (const char* name : {"cube3", "lp4", "lp1.5"}) {
    const Body k = make_body(find_preset(name).spec);
    KbOptions ko;
    ko.m = 20000;
    ko.search_m = 5000;
    const KbResult kb = kb_measure(k, ko, 5);
    CHECK_MESSAGE(std::abs(kb.value.value - 1.0) < 1e-3, name);
  }
}

TEST_CASE("simplex ledger holds") {
  const Body s = make_body(shapes::simplex(3));
  KbOptions ko;
  ko.m = 40000;
  ko.search_m = 5000;
  const SymmetryResult r = analyze_symmetry(s, ko, 6);
  CHECK(r.ledger.overall_pass());
  CHECK(r.mp.exact_center);
  CHECK(r.kb.value.value < 1.0);
}
