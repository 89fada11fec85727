#include "symcover/presets.hpp"
#include "symcover/sampler.hpp"

#include <doctest.h>

#include <cmath>

using namespace symcover;

TEST_CASE("cube samples have the uniform moments") {
  const Body cube = make_body(shapes::cube(3));
  const SampleBatch b = sample_uniform(cube, 40000, 1);
  CHECK(b.method == SamplerMethod::direct);
  const Moments mom = estimate_moments(b);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(mom.barycenter[i]) < 4.0 * mom.barycenter_stderr[i]);
    CHECK(std::abs(mom.covariance(i, i) - 1.0 / 3.0) < 4.0 * mom.covariance_stderr(i, i));
  }
  CHECK(cube.membership(b.points.row(0).transpose()));
}

TEST_CASE("sampling is reproducible and independent of the execution policy") {
  const Body k = make_body(find_preset("hpoly4").spec);
  SampleOptions serial;
  serial.exec = Exec::serial;
  const SampleBatch a = sample_uniform(k, 5000, 9);
  const SampleBatch b = sample_uniform(k, 5000, 9, serial);
  CHECK(a.points == b.points);
  CHECK_FALSE(a.points == sample_uniform(k, 5000, 10).points);
}

TEST_CASE("hit-and-run agrees with rejection sampling") {
  const Body k = make_body(find_preset("hpoly4").spec);
  SampleOptions walk;
  walk.force_walk = true;
  const SampleBatch w = sample_uniform(k, 20000, 3, walk);
  REQUIRE(w.method == SamplerMethod::hit_and_run);
  const SampleBatch r = sample_uniform(k, 20000, 4);
  CHECK(r.method != SamplerMethod::hit_and_run);
  for (int i = 0; i < 4; ++i) {
    const Estimate mw = mean_estimate(w.points.col(i), w.method);
    const Estimate mr = mean_estimate(r.points.col(i), r.method);
    CHECK(std::abs(mw.value - mr.value) < 4.0 * std::hypot(mw.stderr_, mr.stderr_));
  }
  for (Eigen::Index j = 0; j < w.points.rows(); j += 97) CHECK(k.membership(w.points.row(j).transpose()));
}

TEST_CASE("lp ball volume estimate matches the closed form") {
  const double p = 1.5;
  const int n = 3;
  const Body ball = make_body(shapes::lp_ball(p, n));
  const double exact = std::pow(2.0 * std::tgamma(1.0 + 1.0 / p), n) / std::tgamma(1.0 + n / p);
  const Estimate v = estimate_volume(ball, 100000, 5);
  CHECK(std::abs(v.value - exact) < 4.0 * v.stderr_);
}

TEST_CASE("isotropic map of the cube") {
  const Body cube = make_body(shapes::cube(4));
  const IsotropicResult iso = to_isotropic(cube, 50000, 6);
  // Unit-volume cube: variance 1/12 per coordinate.
  CHECK(iso.report.isotropic_constant.value == doctest::Approx(1.0 / std::sqrt(12.0)).epsilon(0.01));
  const Moments mom = estimate_moments(sample_uniform(iso.body, 50000, 7));
  for (int i = 0; i < 4; ++i) CHECK(mom.covariance(i, i) == doctest::Approx(1.0 / 12.0).epsilon(0.03));
}

TEST_CASE("moments need enough samples") {
  const Body cube = make_body(shapes::cube(3));
  try {
    estimate_moments(sample_uniform(cube, 3, 1));
    FAIL("expected TooFewSamples");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TooFewSamples);
  }
}
