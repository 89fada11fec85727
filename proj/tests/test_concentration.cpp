#include "symcover/concentration.hpp"
#include "symcover/presets.hpp"
#include "symcover/sampler.hpp"

#include <doctest.h>

#include <boost/math/special_functions/binomial.hpp>

#include <cmath>

using namespace symcover;
using boost::multiprecision::cpp_rational;

namespace {

// E max|X_i + Y_i| by integrating the tail of the triangular law and
// expanding (1 − u²/4)ⁿ binomially.
cpp_rational cube_sum_gauge_oracle(int n) {
  cpp_rational sum = 0;
  boost::multiprecision::cpp_int c = 1;
  for (int k = 0; k <= n; ++k) {
    cpp_rational term(c, 2 * k + 1);
    sum += (k % 2 == 0) ? term : cpp_rational(-term);
    c = c * (n - k) / (k + 1);
  }
  return cpp_rational(2) - 2 * sum;
}

}  // namespace

TEST_CASE("cube closed form: exact rationals") {
  CHECK(cube_sum_gauge_exact(1).text() == "2/3");
  CHECK(cube_sum_gauge_exact(2).text() == "14/15");
  CHECK(cube_sum_gauge_exact(3).text() == "38/35");
  for (int n = 1; n <= 40; ++n) {
    const CubeSumGauge g = cube_sum_gauge_exact(n);
    CHECK(g.value == cube_sum_gauge_oracle(n));
    CHECK(g.lower <= g.decimal);
    CHECK(g.decimal <= g.upper);
  }
}

TEST_CASE("cube closed form: errors") {
  CHECK_THROWS_AS(cube_sum_gauge_exact(0), Error);
  try {
    cube_sum_gauge_exact(5000);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Overflow);
  }
}

TEST_CASE("cube closed form matches Monte Carlo") {
  const Body cube = make_body(shapes::cube(3));
  const Estimate e = mean_sum_gauge(cube, 100000, 1);
  CHECK(std::abs(e.value - cube_sum_gauge_exact(3).decimal) < 3.0 * e.stderr_);
}

TEST_CASE("mean gauge is n/(n+1)") {
  for (const char* name : {"cube3", "triangle", "lp3"}) {
    const Body k = make_body(find_preset(name).spec);
    const Estimate e = mean_gauge(k, 50000, 2);
    const double n = k.dim();
    CHECK_MESSAGE(std::abs(e.value - n / (n + 1)) < 3.0 * e.stderr_, name);
  }
}

TEST_CASE("thin-shell moment ratio is one half") {
  const Body cube = make_body(shapes::cube(5));
  const IsotropicResult iso = to_isotropic(cube, 40000, 3);
  const ThinShellStats st = thin_shell_stats(iso.body, 40000, 4, {0.9, 1.1}, iso.report.isotropic_constant.value);
  CHECK(std::abs(st.moment_ratio.value - 0.5) < 3.0 * st.moment_ratio.stderr_);
  bool has_threshold = false;
  for (const auto& p : st.shells) has_threshold = has_threshold || std::abs(p.r - thin_shell_threshold()) < 1e-12;
  CHECK(has_threshold);
}

TEST_CASE("thin-shell statistics reject anisotropic bodies") {
  Mat a = Mat::Identity(2, 2);
  a(1, 1) = 3.0;
  const Body k = make_body(shapes::affine_image(shapes::cube(2), a, Vec::Zero(2)));
  try {
    thin_shell_stats(k, 20000, 1, {1.0});
    FAIL("expected NotIsotropic");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotIsotropic);
  }
}

TEST_CASE("psi estimate") {
  const Body cube = make_body(shapes::cube(3));
  CHECK_THROWS_AS(psi_estimate(cube, 1.0, 100, 4, default_p_grid(), 1), Error);
  const PsiEstimate p = psi_estimate(cube, 2.0, 20000, 8, default_p_grid(), 1);
  // Uniform on [-1,1]: (E|t|^p)^{1/p} / p^{1/2} / (1/√3) is largest at p = 2.
  CHECK(p.b_alpha == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.02));
  CHECK(p.worst_p == doctest::Approx(2.0));
}

TEST_CASE("pair concentration bound holds on the cube") {
  const Body cube = make_body(shapes::cube(6));
  for (double e : {0.2, 0.4, 0.6}) {
    const PairConcentration pc = pair_concentration(cube, e, 40000, 5);
    CHECK(pc.threshold == doctest::Approx(std::sqrt(2.0) * (1 - e)));
    CHECK(pc.bound == doctest::Approx(std::exp(-e * e * 6 / 2)));
    CHECK(pc.pass());
  }
}

TEST_CASE("modulus of convexity of the Euclidean ball") {
  const Body ball = make_body(shapes::lp_ball(2.0, 3));
  for (double e : {0.3, 0.8, 1.5}) {
    const ModulusResult r = modulus_convexity(ball, e, 400, 7);
    CHECK(euclidean_modulus(e) == doctest::Approx(1.0 - std::sqrt(1.0 - e * e / 4.0)));
    CHECK(r.delta >= euclidean_modulus(e) - 1e-7);
    CHECK(r.delta == doctest::Approx(euclidean_modulus(e)).epsilon(1e-3));
  }
  CHECK_THROWS_AS(modulus_convexity(ball, 2.5, 100, 1), Error);
}

TEST_CASE("uniform convexity formulas") {
  const double r = 0.5, eps = 0.5;
  const int n = 10;
  const UniformConvexBounds u = uniform_convex_bounds(r, eps, n);
  const double alpha = 1.0 - std::exp(-std::pow(std::sqrt(2.0) - eps, 2) * n / 4.0);
  CHECK(u.alpha == doctest::Approx(alpha));
  CHECK(u.kb_lb == doctest::Approx(alpha * std::pow(0.5, n) * std::pow(1.0 / (1.0 - r), n)));
  CHECK(u.mp_lb == doctest::Approx(std::pow(0.5, n) * std::pow(1.0 / (1.0 - alpha * r), n) / (std::exp(1.0) * std::sqrt(n))));
  CHECK(u.hadwiger_ub == doctest::Approx(std::pow(4.0 * (1.0 - r), n) / alpha));
  CHECK_THROWS_AS(uniform_convex_bounds(1.0, eps, n), Error);
  CHECK_THROWS_AS(uniform_convex_bounds(r, 1.5, n), Error);
  const UniformConvexBounds edge = uniform_convex_bounds(r, std::sqrt(2.0) - 1e-9, n);
  CHECK(edge.alpha < 1e-15);
}

TEST_CASE("entropy bounds") {
  const Body s = make_body(shapes::simplex(3));
  const EntropyGapBound zero = entropy_gap_gaussian(s, default_entropy_t(), 100, 1, 0.0);
  CHECK(zero.implied.value == std::ldexp(1.0, -3));
  const Body cube = make_body(shapes::cube(4));
  const EntropyGapBound g = entropy_gap_gauge(cube, 20000, 2);
  const double sg = mean_sum_gauge(cube, 20000, 2).value;
  CHECK(g.implied.value == doctest::Approx(entropy_gauge_implied(4, sg)));
  // n^n e^{-n} / (n! s^n)
  CHECK(entropy_gauge_implied(4, 1.5) == doctest::Approx(std::pow(4.0, 4) * std::exp(-4.0) / (24.0 * std::pow(1.5, 4))));
  CHECK(g.implied.value <= 1.0);
}

TEST_CASE("half-sum ratio curve") {
  const Body cube = make_body(shapes::cube(8));
  const auto curve = half_sum_ratio_curve(cube, {0.8, 1.0, 1.2}, 40000, 3);
  REQUIRE(curve.size() == 3);
  CHECK(curve[0].ratio.value > 1.0);
  CHECK(std::isfinite(curve[0].ratio.stderr_));
  CHECK(curve[1].ratio.value == 1.0);
  CHECK(curve[2].ratio.value == 1.0);
}
