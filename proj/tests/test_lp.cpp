#include "symcover/lp.hpp"

#include <doctest.h>

using namespace symcover;

TEST_CASE("small LP optimum and duals") {
  // max 3x + 2y s.t. x + y <= 4, x + 3y <= 6, x <= 3
  LinearProgram lp;
  lp.objective = Vec(2);
  lp.objective << 3, 2;
  lp.a_ub = Mat(3, 2);
  lp.a_ub << 1, 1, 1, 3, 1, 0;
  lp.b_ub = Vec(3);
  lp.b_ub << 4, 6, 3;
  const LpResult r = solve_lp(lp);
  REQUIRE(r.status == LpStatus::optimal);
  CHECK(r.objective == doctest::Approx(11.0));
  CHECK(r.x[0] == doctest::Approx(3.0));
  CHECK(r.x[1] == doctest::Approx(1.0));
  // Strong duality: b·y equals the optimum.
  CHECK(lp.b_ub.dot(r.ub_duals) == doctest::Approx(11.0));
  CHECK(r.ub_duals.minCoeff() >= -1e-12);
}

TEST_CASE("infeasible and unbounded programs") {
  LinearProgram lp;
  lp.objective = Vec::Ones(1);
  lp.a_ub = Mat::Ones(1, 1);
  lp.b_ub = Vec::Constant(1, -1.0);
  CHECK(solve_lp(lp).status == LpStatus::infeasible);
  CHECK_FALSE(lp_feasible(lp));

  LinearProgram un;
  un.objective = Vec::Ones(2);
  un.a_ub = Mat(1, 2);
  un.a_ub << 1, -1;
  un.b_ub = Vec::Ones(1);
  CHECK(solve_lp(un).status == LpStatus::unbounded);
}

TEST_CASE("a large unrelated bound does not hide infeasibility") {
  // x + r <= -1, -x + r <= -1, r <= 1e9 with r >= 0 and x free
  LinearProgram lp;
  lp.objective = Vec::Zero(2);
  lp.objective[1] = 1.0;
  lp.a_ub = Mat(3, 2);
  lp.a_ub << 1, 1, -1, 1, 0, 1;
  lp.b_ub = Vec(3);
  lp.b_ub << -1, -1, 1e9;
  lp.free_vars = {true, false};
  CHECK(solve_lp(lp).status == LpStatus::infeasible);
}

TEST_CASE("equalities, free variables and negative right-hand sides") {
  // max -x0 - x1 s.t. x0 + x1 = 2, x0 - x1 >= -4 (as -x0 + x1 <= 4), x1 free
  LinearProgram lp;
  lp.objective = Vec(2);
  lp.objective << -1, -1;
  lp.a_eq = Mat(1, 2);
  lp.a_eq << 1, 1;
  lp.b_eq = Vec::Constant(1, 2.0);
  lp.a_ub = Mat(1, 2);
  lp.a_ub << -1, 1;
  lp.b_ub = Vec::Constant(1, 4.0);
  lp.free_vars = {false, true};
  const LpResult r = solve_lp(lp);
  REQUIRE(r.status == LpStatus::optimal);
  CHECK(r.objective == doctest::Approx(-2.0));
  CHECK(r.x.sum() == doctest::Approx(2.0));

  LinearProgram neg;
  neg.objective = Vec::Ones(1);
  neg.a_ub = Mat(2, 1);
  neg.a_ub << -1, 1;
  neg.b_ub = Vec(2);
  neg.b_ub << -1, 5;  // 1 <= x <= 5
  const LpResult s = solve_lp(neg);
  REQUIRE(s.status == LpStatus::optimal);
  CHECK(s.objective == doctest::Approx(5.0));
}

TEST_CASE("set-cover dual matches the primal") {
  // Three elements, sets {0,1}, {1,2}, {0,2}: fractional cover 3/2.
  LinearProgram lp;
  lp.objective = Vec::Ones(3);
  lp.a_ub = Mat(3, 3);
  lp.a_ub << 1, 1, 0, 0, 1, 1, 1, 0, 1;
  lp.b_ub = Vec::Ones(3);
  const LpResult r = solve_lp(lp);
  REQUIRE(r.status == LpStatus::optimal);
  CHECK(r.objective == doctest::Approx(1.5));
  CHECK(r.ub_duals.sum() == doctest::Approx(1.5));
  const Vec coverage = lp.a_ub.transpose() * r.ub_duals;
  CHECK(coverage.minCoeff() >= 1.0 - 1e-9);
}
