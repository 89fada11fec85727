#pragma once

#include "symcover/common.hpp"

#include <functional>
#include <vector>

namespace symcover {

/// maximize objective·x  s.t.  a_ub x <= b_ub,  a_eq x = b_eq,
/// x_j >= 0 unless free_vars[j].
struct LinearProgram {
  Vec objective;
  Mat a_ub;
  Vec b_ub;
  Mat a_eq;
  Vec b_eq;
  std::vector<bool> free_vars;  // empty: every variable is nonnegative

  int num_vars() const { return static_cast<int>(objective.size()); }
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  Vec x;
  double objective = 0.0;
  /// Shadow prices of the <= rows (nonnegative at a maximum).
  Vec ub_duals;
  long iterations = 0;
};

struct LpOptions {
  double tol = 1e-9;
  long max_iterations = 0;  // 0: 50·(rows + cols) + 1000
  /// Optional phase 2 early stop, called every accept_every pivots with the
  /// current objective and tentative <= duals. Returning true ends the solve
  /// with status optimal; the caller is responsible for certifying the gap.
  std::function<bool(double objective, const Vec& ub_duals)> accept;
  long accept_every = 50;
};

/// Dense two-phase tableau simplex. Pricing by reduced cost over column norm,
/// switching to Bland's rule while the objective stalls.
LpResult solve_lp(const LinearProgram& lp, const LpOptions& options = {});

/// True iff {a_ub x <= b_ub, a_eq x = b_eq, sign constraints} is nonempty.
bool lp_feasible(const LinearProgram& lp, const LpOptions& options = {});

}  // namespace symcover
