#pragma once

#include "symcover/common.hpp"

#include <functional>

namespace symcover {

struct DirectSearchOptions {
  int max_evals = 4000;
  double ftol = 1e-12;   // spread of simplex values
  double xtol = 1e-10;   // simplex diameter
  double initial_step = 0.1;
  int restarts = 2;      // re-seed the simplex at the incumbent after convergence
};

struct DirectSearchResult {
  Vec x;
  double value = 0.0;
  int evals = 0;
  bool converged = false;
};

/// Nelder–Mead reflect/expand/contract/shrink search with dimension-adaptive
/// coefficients. Minimizes `f`.
DirectSearchResult nelder_mead_minimize(const std::function<double(const Vec&)>& f, const Vec& x0,
                                        const DirectSearchOptions& options = {});

}  // namespace symcover
