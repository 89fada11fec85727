#include "symcover/direct_search.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace symcover {
namespace {

struct Vertex {
  Vec x;
  double f;
};

}  // namespace

DirectSearchResult nelder_mead_minimize(const std::function<double(const Vec&)>& f, const Vec& x0,
                                        const DirectSearchOptions& options) {
  const Eigen::Index n = x0.size();
  const double dn = static_cast<double>(std::max<Eigen::Index>(n, 1));
  const double alpha = 1.0;
  const double beta = 1.0 + 2.0 / dn;
  const double gamma = 0.75 - 0.5 / dn;
  const double delta = 1.0 - 1.0 / dn;

  DirectSearchResult best{x0, 0.0, 0, false};
  int evals = 0;
  auto eval = [&](const Vec& x) {
    ++evals;
    return f(x);
  };
  best.value = eval(x0);

  for (int round = 0; round <= options.restarts; ++round) {
    std::vector<Vertex> simplex;
    simplex.push_back({best.x, best.value});
    const double step = round == 0 ? options.initial_step : options.initial_step * 0.1;
    for (Eigen::Index i = 0; i < n; ++i) {
      Vec x = best.x;
      x[i] += (x[i] != 0.0 ? step * std::max(1.0, std::abs(x[i])) : step);
      simplex.push_back({x, eval(x)});
    }

    bool converged = false;
    while (evals < options.max_evals) {
      std::sort(simplex.begin(), simplex.end(),
                [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
      double diameter = 0.0;
      for (std::size_t i = 1; i < simplex.size(); ++i) {
        diameter = std::max(diameter, (simplex[i].x - simplex[0].x).cwiseAbs().maxCoeff());
      }
      const double spread = simplex.back().f - simplex.front().f;
      if (spread <= options.ftol && diameter <= options.xtol) {
        converged = true;
        break;
      }
      if (diameter <= 1e-15) {
        converged = true;
        break;
      }

      Vec centroid = Vec::Zero(n);
      for (std::size_t i = 0; i + 1 < simplex.size(); ++i) centroid += simplex[i].x;
      centroid /= dn;
      Vertex& worst = simplex.back();

      const Vec xr = centroid + alpha * (centroid - worst.x);
      const double fr = eval(xr);
      if (fr < simplex.front().f) {
        const Vec xe = centroid + beta * (xr - centroid);
        const double fe = eval(xe);
        worst = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
        continue;
      }
      if (fr < simplex[simplex.size() - 2].f) {
        worst = {xr, fr};
        continue;
      }
      const bool outside = fr < worst.f;
      const Vec xc = outside ? Vec(centroid + gamma * (xr - centroid))
                             : Vec(centroid - gamma * (centroid - worst.x));
      const double fc = eval(xc);
      if (fc < std::min(fr, worst.f)) {
        worst = {xc, fc};
        continue;
      }
      for (std::size_t i = 1; i < simplex.size(); ++i) {
        simplex[i].x = simplex[0].x + delta * (simplex[i].x - simplex[0].x);
        simplex[i].f = eval(simplex[i].x);
      }
    }

    const auto it = std::min_element(simplex.begin(), simplex.end(),
                                     [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
    const bool improved = it->f < best.value;
    if (it->f <= best.value) {
      best.x = it->x;
      best.value = it->f;
    }
    best.converged = converged;
    if (!converged || evals >= options.max_evals) break;
    if (round > 0 && !improved) break;
  }
  best.evals = evals;
  return best;
}

}  // namespace symcover
