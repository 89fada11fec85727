#include "symcover/lp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace symcover {
namespace {

class Tableau {
 public:
  Tableau(Eigen::Index rows, Eigen::Index cols)
      : t_(Mat::Zero(rows + 1, cols + 1)), basis_(rows, -1), allowed_(cols, true) {}

  Eigen::Index rows() const { return t_.rows() - 1; }
  Eigen::Index cols() const { return t_.cols() - 1; }
  double& at(Eigen::Index r, Eigen::Index c) { return t_(r, c); }
  double& rhs(Eigen::Index r) { return t_(r, cols()); }
  double objective() const { return t_(rows(), cols()); }
  double reduced_cost(Eigen::Index c) const { return t_(rows(), c); }
  std::vector<Eigen::Index>& basis() { return basis_; }
  void forbid(Eigen::Index c) { allowed_[c] = false; }

  // Objective row = c_B B^{-1} A - c, assuming the constraint rows already
  // hold B^{-1} A for the current basis.
  void set_objective(const Vec& cost) {
    cost_ = cost;
    const Eigen::Index m = rows();
    t_.row(m).setZero();
    t_.row(m).head(cols()) = -cost.transpose();
    for (Eigen::Index i = 0; i < m; ++i) {
      const double cb = cost[basis_[i]];
      if (cb != 0.0) t_.row(m) += cb * t_.row(i);
    }
  }

  // Keeps a copy of the loaded rows so the tableau can be rebuilt.
  void snapshot() {
    original_ = t_.topRows(rows());
    scale_ = (original_.leftCols(cols()).colwise().squaredNorm().array() + 1.0).sqrt().inverse().transpose();
  }

  // Recomputes B^{-1}[A | b] from the original rows to shed accumulated
  // rounding. Skipped if the basis matrix looks singular.
  void refactor() {
    const Eigen::Index m = rows();
    Mat b(m, m);
    for (Eigen::Index i = 0; i < m; ++i) b.col(i) = original_.col(basis_[i]);
    const Eigen::PartialPivLU<Mat> lu(b);
    if (!(lu.rcond() > 1e-14)) return;
    Mat fresh = lu.solve(original_);
    if (!fresh.allFinite()) return;
    fresh = (fresh.array().abs() < 1e-13).select(0.0, fresh);
    for (Eigen::Index i = 0; i < m; ++i) {
      fresh.col(basis_[i]).setZero();
      fresh(i, basis_[i]) = 1.0;
      if (std::abs(fresh(i, cols())) < 1e-11) fresh(i, cols()) = 0.0;
    }
    t_.topRows(m) = fresh;
    set_objective(cost_);
  }

  void pivot(Eigen::Index p, Eigen::Index q) {
    t_.row(p) /= t_(p, q);
    // Covering tableaus are sparse in the pivot column, so skip zero rows.
    for (Eigen::Index i = 0; i < t_.rows(); ++i) {
      const double f = t_(i, q);
      if (i == p || f == 0.0) continue;
      t_.row(i) -= f * t_.row(p);
      t_(i, q) = 0.0;
    }
    t_(p, q) = 1.0;
    basis_[p] = q;
  }

  // Returns the final status of a maximization from the current basis.
  using Probe = std::function<bool(double)>;

  LpStatus optimize(double tol, long max_iter, long& iterations, const Probe& probe = {}, long probe_every = 0) {
    const Eigen::Index m = rows();
    const Eigen::Index n = cols();
    bool bland = false;
    long stall = 0;
    double best = objective();
    const long refactor_every = std::max<long>(200, 4 * m);
    long since_refactor = 0;
    while (true) {
      if (iterations >= max_iter) return LpStatus::iteration_limit;
      Eigen::Index q = -1;
      double most_negative = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (!allowed_[j] || t_(m, j) >= -tol) continue;
        const double d = t_(m, j) * scale_[j];
        if (d < most_negative) {
          q = j;
          if (bland) break;
          most_negative = d;
        }
      }
      if (q < 0) return LpStatus::optimal;

      Eigen::Index p = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < m; ++i) {
        const double a = t_(i, q);
        if (a <= tol) continue;
        const double ratio = std::max(t_(i, n), 0.0) / a;
        if (ratio < best_ratio - 1e-12 ||
            (ratio <= best_ratio + 1e-12 && p >= 0 && basis_[i] < basis_[p])) {
          best_ratio = std::min(best_ratio, ratio);
          p = i;
        }
      }
      if (p < 0) return LpStatus::unbounded;
      pivot(p, q);
      ++iterations;
      if (++since_refactor >= refactor_every) {
        refactor();
        since_refactor = 0;
      }
      if (probe && probe_every > 0 && iterations % probe_every == 0 && probe(objective())) return LpStatus::optimal;

      const double now = objective();
      // Any step above round-off is progress; only flat runs risk cycling.
      if (now > best + 1e-13 * (1.0 + std::abs(best))) {
        best = now;
        stall = 0;
        bland = false;
      } else if (++stall > 50) {
        bland = true;
      }
    }
  }

 private:
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> t_;
  Mat original_;
  Vec scale_;  // static column scaling for pricing
  Vec cost_;
  std::vector<Eigen::Index> basis_;
  std::vector<bool> allowed_;
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp, const LpOptions& options) {
  const int n = lp.num_vars();
  const Eigen::Index m_ub = lp.a_ub.rows();
  const Eigen::Index m_eq = lp.a_eq.rows();
  if ((m_ub > 0 && lp.a_ub.cols() != n) || (m_eq > 0 && lp.a_eq.cols() != n) ||
      lp.b_ub.size() != m_ub || lp.b_eq.size() != m_eq ||
      (!lp.free_vars.empty() && static_cast<int>(lp.free_vars.size()) != n)) {
    throw Error(ErrorKind::DimMismatch, "linear program shapes are inconsistent");
  }
  const Eigen::Index m = m_ub + m_eq;

  std::vector<Eigen::Index> neg_col(n, -1);
  Eigen::Index structural = n;
  for (int j = 0; j < n; ++j) {
    if (!lp.free_vars.empty() && lp.free_vars[j]) neg_col[j] = structural++;
  }
  const Eigen::Index slack0 = structural;
  Eigen::Index artificials = m_eq;
  for (Eigen::Index i = 0; i < m_ub; ++i) {
    if (lp.b_ub[i] < 0.0) ++artificials;
  }
  const Eigen::Index art0 = slack0 + m_ub;
  const Eigen::Index total = art0 + artificials;

  Tableau tab(m, total);
  Eigen::Index next_art = art0;
  auto load_row = [&](Eigen::Index r, const auto& coeffs, double b, Eigen::Index slack_col) {
    const double sign = b < 0.0 ? -1.0 : 1.0;
    for (int j = 0; j < n; ++j) {
      tab.at(r, j) = sign * coeffs[j];
      if (neg_col[j] >= 0) tab.at(r, neg_col[j]) = -sign * coeffs[j];
    }
    if (slack_col >= 0) tab.at(r, slack_col) = sign;
    tab.rhs(r) = sign * b;
    if (slack_col >= 0 && sign > 0.0) {
      tab.basis()[r] = slack_col;
    } else {
      tab.at(r, next_art) = 1.0;
      tab.basis()[r] = next_art++;
    }
  };
  for (Eigen::Index i = 0; i < m_ub; ++i) load_row(i, lp.a_ub.row(i), lp.b_ub[i], slack0 + i);
  for (Eigen::Index i = 0; i < m_eq; ++i) load_row(m_ub + i, lp.a_eq.row(i), lp.b_eq[i], -1);
  tab.snapshot();

  const long max_iter =
      options.max_iterations > 0 ? options.max_iterations : 50 * static_cast<long>(m + total) + 1000;
  LpResult result;

  if (artificials > 0) {
    Vec phase1 = Vec::Zero(total);
    phase1.tail(artificials).setConstant(-1.0);
    tab.set_objective(phase1);
    const LpStatus st = tab.optimize(options.tol, max_iter, result.iterations);
    if (st == LpStatus::iteration_limit) {
      result.status = st;
      return result;
    }
    // Only rows carrying an artificial enter the phase 1 optimum.
    double scale = 1.0;
    for (Eigen::Index i = 0; i < m_ub; ++i) {
      if (lp.b_ub[i] < 0.0) scale = std::max(scale, -lp.b_ub[i]);
    }
    if (m_eq > 0) scale = std::max(scale, lp.b_eq.cwiseAbs().maxCoeff());
    if (tab.objective() < -1e-8 * scale) {
      result.status = LpStatus::infeasible;
      return result;
    }
    // Drive artificials out of the basis where a structural pivot exists.
    for (Eigen::Index r = 0; r < m; ++r) {
      if (tab.basis()[r] < art0) continue;
      for (Eigen::Index c = 0; c < art0; ++c) {
        if (std::abs(tab.at(r, c)) > 1e-9) {
          tab.pivot(r, c);
          break;
        }
      }
    }
    for (Eigen::Index c = art0; c < total; ++c) tab.forbid(c);
  }

  Vec cost = Vec::Zero(total);
  for (int j = 0; j < n; ++j) {
    cost[j] = lp.objective[j];
    if (neg_col[j] >= 0) cost[neg_col[j]] = -lp.objective[j];
  }
  tab.set_objective(cost);
  Tableau::Probe probe;
  if (options.accept) {
    probe = [&](double objective) {
      Vec duals(m_ub);
      for (Eigen::Index i = 0; i < m_ub; ++i) duals[i] = tab.reduced_cost(slack0 + i);
      return options.accept(objective, duals);
    };
  }
  result.status = tab.optimize(options.tol, max_iter, result.iterations, probe, options.accept_every);
  if (result.status != LpStatus::optimal) return result;

  Vec values = Vec::Zero(total);
  for (Eigen::Index r = 0; r < m; ++r) values[tab.basis()[r]] = tab.rhs(r);
  result.x.resize(n);
  for (int j = 0; j < n; ++j) {
    result.x[j] = values[j] - (neg_col[j] >= 0 ? values[neg_col[j]] : 0.0);
  }
  result.objective = tab.objective();
  result.ub_duals.resize(m_ub);
  // The slack column carries the row's sign, so its reduced cost is the
  // dual of the original row.
  for (Eigen::Index i = 0; i < m_ub; ++i) result.ub_duals[i] = tab.reduced_cost(slack0 + i);
  return result;
}

bool lp_feasible(const LinearProgram& lp, const LpOptions& options) {
  LinearProgram zero = lp;
  zero.objective = Vec::Zero(lp.num_vars());
  const LpResult r = solve_lp(zero, options);
  if (r.status == LpStatus::iteration_limit) {
    throw Error(ErrorKind::SolverStall, "feasibility LP hit its iteration cap");
  }
  return r.status == LpStatus::optimal;
}

}  // namespace symcover
