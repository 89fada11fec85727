#include "symcover/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

namespace symcover {
namespace {

int g_cap = -1;

int initial_cap() {
  if (const char* env = std::getenv("SYMCOVER_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v >= 1) return v;
    } catch (const std::exception&) {
    }
  }
  return std::max(1, omp_get_max_threads());
}

}  // namespace

int thread_cap() {
  if (g_cap < 0) g_cap = initial_cap();
  return g_cap;
}

void set_thread_cap(int threads) { g_cap = std::max(1, threads); }

void for_each_index(std::size_t count, const std::function<void(std::size_t)>& fn, Exec exec) {
  if (exec == Exec::serial || count < 2 || thread_cap() == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const long n = static_cast<long>(count);
  // Exceptions cannot cross the OpenMP region; keep the first and rethrow.
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 16) num_threads(thread_cap())
  for (long i = 0; i < n; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(symcover_kernel_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

Vec gauge_rows(const Body& body, const Points& pts, Exec exec) {
  require_dim(pts.cols(), body.dim(), "gauge_rows");
  Vec out(pts.rows());
  for_each_index(static_cast<std::size_t>(pts.rows()), [&](std::size_t i) {
    const auto r = static_cast<Eigen::Index>(i);
    out[r] = body.gauge(pts.row(r).transpose());
  }, exec);
  return out;
}

Vec gauge_combination(const Body& body, const Points& x, double a, const Points& y, double b, Exec exec) {
  require_dim(x.cols(), body.dim(), "gauge_combination");
  require_dim(y.cols(), body.dim(), "gauge_combination");
  const Eigen::Index m = std::min(x.rows(), y.rows());
  Vec out(m);
  for_each_index(static_cast<std::size_t>(m), [&](std::size_t i) {
    const auto r = static_cast<Eigen::Index>(i);
    out[r] = body.gauge((a * x.row(r) + b * y.row(r)).transpose());
  }, exec);
  return out;
}

std::vector<std::uint8_t> membership_mask(const Body& body, const Points& pts, Exec exec) {
  require_dim(pts.cols(), body.dim(), "membership_mask");
  std::vector<std::uint8_t> out(static_cast<std::size_t>(pts.rows()));
  for_each_index(out.size(), [&](std::size_t i) {
    out[i] = body.membership(pts.row(static_cast<Eigen::Index>(i)).transpose()) ? 1 : 0;
  }, exec);
  return out;
}

long count_reflected_hits(const Body& body, VecRef x, const Points& samples, Exec exec) {
  require_dim(x.size(), body.dim(), "count_reflected_hits");
  require_dim(samples.cols(), body.dim(), "count_reflected_hits");
  std::vector<std::uint8_t> hit(static_cast<std::size_t>(samples.rows()));
  for_each_index(hit.size(), [&](std::size_t i) {
    hit[i] = body.membership(x - samples.row(static_cast<Eigen::Index>(i)).transpose()) ? 1 : 0;
  }, exec);
  long total = 0;
  for (auto h : hit) total += h;
  return total;
}

BoxIndex::BoxIndex(const Points& points, const Vec& cell)
    : points_(&points), cell_(cell.cwiseMax(1e-12)), key_dims_(std::min<int>(kKeyDims, static_cast<int>(points.cols()))) {
  for (Eigen::Index r = 0; r < points.rows(); ++r) buckets_[key_of(points.row(r).transpose())].push_back(static_cast<int>(r));
}

std::size_t BoxIndex::KeyHash::operator()(const Key& k) const {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (long v : k) h = (h ^ static_cast<std::uint64_t>(v)) * 0x100000001b3ULL;
  return static_cast<std::size_t>(h);
}

BoxIndex::Key BoxIndex::key_of(const Eigen::Ref<const Vec>& x) const {
  Key k{};
  for (int i = 0; i < key_dims_; ++i) k[static_cast<std::size_t>(i)] = static_cast<long>(std::floor(x[i] / cell_[i]));
  return k;
}

std::vector<int> BoxIndex::query(const Vec& lo, const Vec& hi) const {
  const Points& pts = *points_;
  const Vec qlo = lo.array() - 1e-9, qhi = hi.array() + 1e-9;
  std::vector<int> out;
  auto inside = [&](int r) {
    for (Eigen::Index i = 0; i < pts.cols(); ++i) {
      if (pts(r, i) < qlo[i] || pts(r, i) > qhi[i]) return false;
    }
    return true;
  };
  const Key a = key_of(qlo), b = key_of(qhi);
  double cells = 1.0;
  for (int i = 0; i < key_dims_; ++i) cells *= static_cast<double>(b[static_cast<std::size_t>(i)] - a[static_cast<std::size_t>(i)] + 1);
  if (cells > static_cast<double>(buckets_.size())) {
    for (const auto& [key, rows] : buckets_) {
      for (int r : rows) {
        if (inside(r)) out.push_back(r);
      }
    }
  } else {
    Key k = a;
    while (true) {
      if (const auto it = buckets_.find(k); it != buckets_.end()) {
        for (int r : it->second) {
          if (inside(r)) out.push_back(r);
        }
      }
      int i = 0;
      for (; i < key_dims_; ++i) {
        const auto u = static_cast<std::size_t>(i);
        if (++k[u] <= b[u]) break;
        k[u] = a[u];
      }
      if (i == key_dims_) break;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::vector<int>> incidence_lists(const Body& shape, const Points& witnesses, const Points& centers,
                                              Exec exec) {
  require_dim(witnesses.cols(), shape.dim(), "incidence_lists");
  require_dim(centers.cols(), shape.dim(), "incidence_lists");
  std::vector<std::vector<int>> out(static_cast<std::size_t>(witnesses.rows()));
  const Vec lo = shape.box_lo();
  const Vec hi = shape.box_hi();
  // w − c in the shape box  ⇔  c in [w − hi, w − lo].
  const BoxIndex index(centers, hi - lo);
  for_each_index(out.size(), [&](std::size_t i) {
    const Vec w = witnesses.row(static_cast<Eigen::Index>(i)).transpose();
    for (int c : index.query(w - hi, w - lo)) {
      if (shape.membership(w - centers.row(c).transpose())) out[i].push_back(c);
    }
  }, exec);
  return out;
}

}  // namespace symcover
