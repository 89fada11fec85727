#pragma once

#include "symcover/body.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

namespace symcover {

/// Execution policy for the data-parallel kernels. Both policies produce
/// identical results; `serial` is the reference used in tests and benchmarks.
enum class Exec { serial, parallel };

/// Thread cap for parallel kernels: SYMCOVER_THREADS if set, otherwise the
/// OpenMP default.
int thread_cap();
void set_thread_cap(int threads);

/// Calls fn(i) for i in [0, count). Iterations must write disjoint outputs.
void for_each_index(std::size_t count, const std::function<void(std::size_t)>& fn, Exec exec);

/// gauge(row) for every row.
Vec gauge_rows(const Body& body, const Points& pts, Exec exec = Exec::parallel);

/// gauge(a·x_i + b·y_i) for every row pair.
Vec gauge_combination(const Body& body, const Points& x, double a, const Points& y, double b,
                      Exec exec = Exec::parallel);

/// 1 where the row lies in the body.
std::vector<std::uint8_t> membership_mask(const Body& body, const Points& pts, Exec exec = Exec::parallel);

/// Number of rows s with x − s in the body.
long count_reflected_hits(const Body& body, VecRef x, const Points& samples, Exec exec = Exec::parallel);

/// Buckets points on a grid over their leading coordinates so that box
/// queries only visit nearby points.
class BoxIndex {
 public:
  BoxIndex(const Points& points, const Vec& cell);
  /// Ascending indices of the points inside [lo, hi], with tolerance 1e-9.
  std::vector<int> query(const Vec& lo, const Vec& hi) const;

 private:
  static constexpr int kKeyDims = 4;
  using Key = std::array<long, kKeyDims>;
  struct KeyHash {
    std::size_t operator()(const Key& k) const;
  };
  Key key_of(const Eigen::Ref<const Vec>& x) const;

  const Points* points_;
  Vec cell_;
  int key_dims_;
  std::unordered_map<Key, std::vector<int>, KeyHash> buckets_;
};

/// For each witness w, the sorted list of center indices c with w − c in
/// `shape` (closed membership).
std::vector<std::vector<int>> incidence_lists(const Body& shape, const Points& witnesses, const Points& centers,
                                              Exec exec = Exec::parallel);

}  // namespace symcover
