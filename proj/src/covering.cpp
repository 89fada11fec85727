#include "symcover/covering.hpp"

#include "symcover/body_json.hpp"
#include "symcover/kernels.hpp"
#include "symcover/lp.hpp"
#include "symcover/rng.hpp"
#include "symcover/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace symcover {

namespace {

std::vector<long> axis_ticks(double lo, double hi, double spacing) {
  std::vector<long> out;
  const long a = static_cast<long>(std::ceil(lo / spacing - 1e-9));
  const long b = static_cast<long>(std::floor(hi / spacing + 1e-9));
  for (long k = a; k <= b; ++k) out.push_back(k);
  return out;
}

double anchored_count(const Vec& lo, const Vec& hi, double spacing) {
  double count = 1.0;
  for (Eigen::Index i = 0; i < lo.size(); ++i) count *= static_cast<double>(axis_ticks(lo[i], hi[i], spacing).size());
  return count;
}

double box_count(const Vec& lo, const Vec& hi, double spacing) {
  double count = 1.0;
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    count *= std::max(1.0, std::ceil((hi[i] - lo[i]) / spacing - 1e-9)) + 1.0;
  }
  return count;
}

// Cartesian product of per-axis coordinate lists.
Points product(const std::vector<std::vector<double>>& axes) {
  const auto n = static_cast<Eigen::Index>(axes.size());
  Eigen::Index total = 1;
  for (const auto& a : axes) total *= static_cast<Eigen::Index>(a.size());
  Points out(total, n);
  std::vector<std::size_t> idx(axes.size(), 0);
  for (Eigen::Index r = 0; r < total; ++r) {
    for (Eigen::Index i = 0; i < n; ++i) out(r, i) = axes[static_cast<std::size_t>(i)][idx[static_cast<std::size_t>(i)]];
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (++idx[i] < axes[i].size()) break;
      idx[i] = 0;
    }
  }
  return out;
}

Points filter_rows(const Points& pts, const std::vector<std::uint8_t>& keep) {
  const long count = std::count(keep.begin(), keep.end(), 1);
  Points out(count, pts.cols());
  long r = 0;
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    if (keep[static_cast<std::size_t>(i)]) out.row(r++) = pts.row(i);
  }
  return out;
}

Points stack_rows(const Points& a, const Points& b) {
  Points out(a.rows() + b.rows(), std::max(a.cols(), b.cols()));
  if (a.rows()) out.topRows(a.rows()) = a;
  if (b.rows()) out.bottomRows(b.rows()) = b;
  return out;
}

Points select_rows(const Points& pts, const std::vector<int>& rows) {
  Points out(static_cast<Eigen::Index>(rows.size()), pts.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = pts.row(rows[i]);
  return out;
}

// For each witness, the centers whose translate of `shape` contains it.
std::vector<std::vector<int>> coverage_lists(const CoverShape& shape, const Points& witnesses, const Points& centers) {
  const auto [lo, hi] = shape.box();
  const BoxIndex index(centers, hi - lo);
  std::vector<std::vector<int>> out(static_cast<std::size_t>(witnesses.rows()));
  for_each_index(out.size(), [&](std::size_t i) {
    const Vec w = witnesses.row(static_cast<Eigen::Index>(i)).transpose();
    for (int c : index.query(w - hi, w - lo)) {
      if (shape.contains(w - centers.row(c).transpose())) out[i].push_back(c);
    }
  }, Exec::parallel);
  return out;
}

std::vector<std::vector<int>> invert(const std::vector<std::vector<int>>& lists, std::size_t targets) {
  std::vector<std::vector<int>> out(targets);
  for (std::size_t w = 0; w < lists.size(); ++w) {
    for (int c : lists[w]) out[static_cast<std::size_t>(c)].push_back(static_cast<int>(w));
  }
  return out;
}

// Reverse-delete: drop centers whose witnesses are all covered twice.
std::vector<int> prune(const std::vector<int>& chosen, const std::vector<std::vector<int>>& witnesses_of,
                       std::size_t witness_count) {
  std::vector<int> count(witness_count, 0);
  for (int c : chosen) {
    for (int w : witnesses_of[static_cast<std::size_t>(c)]) ++count[static_cast<std::size_t>(w)];
  }
  std::vector<bool> keep(chosen.size(), true);
  for (std::size_t k = chosen.size(); k-- > 0;) {
    const auto& ws = witnesses_of[static_cast<std::size_t>(chosen[k])];
    const bool redundant = std::all_of(ws.begin(), ws.end(), [&](int w) { return count[static_cast<std::size_t>(w)] >= 2; });
    if (redundant) {
      keep[k] = false;
      for (int w : ws) --count[static_cast<std::size_t>(w)];
    }
  }
  std::vector<int> out;
  for (std::size_t k = 0; k < chosen.size(); ++k) {
    if (keep[k]) out.push_back(chosen[k]);
  }
  return out;
}

// Indices of sets not strictly dominated: with `keep_supersets` false a set
// that contains another kept set is dropped (implied covering constraint);
// with true a set contained in another is dropped (dominated center).
std::vector<int> undominated(const std::vector<std::vector<int>>& sets, bool keep_supersets) {
  std::vector<int> order(sets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return keep_supersets ? sets[static_cast<std::size_t>(a)].size() > sets[static_cast<std::size_t>(b)].size()
                          : sets[static_cast<std::size_t>(a)].size() < sets[static_cast<std::size_t>(b)].size();
  });
  std::map<std::vector<int>, int> seen;
  std::vector<int> kept;
  for (int i : order) {
    const auto& s = sets[static_cast<std::size_t>(i)];
    if (s.empty() && keep_supersets) continue;
    if (!seen.emplace(s, i).second) continue;
    bool dominated = false;
    for (int k : kept) {
      const auto& t = sets[static_cast<std::size_t>(k)];
      dominated = keep_supersets ? std::includes(t.begin(), t.end(), s.begin(), s.end())
                                 : std::includes(s.begin(), s.end(), t.begin(), t.end());
      if (dominated) break;
    }
    if (!dominated) kept.push_back(i);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

double inradius_of(const Body& b) {
  const double r = b.inradius_estimate();
  if (!(r > 0.0)) throw Error(ErrorKind::EmptyBody, "covering body has no interior");
  return r;
}

Body reflected(const Body& b) { return make_body(shapes::reflection(b.spec_ptr())); }

Body homothet(const Body& b, double s) { return scaled_body(b, s); }

Estimate ratio(const Estimate& num, const Estimate& den, double factor) {
  const double v = factor * num.value / den.value;
  const double rn = num.value > 0 ? num.stderr_ / num.value : 0.0;
  const double rd = den.stderr_ / den.value;
  return {v, std::abs(v) * std::hypot(rn, rd)};
}

}  // namespace

Points anchored_grid(const Vec& lo, const Vec& hi, double spacing) {
  if (!(spacing > 0.0)) throw Error(ErrorKind::DomainError, "grid spacing must be positive");
  std::vector<std::vector<double>> axes;
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    std::vector<double> a;
    for (long k : axis_ticks(lo[i], hi[i], spacing)) a.push_back(static_cast<double>(k) * spacing);
    axes.push_back(std::move(a));
  }
  return product(axes);
}

Points box_grid(const Vec& lo, const Vec& hi, double spacing) {
  if (!(spacing > 0.0)) throw Error(ErrorKind::DomainError, "grid spacing must be positive");
  std::vector<std::vector<double>> axes;
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    const long steps = std::max(1L, static_cast<long>(std::ceil((hi[i] - lo[i]) / spacing - 1e-9)));
    std::vector<double> a;
    for (long k = 0; k <= steps; ++k) a.push_back(k == steps ? hi[i] : lo[i] + (hi[i] - lo[i]) * k / steps);
    axes.push_back(std::move(a));
  }
  return product(axes);
}

WitnessSet cover_witnesses(const Body& a, double inradius, const WitnessOptions& options, std::uint64_t seed) {
  WitnessSet out;
  out.spacing = options.density * inradius;
  if (!(out.spacing > 0.0)) throw Error(ErrorKind::DomainError, "witness spacing must be positive");
  while (box_count(a.box_lo(), a.box_hi(), out.spacing) > static_cast<double>(options.max_grid)) out.spacing *= 1.25;
  const Points grid = box_grid(a.box_lo(), a.box_hi(), out.spacing);
  Points pts = filter_rows(grid, membership_mask(a, grid));
  out.grid_count = pts.rows();
  if (options.random_points > 0) pts = stack_rows(pts, sample_uniform(a, options.random_points, seed).points);
  if (a.vertices() && a.vertices()->rows() <= 4096) pts = stack_rows(pts, *a.vertices());
  out.points = std::move(pts);
  return out;
}

nlohmann::json CoverCertificate::to_json() const {
  nlohmann::json cs = nlohmann::json::array();
  for (Eigen::Index r = 0; r < centers.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < centers.cols(); ++c) row.push_back(centers(r, c));
    cs.push_back(row);
  }
  nlohmann::json out{{"centers", cs},
                     {"body_spec", covering_body ? spec_to_json(*covering_body) : nlohmann::json()},
                     {"verified", verified},
                     {"witness_count", witness_count},
                     {"uncovered_count", uncovered.rows()},
                     {"margin", margin},
                     {"open_interior", open_interior},
                     {"patches", patches}};
  if (covering_summand) out["summand_spec"] = spec_to_json(*covering_summand);
  return out;
}

CoverShape::CoverShape(const CoverCertificate& cert)
    : body_(make_body(cert.covering_body)), open_(cert.open_interior), margin_(cert.margin) {
  if (cert.covering_summand) summand_ = make_body(cert.covering_summand);
  if (open_ && summand_) throw Error(ErrorKind::UnsupportedBodyKind, "open covers by Minkowski sums are not supported");
}

bool CoverShape::contains(VecRef d) const {
  if (summand_) return minkowski_membership(body_, *summand_, d);
  if (open_) return body_.gauge(d) < 1.0 - margin_;
  return body_.membership(d);
}

std::pair<Vec, Vec> CoverShape::box() const {
  if (!summand_) return {body_.box_lo(), body_.box_hi()};
  return {body_.box_lo() + summand_->box_lo(), body_.box_hi() + summand_->box_hi()};
}

Vec CoverShape::anchor() const {
  Vec z = body_.interior_point();
  if (summand_) z += summand_->interior_point();
  return z;
}

CoverCertificate verify_cover(const Body& a, CoverCertificate cert, const WitnessOptions& options,
                              std::uint64_t seed) {
  const CoverShape shape(cert);
  double r = shape.body().inradius_estimate();
  if (cert.covering_summand) r += make_body(cert.covering_summand).inradius_estimate();
  const WitnessSet ws = cover_witnesses(a, r, options, seed);
  cert.witness_count = ws.points.rows();
  cert.witness_spacing = ws.spacing;
  std::vector<std::uint8_t> missed(static_cast<std::size_t>(ws.points.rows()), 0);
  const auto [lo, hi] = shape.box();
  const BoxIndex index(cert.centers, hi - lo);
  for_each_index(missed.size(), [&](std::size_t i) {
    const Vec w = ws.points.row(static_cast<Eigen::Index>(i)).transpose();
    bool hit = false;
    for (int c : index.query(w - hi, w - lo)) {
      if (shape.contains(w - cert.centers.row(c).transpose())) {
        hit = true;
        break;
      }
    }
    missed[i] = hit ? 0 : 1;
  }, Exec::parallel);
  cert.uncovered = filter_rows(ws.points, missed);
  cert.verified = cert.uncovered.rows() == 0 && cert.centers.rows() > 0;
  return cert;
}

PackingResult separation_greedy(const Body& a, const Body& b, const Points& candidates) {
  require_dim(candidates.cols(), a.dim(), "separation_greedy");
  const bool symmetric = b.origin_symmetric();
  std::optional<Body> minus_b;
  if (!symmetric) minus_b = reflected(b);
  // x_i + B and x_j + B are disjoint iff x_i − x_j ∉ B − B.
  auto overlaps = [&](const Vec& d) {
    if (symmetric) return b.membership(0.5 * d);
    return minkowski_membership(b, *minus_b, d);
  };
  std::vector<Vec> accepted;
  for (Eigen::Index r = 0; r < candidates.rows(); ++r) {
    const Vec x = candidates.row(r).transpose();
    if (!a.membership(x)) continue;
    const bool ok = std::none_of(accepted.begin(), accepted.end(), [&](const Vec& y) { return overlaps(x - y); });
    if (ok) accepted.push_back(x);
  }
  PackingResult out;
  out.count = static_cast<long>(accepted.size());
  out.centers.resize(out.count, a.dim());
  for (long i = 0; i < out.count; ++i) out.centers.row(i) = accepted[static_cast<std::size_t>(i)].transpose();
  return out;
}

PackingResult separation_greedy(const Body& a, const Body& b, long attempts, std::uint64_t seed) {
  Points candidates(1, a.dim());
  candidates.row(0) = a.interior_point().transpose();
  if (attempts > 0) candidates = stack_rows(candidates, sample_uniform(a, attempts, seed).points);
  return separation_greedy(a, b, candidates);
}

CoverCertificate cover_greedy(const Body& a, const Body& b, const CoverOptions& options, std::uint64_t seed) {
  require_dim(b.dim(), a.dim(), "cover_greedy");
  const double r = inradius_of(b);
  double step = options.grid_step > 0.0 ? options.grid_step : r / 2.0;
  Vec lo = a.box_lo(), hi = a.box_hi();
  if (!options.centers_in_a) {
    lo -= b.box_hi();
    hi -= b.box_lo();
  }
  bool coarsened = false;
  while (anchored_count(lo, hi, step) > 2e5) {
    step *= 1.25;
    coarsened = true;
  }
  Points candidates = anchored_grid(lo, hi, step);
  if (options.centers_in_a) candidates = filter_rows(candidates, membership_mask(a, candidates));

  CoverCertificate cert;
  cert.covering_body = b.spec_ptr();
  cert.open_interior = options.open_interior;
  cert.margin = options.margin;
  const CoverShape shape(cert);
  const WitnessSet ws = cover_witnesses(a, r, options.witnesses, seed);
  auto lists = coverage_lists(shape, ws.points, candidates);
  // Capping the grid size can strand witnesses; each one is a candidate for itself.
  std::vector<int> stranded;
  for (std::size_t w = 0; w < lists.size(); ++w) {
    if (lists[w].empty()) stranded.push_back(static_cast<int>(w));
  }
  if (coarsened && !stranded.empty()) {
    candidates = stack_rows(candidates, select_rows(ws.points, stranded));
    lists = coverage_lists(shape, ws.points, candidates);
  }
  for (std::size_t w = 0; w < lists.size(); ++w) {
    if (lists[w].empty()) {
      throw Error(ErrorKind::GridTooCoarse, "a witness is not covered by any candidate center; refine the grid");
    }
  }
  const auto of_center = invert(lists, static_cast<std::size_t>(candidates.rows()));

  std::vector<bool> covered(lists.size(), false);
  std::vector<long> gain(of_center.size());
  for (std::size_t c = 0; c < of_center.size(); ++c) gain[c] = static_cast<long>(of_center[c].size());
  std::vector<int> chosen;
  std::size_t remaining = lists.size();
  while (remaining > 0) {
    // The hardest uncovered witness decides which candidates compete.
    std::size_t hardest = lists.size();
    for (std::size_t w = 0; w < lists.size(); ++w) {
      if (!covered[w] && (hardest == lists.size() || lists[w].size() < lists[hardest].size())) hardest = w;
    }
    int best = lists[hardest].front();
    for (int c : lists[hardest]) {
      if (gain[static_cast<std::size_t>(c)] > gain[static_cast<std::size_t>(best)]) best = c;
    }
    chosen.push_back(best);
    for (int w : of_center[static_cast<std::size_t>(best)]) {
      if (covered[static_cast<std::size_t>(w)]) continue;
      covered[static_cast<std::size_t>(w)] = true;
      --remaining;
      for (int c : lists[static_cast<std::size_t>(w)]) --gain[static_cast<std::size_t>(c)];
    }
  }
  cert.centers = select_rows(candidates, prune(chosen, of_center, lists.size()));
  return verify_cover(a, cert, options.witnesses, seed);
}

Estimate minkowski_volume(const Body& a, const Body& b, long m, std::uint64_t seed) {
  require_dim(b.dim(), a.dim(), "minkowski_volume");
  if (a.polygon() && b.polygon() && !a.polygon()->empty() && !b.polygon()->empty()) {
    return {minkowski_sum_2d(*a.polygon(), *b.polygon()).area(), 0.0};
  }
  if (m < 1) throw Error(ErrorKind::DomainError, "sample size must be at least 1");
  const int n = a.dim();
  const Vec lo = a.box_lo() + b.box_lo();
  const Vec hi = a.box_hi() + b.box_hi();
  const long blocks = (m + kSampleBlock - 1) / kSampleBlock;
  std::vector<long> hits(static_cast<std::size_t>(blocks), 0);
  for_each_index(hits.size(), [&](std::size_t blk) {
    Rng rng(derive_seed(seed, blk));
    const long begin = static_cast<long>(blk) * kSampleBlock;
    const long end = std::min(m, begin + kSampleBlock);
    Vec x(n);
    for (long r = begin; r < end; ++r) {
      for (int i = 0; i < n; ++i) x[i] = rng.uniform(lo[i], hi[i]);
      hits[blk] += minkowski_membership(a, b, x) ? 1 : 0;
    }
  }, Exec::parallel);
  const double total = static_cast<double>(std::accumulate(hits.begin(), hits.end(), 0L));
  const double p = total / static_cast<double>(m);
  const double box = (hi - lo).prod();
  return {box * p, box * std::sqrt(p * (1.0 - p) / static_cast<double>(m))};
}

VolumeBound nbar_volume_bound(const Body& a, const Body& b, long m, std::uint64_t seed) {
  b.gauge(Vec::Zero(b.dim()));  // OriginNotInterior check
  const Body sym = symmetric_intersection(b, Vec::Zero(b.dim()));
  const Body half = homothet(sym, 0.5);
  const Estimate num = minkowski_volume(a, half, m, derive_seed(seed, 1));
  const Estimate den = volume_of(sym, m, derive_seed(seed, 2));
  return {ratio(num, den, std::ldexp(1.0, a.dim()))};
}

VolumeBound nomega_volume_bound(const Body& k, const Body& t, long m, std::uint64_t seed) {
  const Estimate num = minkowski_volume(k, reflected(t), m, derive_seed(seed, 1));
  const Estimate den = volume_of(t, m, derive_seed(seed, 2));
  return {ratio(num, den, 1.0)};
}

VolumeBound packing_volume_bound(const Body& a, const Body& b, long m, std::uint64_t seed) {
  const Estimate num = minkowski_volume(a, b, m, derive_seed(seed, 1));
  const Estimate den = volume_of(b, m, derive_seed(seed, 2));
  return {ratio(num, den, 1.0)};
}

FractionalCover fractional_cover_lp(const Body& k, const Body& t, const FractionalOptions& options,
                                    std::uint64_t seed) {
  require_dim(t.dim(), k.dim(), "fractional_cover_lp");
  const int n = k.dim();
  const double r = inradius_of(t);
  double sc = options.center_spacing > 0.0 ? options.center_spacing : r / 2.0;
  sc = std::min(sc, 2.0 * r / std::sqrt(static_cast<double>(n)));
  double sw = options.witness_spacing > 0.0 ? options.witness_spacing : r / 4.0;

  const Vec clo = k.box_lo() - t.box_hi(), chi = k.box_hi() - t.box_lo();
  bool coarse_centers = false;
  while (anchored_count(clo, chi, sc) > static_cast<double>(options.max_centers)) {
    sc *= 1.25;
    coarse_centers = true;
  }
  const Points grid_centers = anchored_grid(clo, chi, sc);
  FractionalCover out;
  out.center_spacing = sc;
  out.grid_centers = grid_centers.rows();
  // Share of the center box a witness query touches through the box index.
  const double reach = (t.box_hi() - t.box_lo()).cwiseQuotient(chi - clo).cwiseMin(1.0).prod();
  // A coarsened grid cannot reach every witness, so random witnesses join
  // the grid ones and each witness also gets the translate of T centered on it.
  long random = options.random_witnesses;
  if (coarse_centers && random == 0) random = options.fallback_random_witnesses;
  const Vec anchor = t.interior_point();

  Points witnesses, centers;
  std::vector<std::vector<int>> lists;
  std::vector<int> rows_kept, cols_kept;
  std::vector<std::vector<int>> center_sets;
  while (true) {
    if (out.coarsenings > 80) throw Error(ErrorKind::DomainError, "cover LP does not fit its incidence budget");
    if (box_count(k.box_lo(), k.box_hi(), sw) > static_cast<double>(options.max_centers)) {
      sw *= 1.25;
      ++out.coarsenings;
      continue;
    }
    const Points grid = box_grid(k.box_lo(), k.box_hi(), sw);
    witnesses = filter_rows(grid, membership_mask(k, grid));
    if (k.vertices() && k.vertices()->rows() <= 4096) witnesses = stack_rows(witnesses, *k.vertices());
    if (random > 0) witnesses = stack_rows(witnesses, sample_uniform(k, random, seed).points);
    // Dominance reduction is quadratic, so oversized witness sets are skipped outright.
    if (witnesses.rows() > 2 * options.max_lp_cols) {
      sw *= 1.25;
      random = random * 4 / 5;
      ++out.coarsenings;
      continue;
    }
    Points all_centers = grid_centers;
    if (coarse_centers) all_centers = stack_rows(all_centers, witnesses.rowwise() - anchor.transpose());
    const double tests = static_cast<double>(witnesses.rows()) * static_cast<double>(all_centers.rows()) * reach;
    if (tests > static_cast<double>(options.max_incidence)) {
      sw *= 1.25;
      random = random * 4 / 5;
      ++out.coarsenings;
      continue;
    }
    const auto full = incidence_lists(t, witnesses, all_centers);
    // Keep only centers that cover something.
    std::vector<int> used;
    std::vector<int> remap(static_cast<std::size_t>(all_centers.rows()), -1);
    for (const auto& l : full) {
      for (int c : l) {
        if (remap[static_cast<std::size_t>(c)] < 0) {
          remap[static_cast<std::size_t>(c)] = 0;
          used.push_back(c);
        }
      }
    }
    std::sort(used.begin(), used.end());
    for (std::size_t i = 0; i < used.size(); ++i) remap[static_cast<std::size_t>(used[i])] = static_cast<int>(i);
    centers = select_rows(all_centers, used);
    lists.assign(full.size(), {});
    for (std::size_t w = 0; w < full.size(); ++w) {
      if (full[w].empty()) throw Error(ErrorKind::UncoverableWitness, "a witness lies in no candidate translate");
      for (int c : full[w]) lists[w].push_back(remap[static_cast<std::size_t>(c)]);
    }

    // Dominance reduction: superset witness rows are implied, subset center
    // columns are never needed.
    rows_kept.resize(lists.size());
    std::iota(rows_kept.begin(), rows_kept.end(), 0);
    cols_kept.resize(static_cast<std::size_t>(centers.rows()));
    std::iota(cols_kept.begin(), cols_kept.end(), 0);
    for (int round = 0; round < 6; ++round) {
      std::vector<std::vector<int>> row_sets;
      std::vector<int> col_pos(static_cast<std::size_t>(centers.rows()), -1);
      for (std::size_t j = 0; j < cols_kept.size(); ++j) col_pos[static_cast<std::size_t>(cols_kept[j])] = static_cast<int>(j);
      for (int w : rows_kept) {
        std::vector<int> s;
        for (int c : lists[static_cast<std::size_t>(w)]) {
          if (col_pos[static_cast<std::size_t>(c)] >= 0) s.push_back(col_pos[static_cast<std::size_t>(c)]);
        }
        row_sets.push_back(std::move(s));
      }
      const std::vector<int> keep_rows = undominated(row_sets, false);
      std::vector<std::vector<int>> col_sets(cols_kept.size());
      for (std::size_t i = 0; i < keep_rows.size(); ++i) {
        for (int j : row_sets[static_cast<std::size_t>(keep_rows[i])]) col_sets[static_cast<std::size_t>(j)].push_back(static_cast<int>(i));
      }
      const std::vector<int> keep_cols = undominated(col_sets, true);
      const bool stable = keep_rows.size() == rows_kept.size() && keep_cols.size() == cols_kept.size();
      std::vector<int> nr, nc;
      for (int i : keep_rows) nr.push_back(rows_kept[static_cast<std::size_t>(i)]);
      for (int j : keep_cols) nc.push_back(cols_kept[static_cast<std::size_t>(j)]);
      rows_kept = std::move(nr);
      cols_kept = std::move(nc);
      if (stable) break;
    }
    if (static_cast<long>(cols_kept.size()) <= options.max_lp_rows &&
        static_cast<long>(rows_kept.size()) <= options.max_lp_cols) {
      break;
    }
    // Shrink the witness set roughly in proportion to the overshoot.
    const double over = std::max(static_cast<double>(cols_kept.size()) / static_cast<double>(options.max_lp_rows),
                                 static_cast<double>(rows_kept.size()) / static_cast<double>(options.max_lp_cols));
    const double shrink = std::clamp(0.9 / over, 0.1, 0.8);
    sw *= std::pow(shrink, -1.0 / n);
    random = static_cast<long>(static_cast<double>(random) * shrink);
    ++out.coarsenings;
  }
  out.witness_spacing = sw;
  out.witnesses = witnesses;
  out.reduced_centers = static_cast<long>(cols_kept.size());
  out.reduced_witnesses = static_cast<long>(rows_kept.size());

  // Dual form: max Σ y_w subject to Σ_{w covered by c} y_w ≤ 1 per center.
  std::vector<int> col_pos(static_cast<std::size_t>(centers.rows()), -1);
  for (std::size_t j = 0; j < cols_kept.size(); ++j) col_pos[static_cast<std::size_t>(cols_kept[j])] = static_cast<int>(j);
  LinearProgram lp;
  const auto nc = static_cast<Eigen::Index>(cols_kept.size());
  const auto nw = static_cast<Eigen::Index>(rows_kept.size());
  lp.objective = Vec::Ones(nw);
  lp.a_ub = Mat::Zero(nc, nw);
  // A tiny perturbation of the right-hand side breaks the heavy degeneracy of
  // 0/1 covering programs; the weights are rechecked below anyway.
  lp.b_ub = Vec::Ones(nc);
  Rng perturb(derive_seed(seed, 7));
  for (Eigen::Index j = 0; j < nc; ++j) lp.b_ub[j] += 1e-7 * perturb.uniform();
  for (Eigen::Index i = 0; i < nw; ++i) {
    for (int c : lists[static_cast<std::size_t>(rows_kept[static_cast<std::size_t>(i)])]) {
      if (col_pos[static_cast<std::size_t>(c)] >= 0) lp.a_ub(col_pos[static_cast<std::size_t>(c)], i) = 1.0;
    }
  }
  // The perturbation turns degenerate pivots into tiny improvements, so stop
  // once the repaired duals certify a relative gap below 1e-6.
  const double b_max = lp.b_ub.maxCoeff();
  LpOptions lo;
  lo.accept = [&](double objective, const Vec& duals) {
    const Vec w = duals.cwiseMax(0.0);
    const double cover = (lp.a_ub.transpose() * w).minCoeff();
    if (!(cover > 0.0)) return false;
    return w.sum() / cover <= (objective / b_max) * (1.0 + 1e-6);
  };
  const LpResult res = solve_lp(lp, lo);
  if (res.status == LpStatus::iteration_limit) throw Error(ErrorKind::SolverStall, "cover LP hit its iteration cap");
  if (res.status != LpStatus::optimal) throw Error(ErrorKind::SolverStall, "cover LP did not reach an optimum");
  // Shrinking y back into the unperturbed constraints keeps it a valid lower bound.
  out.dual_value = res.objective / b_max;

  Vec weight = Vec::Zero(centers.rows());
  for (Eigen::Index j = 0; j < nc; ++j) {
    const double v = res.ub_duals[j];
    if (v > 1e-12) weight[cols_kept[static_cast<std::size_t>(j)]] = v;
  }
  // Independent feasibility check over every witness and the full incidence.
  auto min_coverage = [&](const Vec& wt) {
    double lowest = std::numeric_limits<double>::infinity();
    for (const auto& l : lists) {
      double s = 0.0;
      for (int c : l) s += wt[c];
      lowest = std::min(lowest, s);
    }
    return lowest;
  };
  double cov = min_coverage(weight);
  if (cov > 0.0 && cov < 1.0) {
    weight /= cov;
    cov = min_coverage(weight);
  }
  out.min_coverage = cov;
  out.feasibility_slack = std::max(0.0, 1.0 - cov);

  std::vector<int> positive;
  for (Eigen::Index c = 0; c < weight.size(); ++c) {
    if (weight[c] > 0.0) positive.push_back(static_cast<int>(c));
  }
  out.centers = select_rows(centers, positive);
  out.weights.resize(static_cast<Eigen::Index>(positive.size()));
  for (std::size_t i = 0; i < positive.size(); ++i) out.weights[static_cast<Eigen::Index>(i)] = weight[positive[i]];
  out.total_weight = out.weights.sum();
  return out;
}

RoundResult round_cover(const Body& k, const Body& t1, const Body& t2, const FractionalCover& fc,
                        const RoundOptions& options, std::uint64_t seed) {
  if (fc.weights.size() == 0) throw Error(ErrorKind::DomainError, "fractional cover has no weighted centers");
  RoundResult out;
  CoverCertificate cert;
  if (options.covering_body) {
    cert.covering_body = options.covering_body->spec_ptr();
  } else {
    cert.covering_body = t1.spec_ptr();
    cert.covering_summand = t2.spec_ptr();
  }
  const CoverShape shape(cert);
  const double nbar = std::max(options.nbar, 1.0);
  out.rhs = fc.total_weight * (1.0 + std::log(nbar));
  out.draws = static_cast<long>(std::ceil(out.rhs - 1e-9));

  Rng rng(derive_seed(seed, 1));
  std::vector<double> cumulative(static_cast<std::size_t>(fc.weights.size()));
  std::partial_sum(fc.weights.begin(), fc.weights.end(), cumulative.begin());
  std::vector<int> drawn;
  for (long i = 0; i < out.draws; ++i) {
    const double u = rng.uniform() * cumulative.back();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    drawn.push_back(static_cast<int>(std::min<std::ptrdiff_t>(it - cumulative.begin(), fc.weights.size() - 1)));
  }
  std::sort(drawn.begin(), drawn.end());
  drawn.erase(std::unique(drawn.begin(), drawn.end()), drawn.end());
  out.distinct = static_cast<long>(drawn.size());
  Points centers = select_rows(fc.centers, drawn);

  double r = shape.body().inradius_estimate();
  if (cert.covering_summand) r += t2.inradius_estimate();
  const WitnessSet ws = cover_witnesses(k, r, options.witnesses, derive_seed(seed, 2));
  auto lists = coverage_lists(shape, ws.points, centers);

  // Greedy patches: a translate anchored at the first uncovered witness.
  const Vec anchor = shape.anchor();
  std::vector<Vec> patches;
  for (std::size_t w = 0; w < lists.size(); ++w) {
    if (!lists[w].empty()) continue;
    const Vec x = ws.points.row(static_cast<Eigen::Index>(w)).transpose();
    bool hit = false;
    for (const Vec& p : patches) hit = hit || shape.contains(x - p);
    if (!hit) patches.push_back(x - anchor);
  }
  out.patches = static_cast<int>(patches.size());
  if (!patches.empty()) {
    Points extra(static_cast<Eigen::Index>(patches.size()), k.dim());
    for (std::size_t i = 0; i < patches.size(); ++i) extra.row(static_cast<Eigen::Index>(i)) = patches[i].transpose();
    centers = stack_rows(centers, extra);
    lists = coverage_lists(shape, ws.points, centers);
  }
  const auto of_center = invert(lists, static_cast<std::size_t>(centers.rows()));
  std::vector<int> all(static_cast<std::size_t>(centers.rows()));
  std::iota(all.begin(), all.end(), 0);
  cert.centers = select_rows(centers, prune(all, of_center, lists.size()));
  cert.patches = out.patches;
  out.certificate = verify_cover(k, cert, options.witnesses, derive_seed(seed, 2));
  out.certificate.patches = out.patches;
  return out;
}

HadwigerResult hadwiger_pipeline(const Body& k, const HadwigerOptions& options, std::uint64_t seed) {
  const int n = k.dim();
  const double lambda = options.lambda;
  if (!(lambda > 0.0 && lambda < 1.0)) throw Error(ErrorKind::DomainError, "lambda must lie in (0, 1)");
  double alpha = options.alpha > 0.0 ? options.alpha : 1.0 - 1.0 / n;
  if (n == 1 && options.alpha <= 0.0) alpha = 0.5;
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::DomainError, "alpha must lie in (0, 1)");

  // Centering check.
  if (const auto b = k.exact_barycenter()) {
    if (b->cwiseAbs().maxCoeff() > 1e-9 * (1.0 + k.bounding_radius())) {
      throw Error(ErrorKind::NotCentered, "body barycenter is not at the origin");
    }
  } else {
    const Moments mom = estimate_moments(sample_uniform(k, options.m, derive_seed(seed, 9)));
    for (int i = 0; i < n; ++i) {
      if (std::abs(mom.barycenter[i]) > 3.0 * mom.barycenter_stderr[i] + 1e-12) {
        throw Error(ErrorKind::NotCentered, "estimated barycenter differs from 0 by more than 3 sigma");
      }
    }
  }

  HadwigerResult out;
  BoundLedger& L = out.ledger;
  const double dn = static_cast<double>(n);
  out.kb = kb_measure(k, options.kb, derive_seed(seed, 1));
  const double kb = out.kb.value.value;
  const double kb_low = std::max(out.kb.value.lower(), 1e-300);
  L.add("kb_measure", kb, Relation::info, 0.0, 0.0, "kb_definition");
  L.add("kb_times_2n", kb * std::ldexp(1.0, n), Relation::ge, 1.0, 3.0 * out.kb.value.stderr_ * std::ldexp(1.0, n),
        "kb_lower_bound");

  const double frac_bound = std::pow((1.0 + lambda) / lambda, dn) / kb_low;
  L.add("fractional_volume_bound", frac_bound, Relation::info, lambda, 0.0, "fractional_volume_bound");
  for (double l : options.lambda_sweep) {
    L.add("lambda_sweep_" + std::to_string(l).substr(0, 4), std::pow((1.0 + l) / l, dn) / kb_low, Relation::info, l, 0.0,
          "fractional_volume_bound");
  }

  const Body t1 = homothet(k, alpha * lambda);
  const Body t2 = homothet(k, (1.0 - alpha) * lambda);
  const Body sum = homothet(k, lambda);
  out.fractional = fractional_cover_lp(k, t1, options.lp, derive_seed(seed, 2));
  const double t1_chain = std::pow((1.0 + alpha * lambda) / (alpha * lambda), dn) / kb_low;
  L.add("lp_weight_vs_kb_chain", out.fractional.total_weight, Relation::le, t1_chain, 0.0, "fractional_volume_bound");
  const VolumeBound nomega = nomega_volume_bound(k, t1, options.m, derive_seed(seed, 3));
  L.add("lp_weight_vs_volume_ratio", out.fractional.total_weight, Relation::le, nomega.value.value,
        3.0 * nomega.value.stderr_, "fractional_volume_ratio");
  L.add("lp_feasibility", out.fractional.min_coverage, Relation::ge, 1.0, 1e-9, "fractional_cover_definition");

  const VolumeBound nbar = nbar_volume_bound(k, t2, options.m, derive_seed(seed, 4));
  out.nbar_bound = std::max(nbar.upper(), 1.0);
  L.add("nbar_volume_bound", nbar.value.value, Relation::info, nbar.upper(), 0.0, "separation_volume_bound");

  RoundOptions ro;
  ro.nbar = out.nbar_bound;
  ro.covering_body = sum;
  ro.witnesses = options.witnesses;
  out.rounded = round_cover(k, t1, t2, out.fractional, ro, derive_seed(seed, 5));
  const double size = static_cast<double>(out.rounded.certificate.size());
  const double log_term = 1.0 + std::log(out.nbar_bound);
  const double base = std::pow((1.0 + alpha * lambda) / (alpha * lambda), dn);
  L.add("cover_verified", out.rounded.certificate.verified ? 1.0 : 0.0, Relation::ge, 1.0, 0.0, "cover_definition");
  L.add("cover_vs_rounding_bound", size, Relation::le, out.rounded.rhs, 0.0, "fractional_to_integral_rounding");
  L.add("draws_vs_rounding_bound", static_cast<double>(out.rounded.distinct), Relation::info, out.rounded.rhs, 0.0,
        "fractional_to_integral_rounding");
  L.add("rounding_patches", out.rounded.patches, Relation::info, 0.0, 0.0, "fractional_to_integral_rounding");
  L.add("cover_vs_chain_bound", size, Relation::le, base * log_term / kb_low, 0.0, "covering_chain");
  L.add("cover_vs_chain_bound_with_2n", size, Relation::le, base * std::ldexp(1.0, n) * log_term / kb_low, 0.0,
        "covering_chain");
  L.add("hadwiger_shape_4n_over_2n_kb", std::ldexp(1.0, 2 * n) / (std::ldexp(1.0, n) * kb), Relation::info,
        std::ldexp(1.0, n), 0.0, "hadwiger_comparison");
  L.add("cover_size_vs_2n", size, Relation::info, std::ldexp(1.0, n), 0.0, "hadwiger_comparison");
  L.add("alpha", alpha, Relation::info, lambda, 0.0, "covering_chain");
  return out;
}

}  // namespace symcover
