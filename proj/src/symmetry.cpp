#include "symcover/symmetry.hpp"

#include "symcover/rng.hpp"
#include "symcover/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace symcover {

namespace {

double exact_ratio_2d(const Body& body, const Vec& x) {
  const Polygon2D& p = *body.polygon();
  const Polygon2D q = p.reflected().translated(Point2(x[0], x[1]));
  return polygon_intersect_2d(p, q).area() / p.area();
}

bool has_exact_path(const Body& body) { return body.polygon() && !body.polygon()->empty(); }

bool outside_double(const Body& body, const Vec& x) { return !body.membership(0.5 * x); }

Estimate ratio_from(const Body& body, const Vec& x, const SampleBatch& batch) {
  if (outside_double(body, x)) return {0.0, 0.0};
  const long m = batch.size();
  Vec hits(m);
  for (long i = 0; i < m; ++i) hits[i] = body.membership(x - batch.points.row(i).transpose()) ? 1.0 : 0.0;
  return mean_estimate(hits, batch.method);
}

}  // namespace

Estimate sym_ratio(const Body& body, VecRef x, long m, std::uint64_t seed) {
  require_dim(x.size(), body.dim(), "sym_ratio");
  const Vec xv = x;
  if (has_exact_path(body)) return {exact_ratio_2d(body, xv), 0.0};
  if (outside_double(body, xv)) return {0.0, 0.0};
  const SampleBatch batch = sample_uniform(body, m, seed);
  if (batch.method == SamplerMethod::hit_and_run) return ratio_from(body, xv, batch);
  const long hits = count_reflected_hits(body, xv, batch.points);
  const double p = static_cast<double>(hits) / static_cast<double>(m);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(m))};
}

Estimate sym_vol(const Body& body, VecRef x, long m, std::uint64_t seed) {
  const Estimate vol = volume_of(body, m, derive_seed(seed, 7));
  const Estimate r = sym_ratio(body, x, m, seed);
  const double rel = vol.value > 0 ? vol.stderr_ / vol.value : 0.0;
  return {vol.value * r.value, std::hypot(vol.value * r.stderr_, r.value * vol.value * rel)};
}

KbResult kb_measure(const Body& body, const KbOptions& options, std::uint64_t seed) {
  const bool exact = has_exact_path(body);
  const double scale = std::max(body.bounding_radius(), 1e-12);

  // Common random numbers for the whole search keep the objective fixed.
  SampleBatch search;
  std::function<double(const Vec&)> ratio;
  if (exact) {
    ratio = [&](const Vec& x) { return exact_ratio_2d(body, x); };
  } else {
    search = sample_uniform(body, options.search_m, derive_seed(seed, 1));
    ratio = [&](const Vec& x) {
      if (outside_double(body, x)) return 0.0;
      return static_cast<double>(count_reflected_hits(body, x, search.points, Exec::serial)) /
             static_cast<double>(search.size());
    };
  }
  auto objective = [&](const Vec& x) { return -std::log(ratio(x) + 1e-300); };

  std::vector<Vec> starts;
  if (const auto b = body.exact_barycenter()) starts.push_back(2.0 * *b);
  starts.push_back(2.0 * body.interior_point());
  if (!exact) starts.push_back(2.0 * Vec(search.points.colwise().mean().transpose()));
  const SampleBatch extra = sample_uniform(body, std::max(options.starts, 1), derive_seed(seed, 3));
  for (long i = 0; static_cast<int>(starts.size()) < options.starts && i < extra.size(); ++i) {
    starts.push_back(2.0 * Vec(extra.points.row(i).transpose()));
  }
  starts.resize(std::min<std::size_t>(starts.size(), static_cast<std::size_t>(std::max(options.starts, 1))));

  DirectSearchOptions opts = options.search;
  opts.initial_step = options.search.initial_step * scale;
  opts.xtol = options.search.xtol * scale;

  KbResult out;
  out.exact = exact;
  std::vector<DirectSearchResult> results;
  for (const Vec& s : starts) {
    DirectSearchResult r = nelder_mead_minimize(objective, s, opts);
    out.evals += r.evals;
    if (!r.converged) out.budget_exhausted = true;
    results.push_back(std::move(r));
  }

  if (exact) {
    const auto best = std::min_element(results.begin(), results.end(),
                                       [](const auto& a, const auto& b) { return a.value < b.value; });
    out.x_star = best->x;
    out.value = {exact_ratio_2d(body, out.x_star), 0.0};
    return out;
  }
  // Pick the incumbent on a fresh sample, then report it on another (2m).
  const SampleBatch pick = sample_uniform(body, options.m, derive_seed(seed, 4));
  double best_val = -1.0;
  for (const auto& r : results) {
    const double v = ratio_from(body, r.x, pick).value;
    if (v > best_val) {
      best_val = v;
      out.x_star = r.x;
    }
  }
  const SampleBatch fresh = sample_uniform(body, 2 * options.m, derive_seed(seed, 5));
  out.value = ratio_from(body, out.x_star, fresh);
  return out;
}

MpResult milman_pajor(const Body& body, long m, std::uint64_t seed) {
  const int n = body.dim();
  MpResult out;
  if (const auto b = body.exact_barycenter()) {
    out.barycenter = *b;
    out.exact_center = true;
    if (has_exact_path(body)) {
      out.value = {exact_ratio_2d(body, 2.0 * out.barycenter), 0.0};
      return out;
    }
    out.value = sym_ratio(body, 2.0 * out.barycenter, m, derive_seed(seed, 1));
    return out;
  }
  const SampleBatch centers = sample_uniform(body, m, derive_seed(seed, 2));
  const Moments mom = estimate_moments(centers);
  out.barycenter = mom.barycenter;
  if (has_exact_path(body)) {
    out.value = {exact_ratio_2d(body, 2.0 * out.barycenter), 0.0};
  } else {
    const SampleBatch batch = sample_uniform(body, m, derive_seed(seed, 3));
    out.value = ratio_from(body, 2.0 * out.barycenter, batch);
    // Fold in the barycenter error through a central difference on the
    // same sample.
    double folded = out.value.stderr_ * out.value.stderr_;
    for (int i = 0; i < n; ++i) {
      const double h = std::max(3.0 * mom.barycenter_stderr[i], 1e-3 * body.bounding_radius());
      Vec e = Vec::Zero(n);
      e[i] = h;
      const double up = ratio_from(body, 2.0 * (out.barycenter + e), batch).value;
      const double down = ratio_from(body, 2.0 * (out.barycenter - e), batch).value;
      const double g = (up - down) / (2.0 * h);
      folded += g * g * mom.barycenter_stderr[i] * mom.barycenter_stderr[i];
    }
    out.value.stderr_ = std::sqrt(folded);
  }
  return out;
}

BoundLedger symmetry_ledger(int n, const KbResult& kb, const MpResult& mp) {
  BoundLedger ledger;
  const double pow2 = std::ldexp(1.0, n);
  const double rn = std::sqrt(static_cast<double>(n));
  ledger.add("kb_times_2n", kb.value.value * pow2, Relation::ge, 1.0, 3.0 * kb.value.stderr_ * pow2, "kb_lower_bound");
  ledger.add("mp_times_2n", mp.value.value * pow2, Relation::ge, 1.0, 3.0 * mp.value.stderr_ * pow2,
             "milman_pajor_bound");
  ledger.add("mp_le_kb", mp.value.value, Relation::le, kb.value.value,
             3.0 * std::hypot(mp.value.stderr_, kb.value.stderr_) + 1e-12, "kb_definition");
  const auto exponent = [&](double r) {
    return r > 0 ? std::log(r * pow2) / rn : -std::numeric_limits<double>::infinity();
  };
  ledger.add("implied_c_kb", exponent(kb.value.value), Relation::info, 0.0, 0.0, "symmetry_exponent");
  ledger.add("implied_c_mp", exponent(mp.value.value), Relation::info, 0.0, 0.0, "symmetry_exponent");
  return ledger;
}

SymmetryResult analyze_symmetry(const Body& body, const KbOptions& options, std::uint64_t seed) {
  SymmetryResult out;
  out.kb = kb_measure(body, options, derive_seed(seed, 11));
  out.mp = milman_pajor(body, options.m, derive_seed(seed, 12));
  out.ledger = symmetry_ledger(body.dim(), out.kb, out.mp);
  return out;
}

}  // namespace symcover
