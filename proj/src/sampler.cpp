#include "symcover/sampler.hpp"

#include "symcover/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace symcover {

namespace {

constexpr double kMinRejectionRate = 0.02;
constexpr int kPilotDraws = 4000;
constexpr int kBatchCount = 32;
constexpr int kMaxRoundings = 3;
constexpr double kRoundedAnisotropy = 0.05;
constexpr int kIsotropicThinning = 4;

void require_full(const Body& body) {
  if (body.status() != BodyStatus::full) throw Error(ErrorKind::EmptyBody, "sampling needs a body with interior");
}

void require_m(long m) {
  if (m < 1) throw Error(ErrorKind::DomainError, "sample size must be at least 1");
}

double box_volume(const Body& body) { return (body.box_hi() - body.box_lo()).prod(); }

void box_point(const Body& body, Rng& rng, Vec& x) {
  const Vec& lo = body.box_lo();
  const Vec& hi = body.box_hi();
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.uniform(lo[i], hi[i]);
}

WalkParams resolve(const WalkParams& w, int n) {
  return {w.burn_in >= 0 ? w.burn_in : 10 * n * n, w.thinning >= 1 ? w.thinning : n};
}

void walk_step(const Body& body, Rng& rng, Vec& x) {
  const int n = body.dim();
  for (int attempt = 0; attempt < 16; ++attempt) {
    const Vec d = rng.unit_vector(n);
    const auto [lo, hi] = body.chord(x, d);
    if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) continue;
    const Vec next = x + rng.uniform(lo, hi) * d;
    if (body.membership(next)) {
      x = next;
      return;
    }
  }
}

}  // namespace

std::string_view to_string(SamplerMethod method) {
  switch (method) {
    case SamplerMethod::direct: return "direct";
    case SamplerMethod::rejection: return "rejection";
    case SamplerMethod::hit_and_run: return "hit_and_run";
  }
  return "unknown";
}

SamplerMethod sampler_method(const Body& body, const SampleOptions& options) {
  require_full(body);
  if (options.force_walk) return SamplerMethod::hit_and_run;
  if (body.has_direct_sampler()) return SamplerMethod::direct;
  Rng rng(derive_seed(body.id(), 0x9e11));
  Vec x(body.dim());
  int hits = 0;
  for (int i = 0; i < kPilotDraws; ++i) {
    box_point(body, rng, x);
    hits += body.membership(x) ? 1 : 0;
  }
  return hits >= kMinRejectionRate * kPilotDraws ? SamplerMethod::rejection : SamplerMethod::hit_and_run;
}

SampleBatch sample_uniform(const Body& body, long m, std::uint64_t seed, const SampleOptions& options) {
  require_m(m);
  require_full(body);
  const int n = body.dim();
  SampleBatch batch;
  batch.points.resize(m, n);
  batch.body_id = body.id();
  batch.seed = seed;
  batch.method = sampler_method(body, options);
  const WalkParams walk = resolve(options.walk, n);
  if (batch.method == SamplerMethod::hit_and_run) batch.walk = walk;
  else batch.walk = {0, 0};

  const long blocks = (m + kSampleBlock - 1) / kSampleBlock;
  for_each_index(static_cast<std::size_t>(blocks), [&](std::size_t b) {
    Rng rng(derive_seed(seed, b));
    const long begin = static_cast<long>(b) * kSampleBlock;
    const long end = std::min(m, begin + kSampleBlock);
    Vec x(n);
    switch (batch.method) {
      case SamplerMethod::direct:
        for (long r = begin; r < end; ++r) {
          body.sample_direct(rng, x);
          batch.points.row(r) = x.transpose();
        }
        break;
      case SamplerMethod::rejection:
        for (long r = begin; r < end; ++r) {
          do {
            box_point(body, rng, x);
          } while (!body.membership(x));
          batch.points.row(r) = x.transpose();
        }
        break;
      case SamplerMethod::hit_and_run:
        x = body.interior_point();
        for (int s = 0; s < walk.burn_in; ++s) walk_step(body, rng, x);
        for (long r = begin; r < end; ++r) {
          for (int s = 0; s < walk.thinning; ++s) walk_step(body, rng, x);
          batch.points.row(r) = x.transpose();
        }
        break;
    }
  }, options.exec);
  return batch;
}

Estimate mean_estimate(const Vec& values, SamplerMethod method) {
  const Eigen::Index m = values.size();
  if (m == 0) throw Error(ErrorKind::TooFewSamples, "mean of an empty sample");
  const double mean = values.mean();
  if (m == 1) return {mean, 0.0};
  if (method != SamplerMethod::hit_and_run || m < 2 * kBatchCount) {
    const double var = (values.array() - mean).square().sum() / static_cast<double>(m - 1);
    return {mean, std::sqrt(var / static_cast<double>(m))};
  }
  const Eigen::Index size = m / kBatchCount;
  Vec means(kBatchCount);
  for (int k = 0; k < kBatchCount; ++k) means[k] = values.segment(k * size, size).mean();
  const double bm = means.mean();
  const double var = (means.array() - bm).square().sum() / (kBatchCount - 1);
  return {mean, std::sqrt(var / kBatchCount)};
}

Estimate estimate_volume(const Body& body, long m, std::uint64_t seed, Exec exec) {
  require_m(m);
  if (body.is_empty()) throw Error(ErrorKind::EmptyBody, "volume of an empty body");
  if (body.status() == BodyStatus::degenerate) return {0.0, 0.0};
  if (body.polygon() && !body.polygon()->empty()) return {body.polygon()->area(), 0.0};
  const int n = body.dim();
  const long blocks = (m + kSampleBlock - 1) / kSampleBlock;
  std::vector<long> hits(static_cast<std::size_t>(blocks), 0);
  for_each_index(hits.size(), [&](std::size_t b) {
    Rng rng(derive_seed(seed, b));
    const long begin = static_cast<long>(b) * kSampleBlock;
    const long end = std::min(m, begin + kSampleBlock);
    Vec x(n);
    for (long r = begin; r < end; ++r) {
      box_point(body, rng, x);
      hits[b] += body.membership(x) ? 1 : 0;
    }
  }, exec);
  long total = 0;
  for (long h : hits) total += h;
  const double p = static_cast<double>(total) / static_cast<double>(m);
  const double box = box_volume(body);
  return {box * p, box * std::sqrt(p * (1.0 - p) / static_cast<double>(m))};
}

Estimate volume_of(const Body& body, long m, std::uint64_t seed) {
  if (const auto v = body.exact_volume()) return {*v, 0.0};
  return estimate_volume(body, m, seed);
}

Moments estimate_moments(const SampleBatch& batch) {
  const long m = batch.size();
  const int n = batch.dim();
  if (m < n + 1) throw Error(ErrorKind::TooFewSamples, "moments need at least n + 1 samples");
  Moments out;
  out.m = m;
  out.barycenter = batch.points.colwise().mean().transpose();
  const Mat centered = batch.points.rowwise() - out.barycenter.transpose();
  out.covariance = (centered.transpose() * centered) / static_cast<double>(m - 1);
  out.barycenter_stderr.resize(n);
  out.covariance_stderr.resize(n, n);
  for (int i = 0; i < n; ++i) {
    out.barycenter_stderr[i] = mean_estimate(centered.col(i), batch.method).stderr_;
    for (int j = i; j < n; ++j) {
      const Vec prod = centered.col(i).cwiseProduct(centered.col(j));
      const double se = mean_estimate(prod, batch.method).stderr_;
      out.covariance_stderr(i, j) = se;
      out.covariance_stderr(j, i) = se;
    }
  }
  return out;
}

IsotropicResult to_isotropic(const Body& body, long m, std::uint64_t seed) {
  require_full(body);
  const int n = body.dim();
  if (m < 2 * (n + 1)) throw Error(ErrorKind::TooFewSamples, "to_isotropic needs more samples");

  // Walk samples of a skewed body mix slowly, so round it first: cur = pre·body + pre_shift.
  Body cur = body;
  Mat pre = Mat::Identity(n, n);
  Vec pre_shift = Vec::Zero(n);
  // Walk samples are correlated; heavier thinning keeps the covariance
  // estimate close to what m independent points would give.
  SampleOptions walk_opts;
  walk_opts.walk.thinning = kIsotropicThinning * n;
  SampleBatch batch = sample_uniform(cur, m, derive_seed(seed, 1), walk_opts);
  for (int round = 0; round < kMaxRoundings && batch.method == SamplerMethod::hit_and_run; ++round) {
    const Vec mean = batch.points.colwise().mean().transpose();
    const Mat centered = batch.points.rowwise() - mean.transpose();
    const Mat cov = (centered.transpose() * centered) / static_cast<double>(m - 1);
    Eigen::SelfAdjointEigenSolver<Mat> eig(cov);
    const Vec ev = eig.eigenvalues();
    if (!(ev.minCoeff() > 0.0)) break;
    if (ev.maxCoeff() / ev.minCoeff() < 1.0 + kRoundedAnisotropy) break;
    const Mat w = eig.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
    pre = w * pre;
    pre_shift = w * (pre_shift - mean);
    cur = make_body(shapes::affine_image(body.spec_ptr(), pre, pre_shift));
    batch = sample_uniform(cur, m, derive_seed(seed, 10 + static_cast<std::uint64_t>(round)), walk_opts);
  }
  const Mat pre_inv = pre.inverse();
  const double log_det_pre = std::log(std::abs(pre.determinant()));

  IsotropicReport rep;
  rep.method = batch.method;
  const auto exact_b = cur.exact_barycenter();
  const Vec cur_b = exact_b ? *exact_b : Vec(batch.points.colwise().mean().transpose());
  const Mat centered = batch.points.rowwise() - cur_b.transpose();
  const double denom = exact_b ? static_cast<double>(m) : static_cast<double>(m - 1);
  const Mat cur_cov = (centered.transpose() * centered) / denom;
  rep.barycenter = pre_inv * (cur_b - pre_shift);
  rep.covariance = pre_inv * cur_cov * pre_inv.transpose();

  Eigen::SelfAdjointEigenSolver<Mat> eig(cur_cov);
  Vec evals = eig.eigenvalues();
  const double trace = cur_cov.trace();
  if (!(trace > 0.0)) throw Error(ErrorKind::SingularCovariance, "zero covariance");
  if (evals.maxCoeff() > 1e12 * std::max(evals.minCoeff(), 0.0)) {
    throw Error(ErrorKind::SingularCovariance, "covariance condition number exceeds 1e12");
  }
  evals = evals.cwiseMax(1e-12 * trace);
  const Mat inv_sqrt = eig.eigenvectors() * evals.cwiseSqrt().cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
  const double log_det = evals.array().log().sum();

  const Estimate cur_volume = volume_of(cur, m, derive_seed(seed, 2));
  if (!(cur_volume.value > 0.0)) throw Error(ErrorKind::DomainError, "volume estimate is zero");
  rep.volume = {cur_volume.value * std::exp(-log_det_pre), cur_volume.stderr_ * std::exp(-log_det_pre)};
  const double log_c = (0.5 * log_det - std::log(cur_volume.value)) / n;
  const double c = std::exp(log_c);

  // Spread of ln det Σ across sub-batches gives the covariance contribution.
  const int parts = 16;
  const long part = m / parts;
  double lnl_var = 0.0;
  if (part > n + 1) {
    Vec dets(parts);
    for (int k = 0; k < parts; ++k) {
      const Mat sub = centered.middleRows(k * part, part);
      const Mat cov = (sub.transpose() * sub) / static_cast<double>(part);
      dets[k] = std::log(std::max(cov.determinant(), 1e-300));
    }
    const double mean = dets.mean();
    const double var = (dets.array() - mean).square().sum() / (parts - 1) / parts;
    lnl_var += 0.25 * var;
  }
  const double rel_v = cur_volume.stderr_ / cur_volume.value;
  lnl_var += rel_v * rel_v;
  rep.isotropic_constant = {c, c * std::sqrt(lnl_var) / n};

  const Mat map = c * inv_sqrt;
  rep.map_matrix = map * pre;
  rep.map_shift = map * (pre_shift - cur_b);
  Body image = make_body(shapes::affine_image(body.spec_ptr(), rep.map_matrix, rep.map_shift));
  return {std::move(image), std::move(rep)};
}

void write_batch_csv(const SampleBatch& batch, std::ostream& out) {
  out << "# symcover-sample seed=" << batch.seed << " body=" << batch.body_id
      << " method=" << to_string(batch.method) << " burn_in=" << batch.walk.burn_in
      << " thinning=" << batch.walk.thinning << '\n';
  out.precision(17);
  for (Eigen::Index r = 0; r < batch.points.rows(); ++r) {
    for (Eigen::Index c = 0; c < batch.points.cols(); ++c) {
      if (c) out << ',';
      out << batch.points(r, c);
    }
    out << '\n';
  }
}

}  // namespace symcover
