#include "symcover/concentration.hpp"

#include "symcover/kernels.hpp"
#include "symcover/rng.hpp"
#include "symcover/sampler.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace symcover {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

Vec indicator(const Vec& values, double threshold) {
  return (values.array() <= threshold).cast<double>().matrix();
}

double anisotropy_of(const Points& pts) {
  const Vec mean = pts.colwise().mean().transpose();
  const Mat c = pts.rowwise() - mean.transpose();
  const Mat cov = (c.transpose() * c) / static_cast<double>(std::max<Eigen::Index>(pts.rows() - 1, 1));
  const Vec ev = Eigen::SelfAdjointEigenSolver<Mat>(cov, Eigen::EigenvaluesOnly).eigenvalues();
  if (!(ev.minCoeff() > 0.0)) return std::numeric_limits<double>::infinity();
  return ev.maxCoeff() / ev.minCoeff() - 1.0;
}

void require_isotropic(double anisotropy) {
  if (anisotropy > 0.1) {
    throw Error(ErrorKind::NotIsotropic, "sample covariance is " + std::to_string(anisotropy * 100.0) +
                                             "% anisotropic; normalize the body first");
  }
}

// Ratio of two paired means with a delta-method standard error.
Estimate paired_ratio(const Vec& num, const Vec& den, SamplerMethod method) {
  const double dm = den.mean();
  if (!(dm > 0.0)) return {kNan, kNan};
  const double r = num.mean() / dm;
  const Vec z = num - r * den;
  return {r, mean_estimate(z, method).stderr_ / dm};
}

SamplerMethod combined(const SampleBatch& a, const SampleBatch& b) {
  return (a.method == SamplerMethod::hit_and_run || b.method == SamplerMethod::hit_and_run)
             ? SamplerMethod::hit_and_run
             : a.method;
}

}  // namespace

double thin_shell_threshold() { return 2.0 / (std::sqrt(2.0) + 1.0); }

ThinShellStats thin_shell_stats(const Body& body, long m, std::uint64_t seed, std::vector<double> r_grid,
                                double isotropic_constant) {
  const int n = body.dim();
  const SampleBatch xs = sample_uniform(body, m, derive_seed(seed, 1));
  const SampleBatch ys = sample_uniform(body, m, derive_seed(seed, 2));
  const SamplerMethod method = combined(xs, ys);

  ThinShellStats out;
  out.n = n;
  out.m = m;
  out.anisotropy = anisotropy_of(xs.points);
  require_isotropic(out.anisotropy);

  const Vec nx = xs.points.rowwise().squaredNorm();
  const Vec ny = ys.points.rowwise().squaredNorm();
  const Vec a = 0.5 * (nx + ny);
  const Vec b = (0.5 * (xs.points + ys.points)).rowwise().squaredNorm();
  out.mean_sq_norm_x = mean_estimate(a, method);
  out.mean_sq_norm_half_sum = mean_estimate(b, method);
  out.moment_ratio = paired_ratio(b, a, method);
  out.isotropic_constant = isotropic_constant > 0.0 ? isotropic_constant : std::sqrt(a.mean() / n);

  const double thr = thin_shell_threshold();
  if (std::none_of(r_grid.begin(), r_grid.end(), [&](double r) { return std::abs(r - thr) < 1e-12; })) {
    r_grid.push_back(thr);
  }
  std::sort(r_grid.begin(), r_grid.end());
  const Vec dx = nx.cwiseSqrt();
  const Vec dh = b.cwiseSqrt();
  for (double r : r_grid) {
    const double radius = r * out.isotropic_constant * std::sqrt(static_cast<double>(n));
    out.shells.push_back({r, mean_estimate(indicator(dx, radius), xs.method), mean_estimate(indicator(dh, radius), method)});
  }
  return out;
}

std::vector<double> default_p_grid() {
  std::vector<double> grid;
  for (int k = 0; k <= 36; ++k) grid.push_back(2.0 + 0.5 * k);
  return grid;
}

Points psi_directions(int n, int random_directions, std::uint64_t seed) {
  Points dirs(2 * n + random_directions, n);
  dirs.setZero();
  for (int i = 0; i < n; ++i) {
    dirs(2 * i, i) = 1.0;
    dirs(2 * i + 1, i) = -1.0;
  }
  Rng rng(seed);
  for (int k = 0; k < random_directions; ++k) dirs.row(2 * n + k) = rng.unit_vector(n).transpose();
  return dirs;
}

PsiEstimate psi_from_sample(const Points& sample, double alpha, const Points& directions,
                            const std::vector<double>& p_grid) {
  if (p_grid.empty()) throw Error(ErrorKind::DomainError, "empty p grid");
  if (!(alpha >= 1.0 && alpha <= 2.0)) throw Error(ErrorKind::DomainError, "alpha must lie in [1, 2]");
  const double p_max = *std::max_element(p_grid.begin(), p_grid.end());
  if (static_cast<double>(sample.rows()) < 10.0 * p_max * p_max) {
    throw Error(ErrorKind::TooFewSamples, "psi estimate needs m >= 10 p_max^2");
  }
  const Eigen::Index d = directions.rows();
  const Mat proj = sample * directions.transpose();  // m × d
  std::vector<double> best(static_cast<std::size_t>(d), -1.0), best_p(static_cast<std::size_t>(d), 0.0);
  for_each_index(static_cast<std::size_t>(d), [&](std::size_t j) {
    const Vec t = proj.col(static_cast<Eigen::Index>(j)).cwiseAbs();
    const double s2 = t.squaredNorm() / static_cast<double>(t.size());
    if (!(s2 > 0.0)) return;
    const double tmax = t.maxCoeff();
    const Vec logs = (t / tmax).array().log().matrix();
    for (double p : p_grid) {
      // (E|t|^p)^{1/p} computed relative to max|t| to avoid overflow.
      const double mp = tmax * std::pow((p * logs.array()).exp().mean(), 1.0 / p);
      const double ratio = mp / (std::pow(p, 1.0 / alpha) * std::sqrt(s2));
      if (ratio > best[j]) {
        best[j] = ratio;
        best_p[j] = p;
      }
    }
  }, Exec::parallel);
  PsiEstimate out;
  out.alpha = alpha;
  for (Eigen::Index j = 0; j < d; ++j) {
    if (best[static_cast<std::size_t>(j)] > out.b_alpha) {
      out.b_alpha = best[static_cast<std::size_t>(j)];
      out.worst_p = best_p[static_cast<std::size_t>(j)];
      out.worst_direction = directions.row(j).transpose();
    }
  }
  return out;
}

PsiEstimate psi_estimate(const Body& body, double alpha, long m, int random_directions,
                         const std::vector<double>& p_grid, std::uint64_t seed) {
  const double p_max = p_grid.empty() ? 0.0 : *std::max_element(p_grid.begin(), p_grid.end());
  if (static_cast<double>(m) < 10.0 * p_max * p_max) throw Error(ErrorKind::TooFewSamples, "psi estimate needs m >= 10 p_max^2");
  const SampleBatch xs = sample_uniform(body, m, derive_seed(seed, 1));
  return psi_from_sample(xs.points, alpha, psi_directions(body.dim(), random_directions, derive_seed(seed, 2)), p_grid);
}

PairConcentration pair_concentration(const Body& body, double eps_prime, long m, std::uint64_t seed) {
  if (!(eps_prime > 0.0 && eps_prime < 1.0)) throw Error(ErrorKind::DomainError, "eps' must lie in (0, 1)");
  body.gauge(Vec::Zero(body.dim()));  // OriginNotInterior check
  const SampleBatch xs = sample_uniform(body, m, derive_seed(seed, 1));
  const SampleBatch ys = sample_uniform(body, m, derive_seed(seed, 2));
  PairConcentration out;
  out.eps_prime = eps_prime;
  out.threshold = std::sqrt(2.0) * (1.0 - eps_prime);
  const Vec g = gauge_combination(body, xs.points, 1.0, ys.points, -1.0);
  out.empirical = mean_estimate(indicator(g, out.threshold), combined(xs, ys));
  out.bound = std::exp(-eps_prime * eps_prime * body.dim() / 2.0);
  out.slack = 3.0 * std::sqrt(out.empirical.value / static_cast<double>(m));
  return out;
}

double euclidean_modulus(double eps) { return 1.0 - std::sqrt(1.0 - eps * eps / 4.0); }

ModulusResult modulus_convexity(const Body& body, double eps, int budget, std::uint64_t seed) {
  if (!(eps > 0.0 && eps < 2.0)) throw Error(ErrorKind::DomainError, "eps must lie in (0, 2)");
  const int n = body.dim();
  body.gauge(Vec::Zero(n));  // OriginNotInterior check

  ModulusResult out;
  out.eps = eps;
  out.delta = std::numeric_limits<double>::infinity();
  auto objective = [&](const Vec& z) {
    const Vec u = z.head(n);
    const Vec w = z.tail(n);
    const double gu = body.gauge(u);
    const double gw = body.gauge(w);
    if (!(gu > 1e-12) || !(gw > 1e-12)) return 10.0;
    const Vec x = u / gu;
    const Vec y = x - (eps / gw) * w;
    const double gy = body.gauge(y);
    const double value = 1.0 - body.gauge(0.5 * (x + y));
    if (gy <= 1.0 + 1e-12) {
      if (value < out.delta) {
        out.delta = value;
        out.x = x;
        out.y = y;
      }
      return value;
    }
    return value + 1e3 * (gy - 1.0);
  };

  const int starts = 6;
  DirectSearchOptions opts;
  opts.max_evals = std::max(100, budget / starts);
  opts.initial_step = 0.3;
  opts.restarts = 3;
  Rng rng(seed);
  for (int s = 0; s < starts; ++s) {
    Vec z(2 * n);
    for (int i = 0; i < 2 * n; ++i) z[i] = rng.normal();
    out.evals += nelder_mead_minimize(objective, z, opts).evals;
  }
  out.delta = std::max(out.delta, 0.0);
  return out;
}

UniformConvexBounds uniform_convex_bounds(double r, double eps, int n) {
  if (!(r > 0.0 && r < 1.0)) throw Error(ErrorKind::DomainError, "r must lie in (0, 1)");
  if (!(eps > 0.0 && eps < std::sqrt(2.0))) throw Error(ErrorKind::DomainError, "eps must lie in (0, sqrt 2)");
  if (n < 1) throw Error(ErrorKind::DomainError, "n must be at least 1");
  UniformConvexBounds out;
  const double s = std::sqrt(2.0) - eps;
  out.alpha = -std::expm1(-s * s * n / 4.0);
  const double ln2 = std::log(2.0);
  out.kb_lb = out.alpha * std::exp(-n * ln2 - n * std::log1p(-r));
  out.mp_lb = std::exp(-1.0 - 0.5 * std::log(static_cast<double>(n)) - n * ln2 - n * std::log1p(-out.alpha * r));
  out.hadwiger_ub = std::exp(n * std::log(4.0 * (1.0 - r))) / out.alpha;
  return out;
}

double default_entropy_t() { return 1.0 - 2.0 / std::sqrt(5.0); }

EntropyGapBound entropy_gap_gaussian(const Body& body, double t, long m, std::uint64_t seed, double lambda) {
  if (!(t >= 0.0 && t < 1.0)) throw Error(ErrorKind::DomainError, "t must lie in [0, 1)");
  const int n = body.dim();
  EntropyGapBound out;
  out.family = EntropyFamily::gaussian_on_2k;
  const double n_ln2 = n * std::log(2.0);
  if (lambda == 0.0) {
    out.rhs = {n_ln2, 0.0};
    out.implied = {std::ldexp(1.0, -n), 0.0};
    return out;
  }
  if (m < 4) throw Error(ErrorKind::TooFewSamples, "entropy bound needs at least 4 samples");
  const SampleBatch xs = sample_uniform(body, m, derive_seed(seed, 1));
  const SampleBatch ys = sample_uniform(body, m, derive_seed(seed, 2));
  require_isotropic(anisotropy_of(xs.points));
  const SamplerMethod method = combined(xs, ys);
  const long half = m / 2;

  const Vec sq = xs.points.rowwise().squaredNorm();
  if (lambda < 0.0) {
    const Vec sq1 = sq.head(half);
    const double l2 = sq1.mean() / n;
    const double rho2 = (1.0 - t) * (1.0 - t) * n * l2;
    const double mass = indicator(sq1, rho2).mean();
    out.shell_mass = mass;
    double used = mass;
    if (used <= 0.0) {
      used = 1.0 / static_cast<double>(half);
      out.shell_mass_floored = true;
    }
    lambda = -std::log(used) / (4.0 * rho2);
  }
  out.lambda = lambda;

  const long rest = m - half;
  const Vec sq2 = sq.tail(rest);
  const Vec sum_sq = (xs.points.bottomRows(rest) + ys.points.bottomRows(rest)).rowwise().squaredNorm();
  const Vec weights = (-4.0 * lambda * sq2.array()).exp().matrix();
  const Estimate s = mean_estimate(sum_sq, method);
  const Estimate w = mean_estimate(weights, method);
  const double rhs = lambda * s.value + n_ln2 + std::log(w.value);
  const double se = lambda * s.stderr_ + w.stderr_ / w.value;
  out.rhs = {rhs, se};
  const double implied = std::exp(-rhs);
  out.implied = {implied, implied * se};
  return out;
}

double entropy_gauge_implied(int n, double mean_sum_gauge) {
  const double dn = static_cast<double>(n);
  return std::exp(-dn * std::log(mean_sum_gauge) - std::lgamma(dn + 1.0) - dn + dn * std::log(dn));
}

Estimate mean_gauge(const Body& body, long m, std::uint64_t seed) {
  const SampleBatch xs = sample_uniform(body, m, seed);
  return mean_estimate(gauge_rows(body, xs.points), xs.method);
}

Estimate mean_sum_gauge(const Body& body, long m, std::uint64_t seed) {
  const SampleBatch xs = sample_uniform(body, m, derive_seed(seed, 1));
  const SampleBatch ys = sample_uniform(body, m, derive_seed(seed, 2));
  return mean_estimate(gauge_combination(body, xs.points, 1.0, ys.points, 1.0), combined(xs, ys));
}

EntropyGapBound entropy_gap_gauge(const Body& body, long m, std::uint64_t seed) {
  const int n = body.dim();
  const Estimate s = mean_sum_gauge(body, m, seed);
  EntropyGapBound out;
  out.family = EntropyFamily::gauge_exponential;
  out.lambda = n / s.value;
  const double dn = static_cast<double>(n);
  const double rhs = dn * std::log(s.value) + std::lgamma(dn + 1.0) + dn - dn * std::log(dn);
  const double se = dn * s.stderr_ / s.value;
  out.rhs = {rhs, se};
  const double implied = entropy_gauge_implied(n, s.value);
  out.implied = {implied, implied * se};
  return out;
}

std::string CubeSumGauge::text() const {
  return numerator(value).str() + "/" + denominator(value).str();
}

CubeSumGauge cube_sum_gauge_exact(int n) {
  using boost::multiprecision::cpp_int;
  using boost::multiprecision::cpp_rational;
  if (n < 1) throw Error(ErrorKind::DomainError, "n must be at least 1");
  if (n > 4096) throw Error(ErrorKind::Overflow, "n too large for the exact cube formula");
  cpp_int binom = 1;  // C(2n, n)
  for (int k = 1; k <= n; ++k) binom = binom * (n + k) / k;
  const cpp_int four_n = cpp_int(1) << (2 * n);
  CubeSumGauge out;
  out.n = n;
  out.value = cpp_rational(2) - cpp_rational(2 * four_n, (2 * n + 1) * binom);
  out.decimal = out.value.convert_to<double>();
  const double root = std::sqrt(2.0 * n + 1.0);
  out.lower = 2.0 - std::sqrt(2.0 * M_PI) / root;
  out.upper = 2.0 - std::sqrt(M_PI) / root;
  return out;
}

std::vector<RatioPoint> half_sum_ratio_curve(const Body& body, const std::vector<double>& r_grid, long m,
                                             std::uint64_t seed) {
  const int n = body.dim();
  const SampleBatch xs = sample_uniform(body, m, derive_seed(seed, 1));
  const SampleBatch ys = sample_uniform(body, m, derive_seed(seed, 2));
  const SamplerMethod method = combined(xs, ys);
  const Vec gx = gauge_rows(body, xs.points);
  const Vec gh = gauge_combination(body, xs.points, 0.5, ys.points, 0.5);
  std::vector<RatioPoint> out;
  for (double r : r_grid) {
    RatioPoint pt;
    pt.r = r;
    const Vec ix = indicator(gx, r);
    const Vec ih = indicator(gh, r);
    pt.p_x = mean_estimate(ix, xs.method);
    pt.p_half_sum = mean_estimate(ih, method);
    pt.p_x_exact = r >= 1.0 ? 1.0 : std::pow(std::max(r, 0.0), n);
    pt.ratio = paired_ratio(ih, ix, method);
    out.push_back(pt);
  }
  return out;
}

}  // namespace symcover
