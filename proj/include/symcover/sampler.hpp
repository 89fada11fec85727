#pragma once

#include "symcover/body.hpp"
#include "symcover/kernels.hpp"

#include <cstdint>
#include <iosfwd>

namespace symcover {

enum class SamplerMethod { direct, rejection, hit_and_run };
std::string_view to_string(SamplerMethod method);

/// Hit-and-run schedule; negative values select the defaults 10·n² and n.
struct WalkParams {
  int burn_in = -1;
  int thinning = -1;
};

struct SampleOptions {
  WalkParams walk;
  Exec exec = Exec::parallel;
  /// Use hit-and-run even when an exact sampler exists.
  bool force_walk = false;
};

/// Rows are produced in blocks of this size; block b draws from the RNG
/// stream derive_seed(seed, b), so results do not depend on scheduling.
inline constexpr long kSampleBlock = 2048;

struct SampleBatch {
  Points points;
  std::uint64_t body_id = 0;
  std::uint64_t seed = 0;
  WalkParams walk;  // resolved values; zero unless hit-and-run
  SamplerMethod method = SamplerMethod::direct;

  long size() const { return static_cast<long>(points.rows()); }
  int dim() const { return static_cast<int>(points.cols()); }
};

/// Exact i.i.d. sampling when the body has a closed-form generator, rejection
/// from the bounding box when a pilot run accepts at least 2%, and
/// hit-and-run otherwise.
SamplerMethod sampler_method(const Body& body, const SampleOptions& options = {});

/// Throws EmptyBody for bodies without interior, DomainError for m < 1.
SampleBatch sample_uniform(const Body& body, long m, std::uint64_t seed, const SampleOptions& options = {});

/// Mean of per-sample values with a standard error that is i.i.d. for exact
/// samplers and batch-means (32 contiguous batches) for hit-and-run output.
Estimate mean_estimate(const Vec& values, SamplerMethod method);

/// Rejection estimate |box|·hits/m, or the exact area for 2-D polygons.
Estimate estimate_volume(const Body& body, long m, std::uint64_t seed, Exec exec = Exec::parallel);

/// Exact volume when known in closed form, otherwise estimate_volume.
Estimate volume_of(const Body& body, long m, std::uint64_t seed);

struct Moments {
  Vec barycenter;
  Mat covariance;
  Vec barycenter_stderr;
  Mat covariance_stderr;
  long m = 0;
};

/// Sample mean and unbiased covariance. Throws TooFewSamples if m < n + 1.
Moments estimate_moments(const SampleBatch& batch);

struct IsotropicReport {
  Estimate volume;
  Vec barycenter;
  Mat covariance;
  Estimate isotropic_constant;  // L_K
  Mat map_matrix;               // x ↦ map_matrix·x + map_shift
  Vec map_shift;
  SamplerMethod method = SamplerMethod::direct;
};

struct IsotropicResult {
  Body body;
  IsotropicReport report;
};

/// Affine image with unit volume, barycenter 0 and covariance L_K²·I (up to
/// sampling error). Uses the exact barycenter and volume when known. Throws
/// SingularCovariance when the covariance condition number exceeds 1e12.
IsotropicResult to_isotropic(const Body& body, long m, std::uint64_t seed);

/// Row-major CSV with a comment header carrying seed, body id and method.
void write_batch_csv(const SampleBatch& batch, std::ostream& out);

}  // namespace symcover
