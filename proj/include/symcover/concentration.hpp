#pragma once

#include "symcover/body.hpp"
#include "symcover/direct_search.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace symcover {

/// 2/(√2+1): the radius at which the two shell probabilities are compared.
double thin_shell_threshold();

struct ShellPoint {
  double r = 0.0;
  Estimate p_x;         // P(‖X‖₂ ≤ r·L·√n)
  Estimate p_half_sum;  // P(‖(X+Y)/2‖₂ ≤ r·L·√n)
};

struct ThinShellStats {
  int n = 0;
  long m = 0;
  Estimate mean_sq_norm_x;
  Estimate mean_sq_norm_half_sum;
  Estimate moment_ratio;  // second / first, 1/2 for centered bodies
  std::vector<ShellPoint> shells;
  double isotropic_constant = 0.0;
  double anisotropy = 0.0;  // λmax/λmin − 1 of the sample covariance
};

/// Throws NotIsotropic when the sample covariance is more than 10%
/// anisotropic. `r_grid` always gains the threshold radius. L_K defaults to
/// √(E‖X‖²/n) when `isotropic_constant` ≤ 0.
ThinShellStats thin_shell_stats(const Body& body, long m, std::uint64_t seed, std::vector<double> r_grid,
                                double isotropic_constant = 0.0);

struct PsiEstimate {
  double alpha = 0.0;
  double b_alpha = 0.0;  // largest tested moment ratio: a lower estimate of b_α
  Vec worst_direction;
  double worst_p = 0.0;
};

/// Default grid {2, 2.5, …, 20}.
std::vector<double> default_p_grid();

/// Axis directions ±e_i plus `random_directions` uniform unit vectors.
Points psi_directions(int n, int random_directions, std::uint64_t seed);

/// Moment-ratio search over a fixed sample. Throws TooFewSamples when
/// m < 10·p_max².
PsiEstimate psi_from_sample(const Points& sample, double alpha, const Points& directions,
                            const std::vector<double>& p_grid);

PsiEstimate psi_estimate(const Body& body, double alpha, long m, int random_directions,
                         const std::vector<double>& p_grid, std::uint64_t seed);

struct PairConcentration {
  double eps_prime = 0.0;
  double threshold = 0.0;  // √2·(1 − ε′)
  Estimate empirical;      // P(‖X − Y‖_K ≤ threshold)
  double bound = 0.0;      // exp(−ε′²n/2)
  double slack = 0.0;      // 3·√(empirical/m)
  bool pass() const { return empirical.value <= bound + slack; }
};

/// Throws OriginNotInterior, DomainError unless 0 < ε′ < 1.
PairConcentration pair_concentration(const Body& body, double eps_prime, long m, std::uint64_t seed);

struct ModulusResult {
  double eps = 0.0;
  double delta = 0.0;  // upper estimate of δ_K(ε)
  Vec x, y;            // witness: ‖x‖_K = 1, ‖y‖_K ≤ 1, ‖x − y‖_K = ε
  int evals = 0;
};

/// Searches pairs with ‖x‖_K = 1 and ‖x − y‖_K = ε for the smallest
/// 1 − ‖(x+y)/2‖_K. Throws OriginNotInterior, DomainError unless 0 < ε < 2.
ModulusResult modulus_convexity(const Body& body, double eps, int budget, std::uint64_t seed);

/// δ(ε) = 1 − √(1 − ε²/4) for the Euclidean ball.
double euclidean_modulus(double eps);

struct UniformConvexBounds {
  double alpha = 0.0;
  double kb_lb = 0.0;
  double mp_lb = 0.0;
  double hadwiger_ub = 0.0;
};

/// Throws DomainError unless 0 < r < 1, 0 < ε < √2, n ≥ 1.
UniformConvexBounds uniform_convex_bounds(double r, double eps, int n);

enum class EntropyFamily { gaussian_on_2k, gauge_exponential };

struct EntropyGapBound {
  EntropyFamily family = EntropyFamily::gaussian_on_2k;
  double lambda = 0.0;
  Estimate rhs;      // upper bound on −ln(|K∩(−K)|/|K|)
  Estimate implied;  // exp(−rhs): a lower bound on the ratio
  double shell_mass = 0.0;
  bool shell_mass_floored = false;
};

/// 1 − 2/√5.
double default_entropy_t();

/// Gaussian weight on 2K. λ is balanced on one half of the sample and the
/// bound evaluated on the other; pass `lambda` ≥ 0 to fix it instead.
/// Throws NotIsotropic.
EntropyGapBound entropy_gap_gaussian(const Body& body, double t, long m, std::uint64_t seed, double lambda = -1.0);

/// Gauge-exponential weight with the optimal λ = n / E‖X+Y‖_K.
EntropyGapBound entropy_gap_gauge(const Body& body, long m, std::uint64_t seed);

/// The gauge-exponential bound from a given E‖X+Y‖_K.
double entropy_gauge_implied(int n, double mean_sum_gauge);

/// E‖X‖_K and E‖X + Y‖_K for independent uniform X, Y.
Estimate mean_gauge(const Body& body, long m, std::uint64_t seed);
Estimate mean_sum_gauge(const Body& body, long m, std::uint64_t seed);

struct CubeSumGauge {
  int n = 0;
  boost::multiprecision::cpp_rational value;
  double decimal = 0.0;
  double lower = 0.0;  // 2 − √(2π)/√(2n+1)
  double upper = 0.0;  // 2 − √π/√(2n+1)
  std::string text() const;
};

/// E‖X+Y‖_{Qₙ} = 2 − (2/(2n+1))·4ⁿ/C(2n,n), exactly. Throws DomainError
/// for n < 1 and Overflow above n = 4096.
CubeSumGauge cube_sum_gauge_exact(int n);

struct RatioPoint {
  double r = 0.0;
  Estimate p_half_sum;  // P((X+Y)/2 ∈ rK)
  Estimate p_x;         // P(X ∈ rK)
  double p_x_exact = 0.0;
  Estimate ratio;
};

/// Descriptive curve of P((X+Y)/2 ∈ rK)/P(X ∈ rK).
std::vector<RatioPoint> half_sum_ratio_curve(const Body& body, const std::vector<double>& r_grid, long m,
                                             std::uint64_t seed);

}  // namespace symcover
