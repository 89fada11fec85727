#pragma once

#include "symcover/body.hpp"
#include "symcover/ledger.hpp"
#include "symcover/symmetry.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace symcover {

/// Grid k·spacing per axis (anchored at 0) inside [lo, hi].
Points anchored_grid(const Vec& lo, const Vec& hi, double spacing);

/// Per-axis uniform grid including both box endpoints, with spacing at most
/// `spacing`.
Points box_grid(const Vec& lo, const Vec& hi, double spacing);

struct WitnessOptions {
  double density = 0.25;       // grid spacing = density · inradius(covering body)
  long random_points = 10000;  // uniform samples from A
  long max_grid = 200000;      // grid is coarsened beyond this
};

struct WitnessSet {
  Points points;
  double spacing = 0.0;  // grid spacing actually used
  long grid_count = 0;
};

/// Grid points of A, uniform random points of A, and the vertices of A.
WitnessSet cover_witnesses(const Body& a, double inradius, const WitnessOptions& options, std::uint64_t seed);

struct CoverCertificate {
  Points centers;
  SpecPtr covering_body;
  /// When set, translates are of covering_body + covering_summand and
  /// membership is decided by minkowski_membership.
  SpecPtr covering_summand;
  bool open_interior = false;  // test gauge < 1 − margin instead of closed membership
  double margin = 1e-9;
  bool verified = false;
  Points uncovered;
  long witness_count = 0;
  double witness_spacing = 0.0;
  int patches = 0;

  long size() const { return static_cast<long>(centers.rows()); }
  nlohmann::json to_json() const;
};

/// Membership test for one translate shape (covering body, optional summand).
class CoverShape {
 public:
  explicit CoverShape(const CoverCertificate& cert);
  /// d in the shape (closed), or gauge(d) < 1 − margin for open covers.
  bool contains(VecRef d) const;
  const Body& body() const { return body_; }
  Vec anchor() const;  // a point of the shape
  std::pair<Vec, Vec> box() const;

 private:
  Body body_;
  std::optional<Body> summand_;
  bool open_ = false;
  double margin_ = 0.0;
};

/// Tests grid, random and vertex witnesses; fills verified and uncovered.
CoverCertificate verify_cover(const Body& a, CoverCertificate cert, const WitnessOptions& options,
                              std::uint64_t seed);

struct PackingResult {
  long count = 0;
  Points centers;
};

/// Accepts candidates in order when x − x_j ∉ B − B for every accepted x_j.
PackingResult separation_greedy(const Body& a, const Body& b, const Points& candidates);
/// Candidate stream of `attempts` uniform points of A, preceded by its
/// interior point.
PackingResult separation_greedy(const Body& a, const Body& b, long attempts, std::uint64_t seed);

struct CoverOptions {
  double grid_step = 0.0;  // ≤ 0: inradius(B)/2
  bool centers_in_a = true;
  bool open_interior = false;
  double margin = 1e-9;
  WitnessOptions witnesses;
};

/// Most-constrained-witness greedy over grid candidates, then reverse-delete
/// pruning. Throws GridTooCoarse when a witness has no covering candidate.
CoverCertificate cover_greedy(const Body& a, const Body& b, const CoverOptions& options, std::uint64_t seed);

struct VolumeBound {
  Estimate value;
  double upper() const { return value.upper(); }
};

/// MC volume of A + B from the sum of bounding boxes.
Estimate minkowski_volume(const Body& a, const Body& b, long m, std::uint64_t seed);

/// 2ⁿ|A + ½(B∩−B)|/|B∩−B|. Throws OriginNotInterior.
VolumeBound nbar_volume_bound(const Body& a, const Body& b, long m, std::uint64_t seed);

/// |K − T|/|T|.
VolumeBound nomega_volume_bound(const Body& k, const Body& t, long m, std::uint64_t seed);

/// |A + B|/|B|, the packing bound.
VolumeBound packing_volume_bound(const Body& a, const Body& b, long m, std::uint64_t seed);

struct FractionalOptions {
  double center_spacing = 0.0;   // ≤ 0: inradius(T)/2
  double witness_spacing = 0.0;  // ≤ 0: inradius(T)/4
  long random_witnesses = 0;
  long max_centers = 200000;      // candidate grid points, coarsened beyond this
  long fallback_random_witnesses = 4000;  // used when the center grid had to be coarsened
  long max_incidence = 60000000;  // estimated witness × center membership tests
  long max_lp_rows = 1500;        // reduced centers
  long max_lp_cols = 4000;        // reduced witnesses
};

struct FractionalCover {
  Points centers;  // entries with positive weight
  Vec weights;
  double total_weight = 0.0;
  double dual_value = 0.0;  // LP lower bound on the grid optimum
  Points witnesses;
  double feasibility_slack = 0.0;  // max(0, 1 − min coverage)
  double min_coverage = 0.0;
  double center_spacing = 0.0;
  double witness_spacing = 0.0;
  long grid_centers = 0;
  long reduced_centers = 0;
  long reduced_witnesses = 0;
  int coarsenings = 0;

  double gap() const { return total_weight - dual_value; }
};

/// Solves min Σω subject to coverage ≥ 1 at every witness over a grid of
/// centers, and re-checks feasibility against the full incidence.
/// Throws UncoverableWitness, SolverStall.
FractionalCover fractional_cover_lp(const Body& k, const Body& t, const FractionalOptions& options,
                                    std::uint64_t seed);

struct RoundOptions {
  double nbar = 1.0;                  // upper estimate of N̄(K, T₂)
  std::optional<Body> covering_body;  // T₁ + T₂ when known in closed form
  WitnessOptions witnesses;
};

struct RoundResult {
  CoverCertificate certificate;
  long draws = 0;
  long distinct = 0;
  int patches = 0;
  double rhs = 0.0;  // ω(S)·(1 + ln N̄)
};

/// Draws ⌈ω(1 + ln N̄)⌉ centers with probability ∝ weight, patches uncovered
/// witnesses, removes redundant centers and verifies the result.
RoundResult round_cover(const Body& k, const Body& t1, const Body& t2, const FractionalCover& fc,
                        const RoundOptions& options, std::uint64_t seed);

struct HadwigerOptions {
  double alpha = 0.0;  // ≤ 0: 1 − 1/n
  double lambda = 0.99;
  long m = 20000;
  KbOptions kb;
  FractionalOptions lp;
  WitnessOptions witnesses;
  std::vector<double> lambda_sweep{0.9, 0.95, 0.99};
};

struct HadwigerResult {
  BoundLedger ledger;
  KbResult kb;
  FractionalCover fractional;
  RoundResult rounded;
  double nbar_bound = 0.0;
};

/// The full covering chain for a centered body. Throws NotCentered.
HadwigerResult hadwiger_pipeline(const Body& k, const HadwigerOptions& options, std::uint64_t seed);

}  // namespace symcover
