#pragma once

#include "symcover/body.hpp"
#include "symcover/direct_search.hpp"
#include "symcover/kernels.hpp"
#include "symcover/ledger.hpp"

#include <cstdint>

namespace symcover {

/// f(x)/|K| = |K ∩ (x − K)|/|K| = P(x − X ∈ K) for X uniform on K. Exact for
/// 2-D polygons, Monte Carlo with m samples otherwise. Zero when x ∉ 2K.
Estimate sym_ratio(const Body& body, VecRef x, long m, std::uint64_t seed);

/// f(x) = |K ∩ (x − K)|.
Estimate sym_vol(const Body& body, VecRef x, long m, std::uint64_t seed);

struct KbOptions {
  long m = 200000;        // samples for the reported value
  long search_m = 20000;  // fixed sample used during the search
  int starts = 8;
  DirectSearchOptions search{600, 1e-14, 1e-11, 0.1, 2};
};

struct KbResult {
  Vec x_star;
  Estimate value;  // Δ_KB
  bool exact = false;
  bool budget_exhausted = false;
  int evals = 0;
};

/// Δ_KB(K) = max_x f(x)/|K| by multi-start direct search on ln f.
KbResult kb_measure(const Body& body, const KbOptions& options, std::uint64_t seed);

struct MpResult {
  Estimate value;  // |(K − b) ∩ (b − K)|/|K|
  Vec barycenter;
  bool exact_center = false;
};

/// Milman–Pajor ratio at the barycenter; the exact barycenter is used when
/// known, otherwise the sampled one with its error folded into the stderr.
MpResult milman_pajor(const Body& body, long m, std::uint64_t seed);

/// Provable inequalities 2ⁿΔ_KB ≥ 1, 2ⁿMP ≥ 1, MP ≤ Δ_KB, plus the measured
/// exponent c = ln(2ⁿ·ratio)/√n as info rows.
BoundLedger symmetry_ledger(int n, const KbResult& kb, const MpResult& mp);

struct SymmetryResult {
  KbResult kb;
  MpResult mp;
  BoundLedger ledger;
};

SymmetryResult analyze_symmetry(const Body& body, const KbOptions& options, std::uint64_t seed);

}  // namespace symcover
