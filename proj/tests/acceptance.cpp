// Acceptance suite: one PASS/FAIL line per criterion, details indented below.
#include "symcover/body_json.hpp"
#include "symcover/concentration.hpp"
#include "symcover/covering.hpp"
#include "symcover/experiment.hpp"
#include "symcover/presets.hpp"
#include "symcover/rng.hpp"
#include "symcover/sampler.hpp"
#include "symcover/symmetry.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

using namespace symcover;

namespace {

struct Criterion {
  int id;
  std::string title;
  double budget_seconds;
  std::function<bool(std::ostream&)> body;
};

std::string f6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

bool within(double value, double target, double se, double sigmas = 3.0) {
  return std::abs(value - target) <= sigmas * se;
}

Body preset_body(const std::string& name) { return make_body(find_preset(name).spec); }

// Covering-body scale for the per-body covering checks: small enough to be
// non-trivial, large enough that the candidate grid stays tractable.
double cover_scale(int n) {
  if (n <= 3) return 0.5;
  if (n <= 4) return 0.6;
  return 0.8;
}

bool criterion1(std::ostream& log) {
  bool ok = cube_sum_gauge_exact(1).text() == "2/3" && cube_sum_gauge_exact(2).text() == "14/15" &&
            cube_sum_gauge_exact(3).text() == "38/35";
  log << "    exact n=1,2,3: " << cube_sum_gauge_exact(1).text() << ", " << cube_sum_gauge_exact(2).text() << ", "
      << cube_sum_gauge_exact(3).text() << '\n';
  for (int n = 1; n <= 10; ++n) {
    const CubeSumGauge g = cube_sum_gauge_exact(n);
    const Estimate mc = mean_sum_gauge(make_body(shapes::cube(n)), 200000, derive_seed(101, n));
    const bool row = within(mc.value, g.decimal, mc.stderr_) && g.lower <= g.decimal && g.decimal <= g.upper;
    ok = ok && row;
    log << "    n=" << n << " exact=" << f6(g.decimal) << " mc=" << f6(mc.value) << "±" << f6(mc.stderr_)
        << " sandwich=[" << f6(g.lower) << ", " << f6(g.upper) << "]" << (row ? "" : "  <-- FAIL") << '\n';
  }
  return ok;
}

bool criterion2(std::ostream& log) {
  bool ok = true;
  for (const auto& p : preset_corpus()) {
    const Body k = make_body(p.spec);
    const double n = k.dim();
    const Estimate e = mean_gauge(k, 100000, derive_seed(202, spec_hash(*p.spec)));
    const bool row = within(e.value, n / (n + 1.0), e.stderr_);
    ok = ok && row;
    log << "    " << p.name << ": " << f6(e.value) << "±" << f6(e.stderr_) << " vs " << f6(n / (n + 1.0))
        << (row ? "" : "  <-- FAIL") << '\n';
  }
  return ok;
}

bool criterion3(std::ostream& log) {
  bool ok = true;
  for (const auto& p : preset_corpus()) {
    const Body k = make_body(p.spec);
    const std::uint64_t s = derive_seed(303, spec_hash(*p.spec));
    const IsotropicResult iso = to_isotropic(k, 100000, derive_seed(s, 1));
    const ThinShellStats st =
        thin_shell_stats(iso.body, 100000, derive_seed(s, 2), {1.0}, iso.report.isotropic_constant.value);
    const bool row = within(st.moment_ratio.value, 0.5, st.moment_ratio.stderr_);
    ok = ok && row;
    log << "    " << p.name << ": ratio " << f6(st.moment_ratio.value) << "±" << f6(st.moment_ratio.stderr_)
        << " (L_K " << f6(iso.report.isotropic_constant.value) << ", " << to_string(iso.report.method) << ")"
        << (row ? "" : "  <-- FAIL") << '\n';
  }
  return ok;
}

bool criterion4(std::ostream& log) {
  const Body t = make_body(shapes::triangle());
  const KbResult kb = kb_measure(t, {}, 1);
  const MpResult mp = milman_pajor(t, 1000, 1);
  bool ok = kb.exact && std::abs(kb.value.value - 2.0 / 3.0) <= 1e-9 && std::abs(mp.value.value - 2.0 / 3.0) <= 1e-9;
  log << "    triangle: kb=" << f6(kb.value.value) << " (|err| " << f6(std::abs(kb.value.value - 2.0 / 3.0))
      << ") mp=" << f6(mp.value.value) << '\n';
  const Body square = make_body(shapes::cube(2));
  const KbResult ks = kb_measure(square, {}, 2);
  ok = ok && ks.exact && std::abs(ks.value.value - 1.0) <= 1e-9;
  log << "    cube(2) exact path: kb=" << f6(ks.value.value) << '\n';
  for (const auto& p : preset_corpus()) {
    if (!p.symmetric) continue;
    KbOptions ko;
    ko.m = 100000;
    const KbResult r = kb_measure(make_body(p.spec), ko, derive_seed(404, spec_hash(*p.spec)));
    const double tol = r.exact ? 1e-9 : 1e-3;
    const bool row = std::abs(r.value.value - 1.0) <= tol;
    ok = ok && row;
    log << "    " << p.name << ": kb=" << f6(r.value.value) << " tol " << tol << (row ? "" : "  <-- FAIL") << '\n';
  }
  return ok;
}

bool criterion5(std::ostream& log) {
  bool ok = true;
  for (const auto& p : preset_corpus()) {
    const Body k = make_body(p.spec);
    const int n = k.dim();
    const std::uint64_t s = derive_seed(505, spec_hash(*p.spec));
    BoundLedger ledger;
    KbOptions ko;
    ko.m = 100000;
    const SymmetryResult sym = analyze_symmetry(k, ko, derive_seed(s, 1));
    ledger.append(sym.ledger);

    const double scale = cover_scale(n);
    const Body b = scaled_body(k, scale);
    const CoverCertificate cert = cover_greedy(k, b, {}, derive_seed(s, 2));
    const VolumeBound nbar = nbar_volume_bound(k, b, 100000, derive_seed(s, 3));
    ledger.add("cover_verified", cert.verified ? 1.0 : 0.0, Relation::ge, 1.0, 0.0, "cover_definition");
    ledger.add("separation_volume_bound", static_cast<double>(cert.size()), Relation::le, nbar.value.value,
               3.0 * nbar.value.stderr_, "separation_volume_bound");

    const FractionalCover fc = fractional_cover_lp(k, b, {}, derive_seed(s, 4));
    const VolumeBound nomega = nomega_volume_bound(k, b, 100000, derive_seed(s, 5));
    ledger.add("fractional_volume_ratio", fc.total_weight, Relation::le, nomega.value.value, 3.0 * nomega.value.stderr_,
               "fractional_volume_ratio");

    for (double e : {0.2, 0.4, 0.6}) {
      const PairConcentration pc = pair_concentration(k, e, 100000, derive_seed(s, 6 + static_cast<int>(e * 10)));
      ledger.add("pair_concentration_" + f6(e), pc.empirical.value, Relation::le, pc.bound, pc.slack,
                 "pair_distance_concentration");
    }
    const bool row = ledger.overall_pass();
    ok = ok && row;
    log << "    " << p.name << ": " << (row ? "all rows hold" : "FAIL") << " (kb " << f6(sym.kb.value.value) << ", mp "
        << f6(sym.mp.value.value) << ", cover " << cert.size() << " <= " << f6(nbar.value.value) << ", lp "
        << f6(fc.total_weight) << " <= " << f6(nomega.value.value) << ", scale " << scale << ")\n";
    for (const auto& e : ledger.entries()) {
      if (!e.pass()) log << "      failed " << e.name << ": " << e.lhs << " " << to_string(e.relation) << " " << e.rhs << '\n';
    }
  }
  return ok;
}

bool criterion6(std::ostream& log) {
  const CoverCertificate c2 = cover_greedy(make_body(shapes::cube(2)), make_body(shapes::scaled(shapes::cube(2), 0.5)), {}, 1);
  const CoverCertificate c3 = cover_greedy(make_body(shapes::cube(3)), make_body(shapes::scaled(shapes::cube(3), 0.5)), {}, 2);
  bool ok = c2.verified && c2.size() == 4 && c3.verified && c3.size() == 8;
  log << "    cube(2): " << c2.size() << " centers, verified=" << c2.verified << "; cube(3): " << c3.size()
      << " centers, verified=" << c3.verified << '\n';
  for (const char* name : {"cube:2", "cube:3", "triangle", "simplex:3"}) {
    const auto t0 = std::chrono::steady_clock::now();
    const HadwigerResult h = hadwiger_pipeline(preset_body(name), {}, 606);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const LedgerEntry& spec_row = h.ledger.at("cover_vs_chain_bound_with_2n");
    const bool row = h.ledger.overall_pass() && h.rounded.certificate.verified && spec_row.pass() && secs <= 600.0;
    ok = ok && row;
    log << "    " << name << ": cover " << h.rounded.certificate.size() << " (patches " << h.rounded.patches
        << ") <= " << f6(spec_row.rhs) << ", chain bound " << f6(h.ledger.at("cover_vs_chain_bound").rhs)
        << ", overall_pass=" << h.ledger.overall_pass() << ", " << f6(secs) << " s" << (row ? "" : "  <-- FAIL")
        << '\n';
  }
  return ok;
}

bool criterion7(std::ostream& log) {
  bool ok = true;
  for (const auto& p : preset_corpus()) {
    const Body k = make_body(p.spec);
    const int n = k.dim();
    const std::uint64_t s = derive_seed(707, spec_hash(*p.spec));
    const EntropyGapBound zero = entropy_gap_gaussian(k, default_entropy_t(), 100, s, 0.0);
    const MpResult mp = milman_pajor(k, 100000, derive_seed(s, 1));
    const IsotropicResult iso = to_isotropic(k, 100000, derive_seed(s, 2));
    const EntropyGapBound g = entropy_gap_gaussian(iso.body, default_entropy_t(), 100000, derive_seed(s, 3));
    const bool exact = zero.implied.value == std::ldexp(1.0, -n);
    const bool below = g.implied.value <= mp.value.value + 3.0 * std::hypot(mp.value.stderr_, g.implied.stderr_);
    ok = ok && exact && below;
    log << "    " << p.name << ": lambda=0 gives " << f6(zero.implied.value) << (exact ? " (exact)" : " (MISMATCH)")
        << "; lambda=" << f6(g.lambda) << " implied " << f6(g.implied.value) << " <= mp " << f6(mp.value.value)
        << (below ? "" : "  <-- FAIL") << '\n';
  }
  return ok;
}

bool criterion8(std::ostream& log) {
  bool ok = true;
  int instance = 0;
  for (const char* name : {"triangle", "cube:2", "hpoly2", "lp4", "cube:3"}) {
    const Body k = preset_body(name);
    for (double scale : {0.5, 0.7}) {
      for (int rep = 0; rep < 2; ++rep) {
        const std::uint64_t s = derive_seed(808, static_cast<std::uint64_t>(instance++));
        const Body t = scaled_body(k, scale);
        FractionalOptions fo;
        fo.random_witnesses = 500;
        const FractionalCover fc = fractional_cover_lp(k, t, fo, s);
        // Independent re-check of every witness constraint.
        double worst = std::numeric_limits<double>::infinity();
        for (Eigen::Index w = 0; w < fc.witnesses.rows(); ++w) {
          double cover = 0.0;
          for (Eigen::Index c = 0; c < fc.centers.rows(); ++c) {
            if (t.membership((fc.witnesses.row(w) - fc.centers.row(c)).transpose())) cover += fc.weights[c];
          }
          worst = std::min(worst, cover);
        }
        const VolumeBound vb = nomega_volume_bound(k, t, 50000, derive_seed(s, 1));
        const bool row = worst >= 1.0 - 1e-9 && fc.total_weight <= vb.value.value + 3.0 * vb.value.stderr_;
        ok = ok && row;
        log << "    " << name << " T=" << scale << "K seed#" << rep << ": weight " << f6(fc.total_weight)
            << " (dual " << f6(fc.dual_value) << "), min coverage " << f6(worst) << ", volume bound "
            << f6(vb.value.value) << (row ? "" : "  <-- FAIL") << '\n';
      }
    }
  }
  return ok;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

bool criterion9(std::ostream& log) {
  const auto dir = std::filesystem::temp_directory_path();
  bool ok = true;
  std::vector<ExperimentConfig> configs(3);
  configs[0].command = Command::kb;
  configs[0].body = "simplex3";
  configs[0].m = 20000;
  configs[1].command = Command::hadwiger;
  configs[1].body = "cube:2";
  configs[1].m = 20000;
  configs[2].command = Command::thinshell;
  configs[2].body = "hpoly4";
  configs[2].m = 20000;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    ExperimentConfig& c = configs[i];
    c.seed = 909;
    std::string outputs[2];
    for (int run_id = 0; run_id < 2; ++run_id) {
      c.output = (dir / ("symcover_accept_" + std::to_string(i) + "_" + std::to_string(run_id) + ".json")).string();
      run(c);
      outputs[run_id] = read_file(c.output);
    }
    const bool same = !outputs[0].empty() && outputs[0] == outputs[1];
    ok = ok && same;
    log << "    " << to_string(c.command) << " " << c.body << ": " << outputs[0].size() << " bytes, "
        << (same ? "identical" : "DIFFERENT") << '\n';
  }
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  const std::vector<Criterion> criteria{
      {1, "cube closed form, Monte Carlo agreement and sandwich", 60, criterion1},
      {2, "mean gauge equals n/(n+1) on the corpus", 300, criterion2},
      {3, "thin-shell moment ratio equals 1/2 in isotropic position", 300, criterion3},
      {4, "symmetry oracle equivalence", 0, criterion4},
      {5, "inequality ledger over the corpus", 900, criterion5},
      {6, "constructive covering and pipeline ledgers", 2400, criterion6},
      {7, "entropy-gap validity", 0, criterion7},
      {8, "fractional LP feasibility and volume bound", 0, criterion8},
      {9, "determinism", 0, criterion9},
  };
  bool all = true;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    std::ostringstream log;
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = false;
    try {
      pass = c.body(log);
    } catch (const std::exception& e) {
      log << "    error: " << e.what() << '\n';
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.budget_seconds <= 0 || secs <= c.budget_seconds;
    if (!in_time) log << "    over the " << c.budget_seconds << " s budget\n";
    pass = pass && in_time;
    all = all && pass;
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.title << " (" << f6(secs) << " s)\n"
              << log.str() << std::flush;
  }
  std::cout << (all ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL") << '\n';
  return all ? 0 : 1;
}
