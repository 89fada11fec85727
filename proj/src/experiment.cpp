#include "symcover/experiment.hpp"

#include "symcover/body_json.hpp"
#include "symcover/concentration.hpp"
#include "symcover/covering.hpp"
#include "symcover/presets.hpp"
#include "symcover/rng.hpp"
#include "symcover/sampler.hpp"
#include "symcover/symmetry.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <unistd.h>

namespace symcover {

namespace {

using nlohmann::json;

constexpr std::pair<Command, std::string_view> kCommands[] = {
    {Command::kb, "kb"},           {Command::mp, "mp"},
    {Command::thinshell, "thinshell"}, {Command::psi, "psi"},
    {Command::pairs, "pairs"},     {Command::modulus, "modulus"},
    {Command::entropy, "entropy"}, {Command::cover, "cover"},
    {Command::hadwiger, "hadwiger"}, {Command::cube, "cube"},
    {Command::conjecture61, "conjecture61"}, {Command::conjecture63, "conjecture63"},
};

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json num(double x) {
  if (std::isfinite(x)) return x;
  return fmt(x);
}

double num_from(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return std::stod(j.get<std::string>());
  return std::nan("");
}

json vec_json(const Vec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(num(v[i]));
  return out;
}

std::string tag(const std::string& base, double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s_%g", base.c_str(), x);
  return buf;
}

struct Output {
  std::vector<ResultRow> rows;
  json payload = json::object();

  void value(std::string name, double v, double se, std::string anchor) {
    rows.push_back({std::move(name), v, se, 0.0, "info", 0.0, true, std::move(anchor)});
  }
  void check(std::string name, double v, double se, Relation rel, double bound, double slack, std::string anchor) {
    LedgerEntry e{name, v, bound, rel, slack, anchor};
    rows.push_back({std::move(name), v, se, bound, to_string(rel), slack, e.pass(), std::move(anchor)});
  }
  void ledger(const BoundLedger& l) {
    for (const auto& e : l.entries()) {
      rows.push_back({e.name, e.lhs, 0.0, e.rhs, to_string(e.relation), e.slack, e.pass(), e.provenance});
    }
  }
};

std::uint64_t seed_of(const ExperimentConfig& c) { return c.seed.value_or(0); }

Body load_body(const std::string& name, const ExperimentConfig& c, std::uint64_t seed) {
  Body body = make_body(resolve_body(name));
  if (!c.center) return body;
  Vec b;
  if (const auto exact = body.exact_barycenter()) {
    b = *exact;
  } else {
    b = estimate_moments(sample_uniform(body, std::max(c.m, 20000L), derive_seed(seed, 0xce))).barycenter;
  }
  if (b.cwiseAbs().maxCoeff() == 0.0) return body;
  return make_body(shapes::translated(body.spec_ptr(), -b));
}

std::vector<double> default_r_grid() { return {0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1}; }

void run_kb(const ExperimentConfig& c, const Body& k, Output& out) {
  KbOptions ko;
  ko.m = c.m;
  ko.search_m = std::min(c.m, ko.search_m);
  const SymmetryResult s = analyze_symmetry(k, ko, seed_of(c));
  out.value("kb_measure", s.kb.value.value, s.kb.value.stderr_, "kb_definition");
  out.value("mp_ratio", s.mp.value.value, s.mp.value.stderr_, "milman_pajor_bound");
  out.ledger(s.ledger);
  out.payload["x_star"] = vec_json(s.kb.x_star);
  out.payload["exact"] = s.kb.exact;
  out.payload["budget_exhausted"] = s.kb.budget_exhausted;
}

void run_mp(const ExperimentConfig& c, const Body& k, Output& out) {
  const MpResult mp = milman_pajor(k, c.m, seed_of(c));
  const double pow2 = std::ldexp(1.0, k.dim());
  out.value("mp_ratio", mp.value.value, mp.value.stderr_, "milman_pajor_bound");
  out.check("mp_times_2n", mp.value.value * pow2, mp.value.stderr_ * pow2, Relation::ge, 1.0,
            3.0 * mp.value.stderr_ * pow2, "milman_pajor_bound");
  out.payload["barycenter"] = vec_json(mp.barycenter);
  out.payload["exact_center"] = mp.exact_center;
}

void run_thinshell(const ExperimentConfig& c, const Body& k, Output& out) {
  const IsotropicResult iso = to_isotropic(k, c.m, derive_seed(seed_of(c), 1));
  const auto grid = c.r_grid.empty() ? default_r_grid() : c.r_grid;
  const ThinShellStats st =
      thin_shell_stats(iso.body, c.m, derive_seed(seed_of(c), 2), grid, iso.report.isotropic_constant.value);
  const Estimate& r = st.moment_ratio;
  out.check("moment_ratio_upper", r.value, r.stderr_, Relation::le, 0.5, 3.0 * r.stderr_, "thin_shell_moment_identity");
  out.check("moment_ratio_lower", r.value, r.stderr_, Relation::ge, 0.5, 3.0 * r.stderr_, "thin_shell_moment_identity");
  out.value("isotropic_constant", iso.report.isotropic_constant.value, iso.report.isotropic_constant.stderr_,
            "isotropic_position");
  out.value("anisotropy", st.anisotropy, 0.0, "isotropic_position");
  for (const auto& p : st.shells) {
    out.value(tag("p_x_r", p.r), p.p_x.value, p.p_x.stderr_, "thin_shell_ratio_argument");
    out.value(tag("p_half_sum_r", p.r), p.p_half_sum.value, p.p_half_sum.stderr_, "thin_shell_ratio_argument");
  }
  out.payload["sampler"] = std::string(to_string(iso.report.method));
}

void run_psi(const ExperimentConfig& c, const Body& k, Output& out) {
  const double alpha = c.alpha > 0.0 ? c.alpha : 1.0;
  const IsotropicResult iso = to_isotropic(k, c.m, derive_seed(seed_of(c), 1));
  const PsiEstimate p =
      psi_estimate(iso.body, alpha, c.m, c.directions, default_p_grid(), derive_seed(seed_of(c), 2));
  out.value("b_alpha", p.b_alpha, 0.0, "psi_alpha_definition");
  out.value("worst_p", p.worst_p, 0.0, "psi_alpha_definition");
  out.payload["alpha"] = alpha;
  out.payload["worst_direction"] = vec_json(p.worst_direction);
}

void run_pairs(const ExperimentConfig& c, const Body& k, Output& out) {
  for (std::size_t i = 0; i < c.eps_primes.size(); ++i) {
    const PairConcentration pc = pair_concentration(k, c.eps_primes[i], c.m, derive_seed(seed_of(c), i));
    out.check(tag("pair_concentration_eps", pc.eps_prime), pc.empirical.value, pc.empirical.stderr_, Relation::le,
              pc.bound, pc.slack, "pair_distance_concentration");
  }
}

// A closed-form lower bound on the modulus of convexity, when one is known.
std::optional<double> modulus_lower_bound(const Body& k, double eps) {
  const auto* ball = std::get_if<kinds::LpBall>(&k.spec().kind);
  if (!ball) return std::nullopt;
  if (ball->p == 2.0) return euclidean_modulus(eps);
  if (ball->p > 2.0) return 1.0 - std::pow(1.0 - std::pow(eps / 2.0, ball->p), 1.0 / ball->p);
  return std::nullopt;
}

void run_modulus(const ExperimentConfig& c, const Body& k, Output& out) {
  const ModulusResult mr = modulus_convexity(k, c.eps, c.budget, seed_of(c));
  out.value("delta_search", mr.delta, 0.0, "modulus_of_convexity");
  out.payload["x"] = vec_json(mr.x);
  out.payload["y"] = vec_json(mr.y);
  const auto lower = modulus_lower_bound(k, c.eps);
  if (!lower) return;
  out.check("delta_search_vs_closed_form", mr.delta, 0.0, Relation::ge, *lower, 1e-9, "modulus_of_convexity");
  if (*lower > 0.0 && *lower < 1.0 && c.eps < std::sqrt(2.0)) {
    const UniformConvexBounds u = uniform_convex_bounds(*lower, c.eps, k.dim());
    out.value("uniform_alpha", u.alpha, 0.0, "uniform_convexity_bounds");
    out.check("kb_lower_bound_vs_symmetric", u.kb_lb, 0.0, Relation::le, 1.0, 0.0, "uniform_convexity_bounds");
    out.value("mp_lower_bound", u.mp_lb, 0.0, "uniform_convexity_bounds");
    out.value("hadwiger_upper_bound", u.hadwiger_ub, 0.0, "uniform_convexity_bounds");
  }
}

void run_entropy(const ExperimentConfig& c, const Body& k, Output& out) {
  const int n = k.dim();
  const MpResult mp = milman_pajor(k, c.m, derive_seed(seed_of(c), 1));
  const double mp_hi = mp.value.upper();
  out.value("mp_ratio", mp.value.value, mp.value.stderr_, "milman_pajor_bound");
  const double t = c.t > 0.0 ? c.t : default_entropy_t();

  const EntropyGapBound zero = entropy_gap_gaussian(k, t, c.m, derive_seed(seed_of(c), 2), 0.0);
  out.check("gaussian_lambda0_implied", zero.implied.value, 0.0, Relation::le, mp_hi, 0.0, "entropy_gap_gaussian");
  out.check("gaussian_lambda0_exact", zero.implied.value, 0.0, Relation::ge, std::ldexp(1.0, -n), 0.0,
            "entropy_gap_gaussian");

  const IsotropicResult iso = to_isotropic(k, c.m, derive_seed(seed_of(c), 3));
  const EntropyGapBound g = entropy_gap_gaussian(iso.body, t, c.m, derive_seed(seed_of(c), 4));
  out.check("gaussian_balanced_implied", g.implied.value, g.implied.stderr_, Relation::le, mp.value.value,
            3.0 * std::hypot(g.implied.stderr_, mp.value.stderr_), "entropy_gap_gaussian");
  out.value("gaussian_lambda", g.lambda, 0.0, "entropy_gap_gaussian");
  out.value("gaussian_shell_mass", g.shell_mass, 0.0, "entropy_gap_gaussian");
  out.payload["shell_mass_floored"] = g.shell_mass_floored;

  if (k.interior_margin(Vec::Zero(n)) > 0.0) {
    const EntropyGapBound e = entropy_gap_gauge(k, c.m, derive_seed(seed_of(c), 5));
    out.check("gauge_implied", e.implied.value, e.implied.stderr_, Relation::le, mp.value.value,
              3.0 * std::hypot(e.implied.stderr_, mp.value.stderr_), "entropy_gap_gauge");
    out.value("gauge_lambda", e.lambda, 0.0, "entropy_gap_gauge");
  }
}

void run_cover(const ExperimentConfig& c, const Body& k, Output& out) {
  if (!(c.scale > 0.0)) throw Error(ErrorKind::ConfigParse, "--scale must be positive");
  const Body b = scaled_body(k, c.scale);
  CoverOptions co;
  co.grid_step = c.grid_step;
  const CoverCertificate cert = cover_greedy(k, b, co, derive_seed(seed_of(c), 1));
  out.check("cover_verified", cert.verified ? 1.0 : 0.0, 0.0, Relation::ge, 1.0, 0.0, "cover_definition");
  const VolumeBound nbar = nbar_volume_bound(k, b, c.m, derive_seed(seed_of(c), 2));
  out.check("cover_vs_separation_volume_bound", static_cast<double>(cert.size()), 0.0, Relation::le, nbar.value.value,
            3.0 * nbar.value.stderr_, "separation_volume_bound");
  const Body half = scaled_body(symmetric_intersection(b, Vec::Zero(k.dim())), 0.5);
  const PackingResult pack = separation_greedy(k, half, std::min(c.m, 20000L), derive_seed(seed_of(c), 3));
  const VolumeBound pb = packing_volume_bound(k, half, c.m, derive_seed(seed_of(c), 4));
  out.check("packing_vs_volume_bound", static_cast<double>(pack.count), 0.0, Relation::le, pb.value.value,
            3.0 * pb.value.stderr_, "packing_volume_bound");
  out.payload["certificate"] = cert.to_json();
}

void run_hadwiger(const ExperimentConfig& c, const Body& k, Output& out) {
  HadwigerOptions ho;
  ho.alpha = c.alpha;
  ho.lambda = c.lambda;
  ho.m = c.m;
  ho.kb.m = c.m;
  ho.kb.search_m = std::min(c.m, ho.kb.search_m);
  const HadwigerResult h = hadwiger_pipeline(k, ho, seed_of(c));
  out.ledger(h.ledger);
  out.payload["certificate"] = h.rounded.certificate.to_json();
  out.payload["fractional"] = {{"total_weight", h.fractional.total_weight},
                               {"dual_value", h.fractional.dual_value},
                               {"min_coverage", h.fractional.min_coverage},
                               {"centers", h.fractional.centers.rows()},
                               {"reduced_centers", h.fractional.reduced_centers},
                               {"reduced_witnesses", h.fractional.reduced_witnesses}};
  out.payload["rounding"] = {{"draws", h.rounded.draws},
                             {"distinct", h.rounded.distinct},
                             {"patches", h.rounded.patches},
                             {"rhs", h.rounded.rhs}};
  out.payload["x_star"] = vec_json(h.kb.x_star);
}

void run_cube(const ExperimentConfig& c, Output& out) {
  std::vector<int> dims;
  if (c.n > 0) {
    dims.push_back(c.n);
  } else {
    for (int n = 1; n <= 10; ++n) dims.push_back(n);
  }
  json exact = json::object();
  for (int n : dims) {
    const CubeSumGauge g = cube_sum_gauge_exact(n);
    const std::string s = "_n" + std::to_string(n);
    out.value("cube_sum_gauge" + s, g.decimal, 0.0, "cube_closed_form");
    out.check("sandwich_lower" + s, g.decimal, 0.0, Relation::ge, g.lower, 0.0, "cube_closed_form");
    out.check("sandwich_upper" + s, g.decimal, 0.0, Relation::le, g.upper, 0.0, "cube_closed_form");
    exact[std::to_string(n)] = g.text();
  }
  out.payload["exact"] = exact;
}

void run_conjecture61(const ExperimentConfig& c, const Body& k, Output& out) {
  const auto grid = c.r_grid.empty() ? default_r_grid() : c.r_grid;
  for (const auto& p : half_sum_ratio_curve(k, grid, c.m, seed_of(c))) {
    out.value(tag("ratio_r", p.r), p.ratio.value, p.ratio.stderr_, "half_sum_conjecture");
    out.value(tag("p_x_r", p.r), p.p_x.value, p.p_x.stderr_, "half_sum_conjecture");
  }
}

void run_conjecture63(const ExperimentConfig& c, Output& out) {
  std::vector<std::string> names = c.bodies;
  if (names.empty() && !c.body.empty()) names.push_back(c.body);
  if (names.empty()) throw Error(ErrorKind::ConfigParse, "conjecture63 needs at least one body");
  for (std::size_t i = 0; i < names.size(); ++i) {
    const std::uint64_t s = derive_seed(seed_of(c), i);
    const Body k = load_body(names[i], c, s);
    const int n = k.dim();
    const Estimate e = mean_sum_gauge(k, c.m, s);
    const std::string tagn = "_" + names[i];
    out.check("sum_gauge_cap" + tagn, e.value, e.stderr_, Relation::le, 2.0 - 2.0 / (n + 1.0), 3.0 * e.stderr_,
              "sum_gauge_triangle_cap");
    if (n <= 4096) out.value("cube_reference" + tagn, cube_sum_gauge_exact(n).decimal, 0.0, "cube_closed_form");
  }
}

std::string iso_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream in(line);
  std::string part;
  while (std::getline(in, part, ',')) out.push_back(part);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

RunRecord record_from_csv(std::istream& in, const std::string& path) {
  std::string line;
  std::getline(in, line);
  if (line != kSchema) throw Error(ErrorKind::SchemaMismatch, path + ": missing " + std::string(kSchema) + " header");
  RunRecord r;
  std::getline(in, line);
  // "# key=value ..." metadata line
  std::stringstream meta(line.size() > 2 ? line.substr(2) : "");
  std::string kv;
  while (meta >> kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
    if (key == "version") {
      r.version = val;
    } else if (key == "overall_pass") {
      r.overall_pass = val == "true";
    } else if (key == "dim") {
      r.payload["dim"] = std::stoi(val);
    } else {
      r.config[key] = val;
    }
  }
  std::getline(in, line);  // column header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 8) throw Error(ErrorKind::SchemaMismatch, path + ": malformed row");
    r.rows.push_back({f[0], std::stod(f[1]), std::stod(f[2]), std::stod(f[3]), f[4], std::stod(f[5]), f[6] == "true", f[7]});
  }
  return r;
}

}  // namespace

std::string_view to_string(Command command) {
  for (const auto& [c, name] : kCommands) {
    if (c == command) return name;
  }
  return "?";
}

Command command_from_string(const std::string& name) {
  for (const auto& [c, n] : kCommands) {
    if (n == name) return c;
  }
  throw Error(ErrorKind::ConfigParse, "unknown command '" + name + "'");
}

bool is_stochastic(Command command) { return command != Command::cube; }

void ExperimentConfig::validate() const {
  if (is_stochastic(command) && !seed) {
    throw Error(ErrorKind::ConfigParse, std::string(to_string(command)) + " needs an explicit --seed");
  }
  if (m < 1) throw Error(ErrorKind::ConfigParse, "--m must be at least 1");
  const bool needs_body = command != Command::cube && command != Command::conjecture63;
  if (needs_body && body.empty()) throw Error(ErrorKind::ConfigParse, "a body (--body or --preset) is required");
  if (command == Command::modulus && !(eps > 0.0 && eps < 2.0)) throw Error(ErrorKind::ConfigParse, "--eps must lie in (0, 2)");
  if (command == Command::hadwiger && !(lambda > 0.0 && lambda < 1.0)) {
    throw Error(ErrorKind::ConfigParse, "--lambda must lie in (0, 1)");
  }
  for (double e : eps_primes) {
    if (!(e > 0.0 && e < 1.0)) throw Error(ErrorKind::ConfigParse, "--eps-prime values must lie in (0, 1)");
  }
}

json ExperimentConfig::to_json() const {
  json j{{"command", std::string(to_string(command))},
         {"body", body},
         {"m", m},
         {"format", format == OutputFormat::csv ? "csv" : "json"},
         {"center", center}};
  if (seed) j["seed"] = *seed;
  switch (command) {
    case Command::thinshell:
    case Command::conjecture61:
      j["r_grid"] = r_grid.empty() ? default_r_grid() : r_grid;
      break;
    case Command::psi: j["alpha"] = alpha; j["directions"] = directions; break;
    case Command::pairs: j["eps_primes"] = eps_primes; break;
    case Command::modulus: j["eps"] = eps; j["budget"] = budget; break;
    case Command::entropy: j["t"] = t; break;
    case Command::cover: j["scale"] = scale; j["grid_step"] = grid_step; break;
    case Command::hadwiger: j["alpha"] = alpha; j["lambda"] = lambda; break;
    case Command::cube: j["n"] = n; break;
    case Command::conjecture63: j["bodies"] = bodies; break;
    default: break;
  }
  return j;
}

json RunRecord::to_json(bool include_timing) const {
  json rows_json = json::array();
  for (const auto& r : rows) {
    rows_json.push_back({{"name", r.name},
                         {"value", num(r.value)},
                         {"stderr", num(r.stderr_)},
                         {"bound", num(r.bound)},
                         {"relation", r.relation},
                         {"slack", num(r.slack)},
                         {"pass", r.pass},
                         {"anchor", r.anchor}});
  }
  json j{{"schema", std::string(kSchema)},
         {"version", version},
         {"config", config},
         {"rows", rows_json},
         {"payload", payload},
         {"overall_pass", overall_pass}};
  if (include_timing) {
    j["started"] = started;
    j["elapsed_seconds"] = elapsed_seconds;
  }
  return j;
}

RunRecord RunRecord::from_json(const json& j) {
  if (!j.is_object() || j.value("schema", "") != kSchema) {
    throw Error(ErrorKind::SchemaMismatch, "record schema is not " + std::string(kSchema));
  }
  RunRecord r;
  try {
    r.version = j.at("version").get<std::string>();
    r.config = j.at("config");
    r.payload = j.at("payload");
    r.overall_pass = j.at("overall_pass").get<bool>();
    for (const auto& row : j.at("rows")) {
      r.rows.push_back({row.at("name").get<std::string>(), num_from(row.at("value")), num_from(row.at("stderr")),
                        num_from(row.at("bound")), row.at("relation").get<std::string>(), num_from(row.at("slack")),
                        row.at("pass").get<bool>(), row.at("anchor").get<std::string>()});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::SchemaMismatch, std::string("malformed record: ") + e.what());
  }
  return r;
}

std::string RunRecord::to_csv() const {
  std::ostringstream out;
  out << kSchema << '\n';
  out << "# command=" << config.value("command", "") << " body=" << config.value("body", "")
      << " version=" << version << " overall_pass=" << (overall_pass ? "true" : "false");
  if (payload.contains("dim")) out << " dim=" << payload["dim"].get<int>();
  out << '\n';
  out << "name,value,stderr,bound,relation,slack,pass,anchor\n";
  for (const auto& r : rows) {
    out << r.name << ',' << fmt(r.value) << ',' << fmt(r.stderr_) << ',' << fmt(r.bound) << ',' << r.relation << ','
        << fmt(r.slack) << ',' << (r.pass ? "true" : "false") << ',' << r.anchor << '\n';
  }
  return out.str();
}

std::string render(const RunRecord& record, OutputFormat format) {
  if (format == OutputFormat::csv) return record.to_csv();
  return record.to_json().dump(2) + "\n";
}

RunRecord run(const ExperimentConfig& config) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  RunRecord record;
  record.started = iso_now();
  record.config = config.to_json();
  Output out;
  std::optional<Body> body;
  if (config.command != Command::cube && config.command != Command::conjecture63) {
    body = load_body(config.body, config, seed_of(config));
    out.payload["dim"] = body->dim();
  }
  switch (config.command) {
    case Command::kb: run_kb(config, *body, out); break;
    case Command::mp: run_mp(config, *body, out); break;
    case Command::thinshell: run_thinshell(config, *body, out); break;
    case Command::psi: run_psi(config, *body, out); break;
    case Command::pairs: run_pairs(config, *body, out); break;
    case Command::modulus: run_modulus(config, *body, out); break;
    case Command::entropy: run_entropy(config, *body, out); break;
    case Command::cover: run_cover(config, *body, out); break;
    case Command::hadwiger: run_hadwiger(config, *body, out); break;
    case Command::cube: run_cube(config, out); break;
    case Command::conjecture61: run_conjecture61(config, *body, out); break;
    case Command::conjecture63: run_conjecture63(config, out); break;
  }
  record.rows = std::move(out.rows);
  record.payload = std::move(out.payload);
  record.overall_pass = std::all_of(record.rows.begin(), record.rows.end(), [](const ResultRow& r) { return r.pass; });
  record.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!config.output.empty()) write_atomic(config.output, render(record, config.format));
  return record;
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw Error(ErrorKind::ConfigParse, "cannot write " + tmp.string());
    f << content;
    if (!f.flush()) throw Error(ErrorKind::ConfigParse, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error(ErrorKind::ConfigParse, "cannot rename onto " + path + ": " + ec.message());
  }
}

ReportTable report(const std::vector<std::string>& paths) {
  ReportTable table;
  table.files = paths;
  std::vector<RunRecord> records;
  std::vector<std::string> bad;
  for (const auto& p : paths) {
    try {
      std::ifstream in(p);
      if (!in) throw Error(ErrorKind::SchemaMismatch, "cannot open");
      if (in.peek() == '{') {
        json j;
        in >> j;
        records.push_back(RunRecord::from_json(j));
      } else {
        records.push_back(record_from_csv(in, p));
      }
    } catch (const std::exception&) {
      bad.push_back(p);
    }
  }
  std::set<std::string> versions;
  for (const auto& r : records) versions.insert(r.version);
  if (versions.size() > 1) {
    const std::string first = records.front().version;
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (records[i].version != first) bad.push_back(paths[i]);
    }
  }
  if (!bad.empty()) {
    std::string msg = "incompatible records:";
    for (const auto& b : bad) msg += " " + b;
    throw Error(ErrorKind::SchemaMismatch, msg);
  }

  std::ostringstream csv, text;
  csv << kSchema << '\n' << "file,command,body,rows,failed,overall_pass\n";
  text << "records: " << records.size() << '\n';
  struct Shadow {
    int dim = 0;
    std::map<std::string, double> v;
  };
  std::map<std::string, Shadow> shadow;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const std::string command = r.config.value("command", "");
    const std::string body = r.config.value("body", "");
    const long failed = std::count_if(r.rows.begin(), r.rows.end(), [](const ResultRow& x) { return !x.pass; });
    table.overall_pass = table.overall_pass && r.overall_pass;
    csv << paths[i] << ',' << command << ',' << body << ',' << r.rows.size() << ',' << failed << ','
        << (r.overall_pass ? "true" : "false") << '\n';
    text << (r.overall_pass ? "PASS " : "FAIL ") << command << ' ' << body << " (" << failed << " failed of "
         << r.rows.size() << ")\n";
    if (body.empty()) continue;
    Shadow& s = shadow[body];
    if (r.payload.contains("dim")) s.dim = r.payload["dim"].get<int>();
    for (const auto& row : r.rows) {
      if (row.name == "kb_times_2n" || row.name == "mp_times_2n" || row.name == "implied_c_kb" ||
          row.name == "implied_c_mp") {
        s.v[row.name] = row.value;
      } else if (row.name == "cover_vs_chain_bound") {
        s.v["cover_size"] = row.value;
        s.v["cover_bound"] = row.bound;
      }
    }
  }
  if (!shadow.empty()) {
    static const char* cols[] = {"kb_times_2n", "mp_times_2n", "implied_c_kb", "implied_c_mp", "cover_size",
                                 "cover_bound"};
    csv << "body,dim";
    text << "\nbody dim";
    for (const char* c : cols) {
      csv << ',' << c;
      text << ' ' << c;
    }
    csv << '\n';
    text << '\n';
    for (const auto& [body, s] : shadow) {
      csv << body << ',' << s.dim;
      text << body << ' ' << s.dim;
      for (const char* c : cols) {
        const auto it = s.v.find(c);
        const std::string cell = it == s.v.end() ? "" : fmt(it->second);
        csv << ',' << cell;
        text << ' ' << (cell.empty() ? "-" : cell);
      }
      csv << '\n';
      text << '\n';
    }
  }
  table.csv = csv.str();
  table.text = text.str();
  return table;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigParse:
    case ErrorKind::SchemaMismatch:
      return 2;
    case ErrorKind::BodyParse:
    case ErrorKind::EmptyBody:
    case ErrorKind::Unbounded:
    case ErrorKind::DimMismatch:
    case ErrorKind::InvalidSpec:
    case ErrorKind::OriginNotInterior:
    case ErrorKind::UnsupportedBodyKind:
    case ErrorKind::NotCentered:
      return 3;
    default:
      return 5;
  }
}

}  // namespace symcover
