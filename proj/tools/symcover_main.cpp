#include "symcover/body_json.hpp"
#include "symcover/experiment.hpp"
#include "symcover/kernels.hpp"
#include "symcover/presets.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

using namespace symcover;

namespace {

constexpr int kLedgerFail = 4;

struct Flags {
  ExperimentConfig config;
  std::string preset;
  std::uint64_t seed = 0;
  std::string format = "json";
};

void common_flags(CLI::App* sub, Flags& f, bool body = true) {
  if (body) {
    sub->add_option("--body", f.config.body, "body JSON file or preset name");
    sub->add_option("--preset", f.preset, "preset name (cube:N, simplex:N, lp:P:N, ...)");
    sub->add_flag("--center", f.config.center, "translate the body to its barycenter first");
  }
  sub->add_option("--m", f.config.m, "sample size")->capture_default_str();
  sub->add_option("--seed", f.seed, "master seed (required for stochastic commands)");
  sub->add_option("--output,-o", f.config.output, "output file, written atomically");
  sub->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convex-body symmetry, concentration and covering experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));
  Flags f;

  std::vector<CLI::App*> runs;
  auto add = [&](Command c, const std::string& help, bool body = true) {
    CLI::App* sub = app.add_subcommand(std::string(to_string(c)), help);
    common_flags(sub, f, body);
    runs.push_back(sub);
    return sub;
  };
  add(Command::kb, "Kovner-Besicovitch measure, Milman-Pajor ratio and their ledger");
  add(Command::mp, "Milman-Pajor ratio at the barycenter");
  add(Command::thinshell, "shell statistics in isotropic position")
      ->add_option("--r", f.config.r_grid, "radius grid (multiples of L_K sqrt n)");
  CLI::App* psi = add(Command::psi, "psi_alpha moment-ratio estimate in isotropic position");
  psi->add_option("--alpha", f.config.alpha, "alpha (default 1)");
  psi->add_option("--directions", f.config.directions, "random directions")->capture_default_str();
  add(Command::pairs, "pair-distance concentration in the gauge")
      ->add_option("--eps-prime", f.config.eps_primes, "eps' values")->capture_default_str();
  CLI::App* mod = add(Command::modulus, "modulus of convexity search");
  mod->add_option("--eps", f.config.eps, "epsilon")->capture_default_str();
  mod->add_option("--budget", f.config.budget, "evaluations per start")->capture_default_str();
  add(Command::entropy, "entropy-gap lower bounds against the Milman-Pajor ratio")
      ->add_option("--t", f.config.t, "shell parameter (default 1 - 2/sqrt 5)");
  CLI::App* cov = add(Command::cover, "greedy cover of K by scale*K with volume bounds");
  cov->add_option("--scale", f.config.scale, "covering body scale")->capture_default_str();
  cov->add_option("--grid-step", f.config.grid_step, "candidate grid step (default inradius/2)");
  CLI::App* had = add(Command::hadwiger, "fractional cover, rounding and the covering bound chain");
  had->add_option("--alpha", f.config.alpha, "split parameter (default 1 - 1/n)");
  had->add_option("--lambda", f.config.lambda, "homothety factor")->capture_default_str();
  add(Command::cube, "exact E||X+Y|| for the cube", false)->add_option("--n", f.config.n, "dimension (default 1..10)");
  add(Command::conjecture61, "half-sum ratio curve")->add_option("--r", f.config.r_grid, "radius grid");
  add(Command::conjecture63, "E||X+Y|| table with the triangle-inequality cap", false)
      ->add_option("--bodies", f.config.bodies, "body files or preset names")
      ->required();
  runs.back()->add_flag("--center", f.config.center, "translate each body to its barycenter first");

  CLI::App* rep = app.add_subcommand("report", "aggregate run records");
  std::vector<std::string> records;
  std::string rep_out;
  rep->add_option("records", records, "record files");
  rep->add_option("--output,-o", rep_out, "CSV output file");

  CLI::App* pre = app.add_subcommand("presets", "list presets or write them as JSON");
  std::string preset_dir;
  pre->add_option("--write", preset_dir, "directory to write <name>.json files into");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {

    if (rep->parsed()) {
      const ReportTable t = report(records);
      std::cout << t.text;
      if (!rep_out.empty()) write_atomic(rep_out, t.csv);
      return t.overall_pass ? 0 : kLedgerFail;
    }
    if (pre->parsed()) {
      for (const auto& p : preset_corpus()) {
        std::cout << p.name << " n=" << p.spec->dim() << (p.symmetric ? " symmetric" : "")
                  << (p.centered ? " centered" : "") << '\n';
        if (!preset_dir.empty()) {
          std::filesystem::create_directories(preset_dir);
          write_atomic(preset_dir + "/" + p.name + ".json", spec_to_json(*p.spec).dump(2) + "\n");
        }
      }
      return 0;
    }
    for (CLI::App* sub : runs) {
      if (!sub->parsed()) continue;
      f.config.command = command_from_string(sub->get_name());
      if (!f.preset.empty()) {
        if (!f.config.body.empty()) throw Error(ErrorKind::ConfigParse, "give either --body or --preset");
        f.config.body = f.preset;
      }
      if (sub->count("--seed") > 0) f.config.seed = f.seed;
      f.config.format = f.format == "csv" ? OutputFormat::csv : OutputFormat::json;
      const RunRecord record = run(f.config);
      if (f.config.output.empty()) std::cout << render(record, f.config.format);
      std::cerr << "elapsed " << record.elapsed_seconds << " s, overall_pass="
                << (record.overall_pass ? "true" : "false") << '\n';
      return record.overall_pass ? 0 : kLedgerFail;
    }
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 5;
  }
  return 0;
}
