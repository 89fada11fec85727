#pragma once

#include "symcover/common.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace symcover {

inline constexpr std::string_view kSchema = "symcover-v1";
inline constexpr std::string_view kVersion = "0.1.0";

enum class Command { kb, mp, thinshell, psi, pairs, modulus, entropy, cover, hadwiger, cube, conjecture61, conjecture63 };
enum class OutputFormat { csv, json };

std::string_view to_string(Command command);
/// Throws ConfigParse.
Command command_from_string(const std::string& name);
bool is_stochastic(Command command);

struct ExperimentConfig {
  Command command = Command::kb;
  std::string body;                 // preset name or JSON path
  std::vector<std::string> bodies;  // conjecture63
  long m = 100000;
  std::optional<std::uint64_t> seed;
  std::string output;  // empty: no file
  OutputFormat format = OutputFormat::json;
  bool center = false;  // translate the body to its barycenter first

  std::vector<double> r_grid;
  std::vector<double> eps_primes{0.2, 0.4, 0.6};
  double eps = 0.5;     // modulus of convexity
  double alpha = 0.0;   // ≤ 0: command default
  double lambda = 0.99;
  double t = 0.0;       // entropy: ≤ 0 means the default shell parameter
  int directions = 32;  // psi
  int n = 0;            // cube: 0 means 1..10
  double scale = 0.5;   // cover: covering body = scale·K
  double grid_step = 0.0;
  int budget = 400;     // modulus search evaluations

  /// Throws ConfigParse.
  void validate() const;
  nlohmann::json to_json() const;
};

/// One output row: a measured value against a bound, or a plain value.
struct ResultRow {
  std::string name;
  double value = 0.0;
  double stderr_ = 0.0;
  double bound = 0.0;
  std::string relation = "info";  // le, ge, info
  double slack = 0.0;
  bool pass = true;
  std::string anchor;
};

struct RunRecord {
  nlohmann::json config;
  std::string version{kVersion};
  std::string started;
  double elapsed_seconds = 0.0;
  std::vector<ResultRow> rows;
  nlohmann::json payload = nlohmann::json::object();
  bool overall_pass = true;

  /// Sorted keys; timing fields only when asked, so outputs stay reproducible.
  nlohmann::json to_json(bool include_timing = false) const;
  std::string to_csv() const;
  /// Throws SchemaMismatch.
  static RunRecord from_json(const nlohmann::json& j);
};

/// Dispatches to the owning module. Throws ConfigParse, BodyParse and any
/// module error.
RunRecord run(const ExperimentConfig& config);

/// Writes via a temporary file and rename.
void write_atomic(const std::string& path, const std::string& content);
std::string render(const RunRecord& record, OutputFormat format);

struct ReportTable {
  std::vector<std::string> files;
  std::string csv;   // pass/fail matrix and the shadow table
  std::string text;  // human-readable summary
  bool overall_pass = true;
};

/// Reads JSON or CSV records. Throws SchemaMismatch naming every offending
/// file.
ReportTable report(const std::vector<std::string>& paths);

/// Process exit status: 2 config, 3 body, 5 numeric.
int exit_code(ErrorKind kind);

}  // namespace symcover
