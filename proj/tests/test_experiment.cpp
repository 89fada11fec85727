#include "symcover/experiment.hpp"
#include "symcover/presets.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace symcover;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("symcover_test_" + name)).string();
}

}  // namespace

TEST_CASE("preset corpus") {
  const auto& corpus = preset_corpus();
  CHECK(corpus.size() == 12);
  for (const auto& p : corpus) {
    const Body b = make_body(p.spec);
    CHECK(b.dim() <= 8);
    CHECK_MESSAGE(b.origin_symmetric() == p.symmetric, p.name);
  }
  CHECK(find_preset("lp:2.5:3").spec->dim() == 3);
  CHECK_THROWS_AS(find_preset("dodecahedron"), Error);
  // Seed-pinned corpus is stable.
  CHECK(find_preset("hpoly4").spec == find_preset("hpoly4").spec);
}

TEST_CASE("config validation") {
  ExperimentConfig c;
  c.command = Command::kb;
  c.body = "triangle";
  try {
    run(c);
    FAIL("expected ConfigParse");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ConfigParse);
    CHECK(exit_code(e.kind()) == 2);
  }
  c.seed = 1;
  c.m = 0;
  CHECK_THROWS_AS(run(c), Error);
  CHECK(exit_code(ErrorKind::BodyParse) == 3);
  CHECK(exit_code(ErrorKind::SolverStall) == 5);
  CHECK_THROWS_AS(command_from_string("nope"), Error);
}

TEST_CASE("unknown bodies are body errors") {
  ExperimentConfig c;
  c.command = Command::mp;
  c.body = "no_such_body";
  c.seed = 1;
  try {
    run(c);
    FAIL("expected BodyParse");
  } catch (const Error& e) {
    CHECK(exit_code(e.kind()) == 3);
  }
}

TEST_CASE("cube command is exact and deterministic") {
  ExperimentConfig c;
  c.command = Command::cube;
  c.n = 3;
  const RunRecord r = run(c);
  CHECK(r.overall_pass);
  CHECK(r.payload["exact"]["3"] == "38/35");
}

TEST_CASE("identical configs give byte-identical JSON") {
  ExperimentConfig c;
  c.command = Command::kb;
  c.body = "simplex3";
  c.seed = 7;
  c.m = 5000;
  c.output = temp_path("a.json");
  run(c);
  const std::string a = slurp(c.output);
  c.output = temp_path("b.json");
  run(c);
  CHECK(a == slurp(c.output));
  CHECK(a.find("elapsed") == std::string::npos);
}

TEST_CASE("CSV records carry the schema line and round-trip through report") {
  ExperimentConfig c;
  c.command = Command::kb;
  c.body = "triangle";
  c.seed = 7;
  c.m = 1000;
  c.format = OutputFormat::csv;
  c.output = temp_path("t.csv");
  run(c);
  const std::string text = slurp(c.output);
  CHECK(text.rfind("symcover-v1\n", 0) == 0);
  const ReportTable t = report({c.output});
  CHECK(t.overall_pass);
  CHECK(t.csv.find("triangle,2,2.66") != std::string::npos);
}

TEST_CASE("report") {
  CHECK(report({}).overall_pass);
  const std::string a = temp_path("r1.json"), b = temp_path("r2.json");
  ExperimentConfig c;
  c.command = Command::mp;
  c.body = "cube3";
  c.seed = 1;
  c.m = 2000;
  c.output = a;
  const RunRecord r = run(c);
  RunRecord other = r;
  other.version = "0.0.9";
  write_atomic(b, other.to_json().dump());
  try {
    report({a, b});
    FAIL("expected SchemaMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SchemaMismatch);
    CHECK(std::string(e.what()).find(b) != std::string::npos);
  }
  const RunRecord back = RunRecord::from_json(r.to_json());
  CHECK(back.to_json() == r.to_json());
}
