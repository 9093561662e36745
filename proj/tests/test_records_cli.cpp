#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "rmflab/cli.hpp"
#include "rmflab/errors.hpp"
#include "rmflab/records.hpp"

using namespace rmflab;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "rmflab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliRun r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "rmflab_cli_tests";
  fs::create_directories(dir);
  const auto p = dir / name;
  fs::remove(p);
  fs::remove(manifest_path_for(p));
  return p;
}

std::vector<ResultRecord> sample_records() {
  EstimateWithCI e;
  e.point = 1.25;
  e.ci_lo = 1.0;
  e.ci_hi = 1.5;
  e.n_samples = 100;
  e.seed = 42;
  auto undefined = make_record("events", "P_change_given_AB", "rmf", 1000.0, 1, 1.0, EstimateWithCI{});
  return {make_record("moments", "E|M|^q", "rmf", 1e4, 8, 1.0, e),
          exact_record("lambda", "exact", "rmf", 0.1 + 0.2, 100, 1.5, 68.547901234567),
          undefined};
}

std::vector<ResultRecord> moment_rows(const std::vector<ResultRecord>& all) {
  std::vector<ResultRecord> out;
  for (const auto& r : all) {
    if (r.quantity == "E|M|^q") out.push_back(r);
  }
  return out;
}

}  // namespace

TEST_CASE("csv round trip keeps every bit, NaN included") {
  const auto recs = sample_records();
  std::stringstream s;
  write_csv(s, recs);
  CHECK(s.str().rfind(csv_header() + "\n", 0) == 0);
  const auto back = read_csv(s);
  REQUIRE(back.size() == recs.size());
  CHECK(back[0] == recs[0]);
  CHECK(back[1] == recs[1]);
  CHECK(std::isnan(back[2].point));
  CHECK(std::isnan(back[2].ci_lo));
  CHECK(back[2].experiment == "events");
}

TEST_CASE("jsonl round trip") {
  const auto recs = sample_records();
  std::stringstream s;
  write_jsonl(s, recs, "out.jsonl.manifest.json", "abc");
  CHECK(s.str().find("\"point\":null") != std::string::npos);
  CHECK(s.str().find("\"run_id\":\"abc\"") != std::string::npos);
  const auto back = read_jsonl(s);
  REQUIRE(back.size() == recs.size());
  CHECK(back[0] == recs[0]);
  CHECK(back[1] == recs[1]);
  CHECK(std::isnan(back[2].point));
}

TEST_CASE("format names and malformed input") {
  CHECK(parse_format("csv") == RecordFormat::csv);
  CHECK(parse_format("json-lines") == RecordFormat::jsonl);
  CHECK_THROWS_AS(parse_format("xml"), ParameterError);
  std::stringstream bad("not,a,header\n");
  CHECK_THROWS_AS(read_csv(bad), ParameterError);
  CHECK(format_number(std::numeric_limits<double>::quiet_NaN()).empty());
  CHECK(format_number(0.1) == "0.10000000000000001");
}

TEST_CASE("manifest run id ignores the wall time only") {
  RunManifest m;
  m.command = "moments";
  m.plan = {{"x", "1000"}};
  m.master_seed = 5;
  RunManifest n = m;
  n.wall_time_seconds = 12.0;
  CHECK(m.run_id() == n.run_id());
  n.master_seed = 6;
  CHECK(m.run_id() != n.run_id());
}

TEST_CASE("export to an unwritable path is a resource error") {
  const fs::path p = "/nonexistent-dir/sub/out.csv";
  CHECK_THROWS_AS(export_records(p, RecordFormat::csv, sample_records(), RunManifest{}), ResourceError);
  CHECK_FALSE(fs::exists(p));
}

TEST_CASE("cli: unknown flag exits 2 and writes nothing") {
  const auto p = scratch("unknown.csv");
  const auto r = run({"moments", "--x", "1000", "--bogus", "1", "--out", p.string()});
  CHECK(r.code == kExitParameter);
  CHECK(r.err.find("rmflab: error[parameter]:") != std::string::npos);
  CHECK_FALSE(fs::exists(p));
  CHECK(run({"moments", "--x", "1000", "--samples", "0", "--seed", "1"}).code == kExitParameter);
  CHECK(run({"frobnicate"}).code == kExitParameter);
}

TEST_CASE("cli: budget refusal exits 3") {
  const auto p = scratch("budget.csv");
  const auto r = run({"moments", "--x", "1e12", "--samples", "2", "--seed", "1", "--out", p.string()});
  CHECK(r.code == kExitResource);
  CHECK(r.err.find("rmflab: error[resource]:") != std::string::npos);
  CHECK_FALSE(fs::exists(p));
}

TEST_CASE("cli: same config and seed give byte-identical files for any worker count") {
  const auto a = scratch("a.csv"), b = scratch("b.csv");
  const std::vector<std::string> base{"moments", "--x-range", "100:10000:3", "--samples", "200",
                                      "--seed", "7", "--q", "1,2"};
  auto args_a = base, args_b = base;
  args_a.insert(args_a.end(), {"--out", a.string()});
  args_b.insert(args_b.end(), {"--out", b.string(), "--workers", "3"});
  REQUIRE(run(args_a).code == kExitOk);
  REQUIRE(run(args_b).code == kExitOk);
  const auto text = slurp(a);
  CHECK(text == slurp(b));
  CHECK(fs::exists(manifest_path_for(a)));
  std::istringstream in(text);
  CHECK(moment_rows(read_csv(in)).size() == 6);
  CHECK(slurp(manifest_path_for(a)).find("\"master_seed\": 7") != std::string::npos);
}

TEST_CASE("cli: config file, with flags taking precedence") {
  const auto cfg = scratch("run.cfg");
  {
    std::ofstream f(cfg);
    f << "# moments at one point\nx = 500\nsamples = 50\nseed = 3\nq = 2\n";
  }
  const auto from_cfg = run({"moments", "--config", cfg.string()});
  REQUIRE(from_cfg.code == kExitOk);
  const auto flagged = run({"moments", "--config", cfg.string(), "--samples", "60"});
  REQUIRE(flagged.code == kExitOk);
  std::istringstream a(from_cfg.out), b(flagged.out);
  const auto ra = moment_rows(read_csv(a)), rb = moment_rows(read_csv(b));
  REQUIRE(ra.size() == 1);
  REQUIRE(rb.size() == 1);
  CHECK(ra[0].n_samples == 50);
  CHECK(rb[0].n_samples == 60);
  CHECK(ra[0].x == 500.0);
  CHECK(ra[0].seed == rb[0].seed);

  {
    std::ofstream f(cfg);
    f << "x = 500\nsampels = 50\n";
  }
  CHECK(run({"moments", "--config", cfg.string()}).code == kExitParameter);
}

TEST_CASE("cli: seed handling") {
  CHECK(run({"selftest", "--only", "9"}).code == kExitParameter);
  const auto drawn = run({"moments", "--x", "100", "--samples", "5"});
  CHECK(drawn.code == kExitOk);
  CHECK(drawn.err.find("rmflab: warning:") != std::string::npos);
  const auto lambda = run({"lambda", "--N", "100", "--x", "1e50", "--q", "1"});
  CHECK(lambda.code == kExitOk);
  CHECK(lambda.err.empty());
}

TEST_CASE("cli: selftest runs a chosen criterion") {
  const auto r = run({"selftest", "--seed", "1", "--only", "9"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("[PASS] C9") != std::string::npos);
}
