#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cpdm/harness.hpp"
#include "cpdm/metric_core.hpp"

using namespace cpdm;

namespace {

namespace fs = std::filesystem;

struct TempFile {
  fs::path path;
  explicit TempFile(const std::string& name, const std::string& contents)
      : path(fs::temp_directory_path() / name) {
    std::ofstream out(path, std::ios::binary);
    out << contents;
  }
  ~TempFile() {
    std::error_code ec;
    fs::remove(path, ec);
  }
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("shortest round-trip double formatting") {
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(5.0) == "5");
  CHECK(format_double(0.25) == "0.25");
  for (double v : {3.141592653589793, 1e-7, 6.02e23, 0.30000000000000004}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("csv header and row shape") {
  CHECK(csv_header() ==
        "generator,n,d,seed,delta,distance_calls,wall_time_ns,max_depth,"
        "recursion_nodes,base_cases,audit_violations");
  BenchRecord rec;
  rec.generator = "line-uniform";
  rec.n = 100;
  rec.d = 1.0;
  rec.seed = 3;
  rec.delta = 0.25;
  rec.distance_calls = 4950;
  rec.wall_time_ns = 0;
  rec.max_depth = 0;
  rec.recursion_nodes = 1;
  rec.base_cases = 1;
  rec.audit_violations = 0;
  CHECK(to_csv_row(rec) == "line-uniform,100,1,3,0.25,4950,0,0,1,1,0");
  CHECK(split(to_csv_row(rec), ',').size() == split(csv_header(), ',').size());
}

TEST_CASE("bench schedule: endpoints, dedup, and guards") {
  CHECK(bench_schedule(2, 2, 1) == std::vector<std::uint64_t>{2});
  CHECK(bench_schedule(50, 50, 7) == std::vector<std::uint64_t>{50});

  const auto sched = bench_schedule(2, 2048, 5);
  REQUIRE(!sched.empty());
  CHECK(sched.front() == 2);
  CHECK(sched.back() == 2048);
  CHECK(sched.size() <= 5);
  for (std::size_t i = 1; i < sched.size(); ++i) CHECK(sched[i] > sched[i - 1]);

  CHECK_THROWS_AS(bench_schedule(1, 10, 3), InputError);
  CHECK_THROWS_AS(bench_schedule(10, 5, 3), InputError);
  CHECK_THROWS_AS(bench_schedule(2, 10, 0), InputError);
  CHECK_THROWS_AS(bench_schedule(2, 10, 1), InputError);
}

TEST_CASE("worker cap: environment override wins when sane") {
  const char* saved = std::getenv("CPDM_THREADS");
  const std::string saved_copy = saved ? saved : "";

  setenv("CPDM_THREADS", "3", 1);
  CHECK(bench_thread_cap() == 3);
  setenv("CPDM_THREADS", "garbage", 1);
  CHECK(bench_thread_cap() >= 1);
  setenv("CPDM_THREADS", "-2", 1);
  CHECK(bench_thread_cap() >= 1);
  unsetenv("CPDM_THREADS");
  CHECK(bench_thread_cap() >= 1);

  if (saved)
    setenv("CPDM_THREADS", saved_copy.c_str(), 1);
  else
    unsetenv("CPDM_THREADS");
}

TEST_CASE("run command: euclidean input end to end") {
  TempFile file("cpdm_test_points.csv", "0,0\n3,4\n10,0\n");
  RunOptions opts;
  opts.input_path = file.path.string();
  opts.d = 3.0;
  opts.seed = 1;

  std::ostringstream out, err;
  REQUIRE(run_command(opts, out, err) == 0);
  CHECK(err.str().empty());
  const auto j = nlohmann::json::parse(out.str());
  CHECK(j["schema"] == 1);
  CHECK(j["delta"] == 5.0);
  CHECK(j["pair"][0] == 0);
  CHECK(j["pair"][1] == 1);
  CHECK(j["stats"]["distance_calls"] == 3);
  CHECK(j["stats"]["recursion_nodes"] == 1);
  CHECK(j["stats"]["base_cases"] == 1);
  CHECK(!j.contains("violations"));
  CHECK(!j.contains("verified"));

  opts.verify = true;
  opts.audit = true;
  std::ostringstream out2, err2;
  REQUIRE(run_command(opts, out2, err2) == 0);
  const auto j2 = nlohmann::json::parse(out2.str());
  CHECK(j2["verified"] == true);
  CHECK(j2["violations"].is_array());
  CHECK(j2["violations"].empty());
}

TEST_CASE("run command: identical invocations produce identical bytes") {
  TempFile file("cpdm_test_points2.csv", "0.5\n0.1\n0.9\n0.3\n0.72\n");
  RunOptions opts;
  opts.input_path = file.path.string();
  opts.d = 1.0;
  opts.seed = 7;
  std::ostringstream a, b, err;
  REQUIRE(run_command(opts, a, err) == 0);
  REQUIRE(run_command(opts, b, err) == 0);
  CHECK(a.str() == b.str());
}

TEST_CASE("run command: matrix metric and failure modes") {
  TempFile good("cpdm_test_matrix.txt", "3\n0 1 2\n1 0 1.5\n2 1.5 0\n");
  RunOptions opts;
  opts.input_path = good.path.string();
  opts.metric = "matrix";
  opts.d = 2.0;
  std::ostringstream out, err;
  REQUIRE(run_command(opts, out, err) == 0);
  const auto j = nlohmann::json::parse(out.str());
  CHECK(j["delta"] == 1.0);

  TempFile bad("cpdm_test_matrix_bad.txt", "2\n0 1\n2 0\n");
  RunOptions bopts;
  bopts.input_path = bad.path.string();
  bopts.metric = "matrix";
  std::ostringstream bout, berr;
  CHECK(run_command(bopts, bout, berr) == 1);
  CHECK(berr.str().find("error:") != std::string::npos);
  CHECK(berr.str().find("symmetry") != std::string::npos);

  RunOptions missing;
  missing.input_path = "/nonexistent/file.csv";
  std::ostringstream mout, merr;
  CHECK(run_command(missing, mout, merr) == 1);
  CHECK(merr.str().find("error:") != std::string::npos);

  RunOptions unknown;
  unknown.input_path = good.path.string();
  unknown.metric = "hamming";
  std::ostringstream uout, uerr;
  CHECK(run_command(unknown, uout, uerr) == 1);
  CHECK(uerr.str().find("unknown metric") != std::string::npos);
}

TEST_CASE("bench command: deterministic CSV with per-size summaries") {
  BenchOptions opts;
  opts.generator = GeneratorKind::line_uniform;
  opts.n_min = 64;
  opts.n_max = 256;
  opts.n_steps = 3;
  opts.seeds = 2;
  opts.d = 1.0;
  opts.out_path = "-";

  std::ostringstream a, aerr;
  REQUIRE(bench_command(opts, a, aerr) == 0);
  std::ostringstream b, berr;
  REQUIRE(bench_command(opts, b, berr) == 0);
  CHECK(a.str() == b.str());

  const auto lines = split(a.str(), '\n');
  REQUIRE(!lines.empty());
  CHECK(lines[0] == csv_header());
  std::size_t rows = 0, summaries = 0, n64_rows = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    if (lines[i][0] == '#') {
      ++summaries;
      CHECK(lines[i].find("mean_distance_calls=") != std::string::npos);
      CHECK(lines[i].find("mean_normalized=") != std::string::npos);
      continue;
    }
    ++rows;
    const auto cells = split(lines[i], ',');
    REQUIRE(cells.size() == 11);
    CHECK(cells[0] == "line-uniform");
    CHECK(cells[6] == "0");  // wall time stays zero without --timing
    if (cells[1] == "64") {
      ++n64_rows;
      CHECK(cells[8] == "1");  // below the base threshold: one node
      CHECK(cells[9] == "1");
    }
  }
  CHECK(rows == 6);  // 3 sizes x 2 seeds
  CHECK(summaries == 3);
  CHECK(n64_rows == 2);
}

TEST_CASE("bench command: file output matches the stream output") {
  const fs::path out_path = fs::temp_directory_path() / "cpdm_test_bench.csv";
  BenchOptions opts;
  opts.n_min = 32;
  opts.n_max = 128;
  opts.n_steps = 2;
  opts.seeds = 1;
  opts.out_path = out_path.string();

  std::ostringstream msg, err;
  REQUIRE(bench_command(opts, msg, err) == 0);
  CHECK(msg.str().find("wrote 2 rows to ") != std::string::npos);

  std::ifstream in(out_path, std::ios::binary);
  std::stringstream file_bytes;
  file_bytes << in.rdbuf();

  opts.out_path = "-";
  std::ostringstream direct, derr;
  REQUIRE(bench_command(opts, direct, derr) == 0);
  CHECK(file_bytes.str() == direct.str());

  std::error_code ec;
  fs::remove(out_path, ec);
}

TEST_CASE("bench command: guard failures exit with code one") {
  BenchOptions opts;
  opts.n_min = 1;
  opts.n_max = 10;
  std::ostringstream out, err;
  CHECK(bench_command(opts, out, err) == 1);
  CHECK(err.str().find("error:") != std::string::npos);

  BenchOptions one_step;
  one_step.n_min = 10;
  one_step.n_max = 100;
  one_step.n_steps = 1;
  std::ostringstream out2, err2;
  CHECK(bench_command(one_step, out2, err2) == 1);
}

TEST_CASE("verify command: zero trials warns and succeeds") {
  VerifyOptions opts;
  opts.trials = 0;
  std::ostringstream out, err;
  CHECK(verify_command(opts, out, err) == 0);
  CHECK(out.str().find("warning") != std::string::npos);
  CHECK(err.str().empty());
}

TEST_CASE("verify command: a small filtered run reports its suite") {
  VerifyOptions opts;
  opts.trials = 2;
  opts.seed = 5;
  opts.max_n = 200;
  opts.suite = "dimension";
  std::ostringstream out, err;
  REQUIRE(verify_command(opts, out, err) == 0);
  CHECK(out.str().find("suite dimension:") != std::string::npos);
  CHECK(out.str().find("verify: 1 suites, 0 failures") != std::string::npos);
  CHECK(err.str().empty());
}

TEST_CASE("verify command: an unknown suite filter runs nothing") {
  VerifyOptions opts;
  opts.trials = 2;
  opts.suite = "nonexistent";
  std::ostringstream out, err;
  CHECK(verify_command(opts, out, err) == 0);
  CHECK(out.str().find("verify: 0 suites, 0 failures") != std::string::npos);
}

}  // TEST_SUITE
