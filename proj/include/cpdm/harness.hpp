#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cpdm/spaces.hpp"

namespace cpdm {

struct BenchRecord {
  std::string generator;
  std::uint64_t n = 0;
  double d = 0.0;
  std::uint64_t seed = 0;
  double delta = 0.0;
  std::uint64_t distance_calls = 0;
  std::uint64_t wall_time_ns = 0;
  std::uint32_t max_depth = 0;
  std::uint64_t recursion_nodes = 0;
  std::uint64_t base_cases = 0;
  std::uint64_t audit_violations = 0;
};

// Shortest decimal form that round-trips; shared by the JSON and CSV writers
// so equal inputs produce byte-equal outputs.
std::string format_double(double v);

std::string csv_header();
std::string to_csv_row(const BenchRecord& rec);

struct RunOptions {
  std::string input_path;
  std::string metric = "euclidean";  // euclidean | matrix
  double d = 1.0;
  std::uint64_t seed = 1;
  bool audit = false;
  bool verify = false;
};

struct BenchOptions {
  GeneratorKind generator = GeneratorKind::line_uniform;
  std::uint64_t n_min = 2;
  std::uint64_t n_max = 2;
  std::uint64_t n_steps = 1;
  std::uint64_t seeds = 1;
  double d = 1.0;
  std::string out_path;  // "-" writes to stdout
  // Wall time is written as 0 unless enabled, keeping the CSV a pure
  // function of the flags.
  bool timing = false;
};

struct VerifyOptions {
  std::uint64_t trials = 25;
  std::uint64_t seed = 1;
  std::uint64_t max_n = 4096;
  std::string suite;  // empty: all suites
};

// Exit codes: 0 success, 1 bad input, 2 verification failure.
int run_command(const RunOptions& opts, std::ostream& out, std::ostream& err);
int bench_command(const BenchOptions& opts, std::ostream& out,
                  std::ostream& err);
int verify_command(const VerifyOptions& opts, std::ostream& out,
                   std::ostream& err);

// Geometric size schedule from n_min to n_max inclusive, deduplicated after
// rounding; steps is the number of grid values requested.
std::vector<std::uint64_t> bench_schedule(std::uint64_t n_min,
                                          std::uint64_t n_max,
                                          std::uint64_t steps);

// Worker cap for the bench fan-out: CPDM_THREADS if set and positive, else
// the OpenMP default.
int bench_thread_cap();

}  // namespace cpdm
