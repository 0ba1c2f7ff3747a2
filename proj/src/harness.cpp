#include "cpdm/harness.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "cpdm/closest_pair.hpp"
#include "cpdm/rng.hpp"
#include "cpdm/verify.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cpdm {

std::string format_double(double v) {
  std::array<char, 64> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string csv_header() {
  return "generator,n,d,seed,delta,distance_calls,wall_time_ns,max_depth,"
         "recursion_nodes,base_cases,audit_violations";
}

std::string to_csv_row(const BenchRecord& rec) {
  std::ostringstream os;
  os << rec.generator << ',' << rec.n << ',' << format_double(rec.d) << ','
     << rec.seed << ',' << format_double(rec.delta) << ','
     << rec.distance_calls << ',' << rec.wall_time_ns << ',' << rec.max_depth
     << ',' << rec.recursion_nodes << ',' << rec.base_cases << ','
     << rec.audit_violations;
  return os.str();
}

int run_command(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    std::unique_ptr<MetricSpace> space;
    if (opts.metric == "euclidean")
      space = std::make_unique<EuclideanSpace>(load_points_csv(opts.input_path));
    else if (opts.metric == "matrix")
      space = std::make_unique<ExplicitSpace>(load_matrix(opts.input_path));
    else
      throw InputError("unknown metric kind: " + opts.metric);

    AlgorithmConfig cfg;
    cfg.audit = opts.audit;
    const AuditedResult audited =
        opts.audit ? closest_pair_audited(*space, opts.d, opts.seed, cfg)
                   : AuditedResult{closest_pair(*space, opts.d, opts.seed, cfg),
                                   AuditReport{}};
    const ClosestPairResult& res = audited.result;

    nlohmann::json j;
    j["schema"] = 1;
    j["delta"] = res.delta;
    j["pair"] = {res.a, res.b};
    j["stats"] = {
        {"distance_calls", res.stats.distance_calls},
        {"sepann_iterations", res.stats.sepann_iterations},
        {"sparse_loop_iterations", res.stats.sparse_loop_iterations},
        {"recursion_nodes", res.stats.recursion_nodes},
        {"max_depth", res.stats.max_depth},
        {"base_cases", res.stats.base_cases},
        {"audit_violations", res.stats.audit_violations},
    };
    if (opts.audit) j["violations"] = audited.report.violations;

    bool verified_ok = true;
    if (opts.verify) {
      RunContext octx(0);
      const auto ids = all_points(*space);
      const PairDistance oracle = brute_force_closest_pair(*space, octx, ids);
      verified_ok = oracle.delta == res.delta;
      j["verified"] = verified_ok;
    }
    out << j.dump() << '\n';
    if (!verified_ok) {
      err << "verification failed: recursion delta differs from the "
             "brute-force scan\n";
      return 2;
    }
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

std::vector<std::uint64_t> bench_schedule(std::uint64_t n_min,
                                          std::uint64_t n_max,
                                          std::uint64_t steps) {
  if (n_min < 2 || n_max < n_min)
    throw InputError("bench: size range must satisfy 2 <= A <= B");
  if (steps < 1) throw InputError("bench: need at least one step");
  std::vector<std::uint64_t> out;
  if (n_min == n_max) {
    out.push_back(n_min);
    return out;
  }
  if (steps == 1)
    throw InputError("bench: a proper size range needs at least two steps");
  const double lo = std::log(static_cast<double>(n_min));
  const double hi = std::log(static_cast<double>(n_max));
  for (std::uint64_t i = 0; i < steps; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(steps - 1);
    const auto n = static_cast<std::uint64_t>(
        std::llround(std::exp(lo + f * (hi - lo))));
    const std::uint64_t clamped = std::clamp(n, n_min, n_max);
    if (out.empty() || out.back() != clamped) out.push_back(clamped);
  }
  return out;
}

int bench_thread_cap() {
#ifdef _OPENMP
  int threads = omp_get_max_threads();
#else
  int threads = 1;
#endif
  if (const char* env = std::getenv("CPDM_THREADS")) {
    int requested = 0;
    const auto res = std::from_chars(env, env + std::strlen(env), requested);
    if (res.ec == std::errc{} && requested > 0) threads = requested;
  }
  return threads;
}

namespace {

BenchRecord bench_cell(const BenchOptions& opts, std::uint64_t n,
                       std::uint64_t s) {
  // The instance depends on (generator, n, s) only, so a cell is
  // reproducible from its CSV row alone.
  const std::uint64_t inst_seed =
      mix_seed(n * 0x10001 + s, static_cast<std::uint64_t>(opts.generator));
  const auto space = generate_instance(opts.generator, n, inst_seed);
  BenchRecord rec;
  rec.generator = to_string(opts.generator);
  rec.n = n;
  rec.d = opts.d;
  rec.seed = s;
  const auto t0 = std::chrono::steady_clock::now();
  const ClosestPairResult res = closest_pair(*space, opts.d, s);
  const auto t1 = std::chrono::steady_clock::now();
  rec.delta = res.delta;
  rec.distance_calls = res.stats.distance_calls;
  rec.wall_time_ns =
      opts.timing
          ? static_cast<std::uint64_t>(
                std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0)
                    .count())
          : 0;
  rec.max_depth = res.stats.max_depth;
  rec.recursion_nodes = res.stats.recursion_nodes;
  rec.base_cases = res.stats.base_cases;
  rec.audit_violations = res.stats.audit_violations;
  return rec;
}

}  // namespace

int bench_command(const BenchOptions& opts, std::ostream& out,
                  std::ostream& err) {
  try {
    if (opts.seeds < 1) throw InputError("bench: need at least one seed");
    if (!(opts.d >= 1.0))
      throw InputError("bench: dimension bound must be >= 1");
    const auto sizes = bench_schedule(opts.n_min, opts.n_max, opts.n_steps);

    struct Cell {
      std::uint64_t n;
      std::uint64_t s;
    };
    std::vector<Cell> cells;
    for (std::uint64_t n : sizes)
      for (std::uint64_t s = 0; s < opts.seeds; ++s) cells.push_back({n, s});
    std::vector<BenchRecord> records(cells.size());

    const int threads = bench_thread_cap();
    (void)threads;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(cells.size()); ++i)
      records[static_cast<std::size_t>(i)] =
          bench_cell(opts, cells[static_cast<std::size_t>(i)].n,
                     cells[static_cast<std::size_t>(i)].s);

    std::ostringstream csv;
    csv << csv_header() << '\n';
    std::size_t idx = 0;
    for (std::uint64_t n : sizes) {
      std::uint64_t total_calls = 0;
      for (std::uint64_t s = 0; s < opts.seeds; ++s, ++idx) {
        csv << to_csv_row(records[idx]) << '\n';
        total_calls += records[idx].distance_calls;
      }
      const double mean =
          static_cast<double>(total_calls) / static_cast<double>(opts.seeds);
      const double normalized =
          mean / (static_cast<double>(n) * std::log2(static_cast<double>(n)));
      csv << "# n=" << n << " mean_distance_calls=" << format_double(mean)
          << " mean_normalized=" << format_double(normalized) << '\n';
    }

    if (opts.out_path.empty() || opts.out_path == "-") {
      out << csv.str();
    } else {
      std::ofstream file(opts.out_path, std::ios::binary);
      if (!file) throw InputError("cannot open output file: " + opts.out_path);
      file << csv.str();
      out << "wrote " << records.size() << " rows to " << opts.out_path
          << '\n';
    }
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int verify_command(const VerifyOptions& opts, std::ostream& out,
                   std::ostream& err) {
  if (opts.trials == 0) {
    out << "warning: --trials 0, no suites run\n";
    return 0;
  }
  verify::Options vo;
  vo.trials = opts.trials;
  vo.seed = opts.seed;
  vo.max_n = opts.max_n;
  const auto results = verify::run_suites(vo, opts.suite);
  std::uint64_t failures = 0;
  for (const auto& suite : results) {
    out << "suite " << suite.name << ": " << suite.checks << " checks, "
        << suite.failures.size() << " failures\n";
    for (const auto& msg : suite.failures) out << "  " << msg << '\n';
    failures += suite.failures.size();
  }
  out << "verify: " << results.size() << " suites, " << failures
      << " failures\n";
  if (failures != 0) {
    err << "verify failed; replay: cpdm verify --trials " << opts.trials
        << " --seed " << opts.seed;
    if (!opts.suite.empty()) err << " --suite " << opts.suite;
    err << '\n';
    return 2;
  }
  return 0;
}

}  // namespace cpdm
