// Compares the serial and OpenMP variants of the two parallel kernels
// (quadratic pair scan, metric-axiom validation) for speed and, more
// importantly, bit-identical results.

#include <chrono>
#include <iostream>
#include <string>
#include <vector>

#include "cpdm/metric_core.hpp"
#include "cpdm/rng.hpp"
#include "cpdm/spaces.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

cpdm::DistanceMatrix random_metric(std::size_t n, std::uint64_t seed) {
  cpdm::Rng rng(seed);
  cpdm::DistanceMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 1.0 + rng.unit();
      m.at(i, j) = v;
      m.at(j, i) = v;
    }
  return m;
}

int failures = 0;

void check(bool ok, const std::string& what) {
  if (!ok) {
    ++failures;
    std::cout << "MISMATCH: " << what << '\n';
  }
}

void compare_pair_scan(std::uint64_t n) {
  const auto space = cpdm::generate_instance(cpdm::GeneratorKind::square_uniform,
                                             n, 0xbe9c0 + n);
  const auto ids = cpdm::all_points(*space);

  cpdm::RunContext serial_ctx(1);
  auto t0 = std::chrono::steady_clock::now();
  const auto serial = cpdm::brute_force_closest_pair_serial(*space, serial_ctx, ids);
  const double serial_ms = ms_since(t0);

  cpdm::RunContext parallel_ctx(1);
  t0 = std::chrono::steady_clock::now();
  const auto parallel =
      cpdm::brute_force_closest_pair_parallel(*space, parallel_ctx, ids);
  const double parallel_ms = ms_since(t0);

  check(serial.delta == parallel.delta && serial.a == parallel.a &&
            serial.b == parallel.b && serial_ctx.calls == parallel_ctx.calls,
        "pair scan n=" + std::to_string(n));
  std::cout << "pair-scan      n=" << n << "  serial " << serial_ms
            << " ms  parallel " << parallel_ms << " ms  speedup "
            << (parallel_ms > 0 ? serial_ms / parallel_ms : 0.0) << '\n';
}

void compare_validation(std::size_t n) {
  const auto m = random_metric(n, 0xfeed + n);

  auto t0 = std::chrono::steady_clock::now();
  const auto serial = cpdm::validate_metric_serial(m);
  const double serial_ms = ms_since(t0);

  t0 = std::chrono::steady_clock::now();
  const auto parallel = cpdm::validate_metric_parallel(m);
  const double parallel_ms = ms_since(t0);

  check(serial == parallel, "validation n=" + std::to_string(n));
  std::cout << "axiom-validate n=" << n << "  serial " << serial_ms
            << " ms  parallel " << parallel_ms << " ms  speedup "
            << (parallel_ms > 0 ? serial_ms / parallel_ms : 0.0) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  const bool quick = argc > 1 && std::string(argv[1]) == "--quick";
#ifdef _OPENMP
  std::cout << "threads: " << omp_get_max_threads() << '\n';
#else
  std::cout << "threads: 1 (no OpenMP)\n";
#endif
  for (std::uint64_t n : quick ? std::vector<std::uint64_t>{512, 1024}
                               : std::vector<std::uint64_t>{2000, 4000, 8000})
    compare_pair_scan(n);
  for (std::size_t n : quick ? std::vector<std::size_t>{48, 96}
                             : std::vector<std::size_t>{128, 192, 256})
    compare_validation(n);
  if (failures != 0) {
    std::cout << failures << " kernel comparisons failed\n";
    return 1;
  }
  std::cout << "all kernel comparisons identical\n";
  return 0;
}
