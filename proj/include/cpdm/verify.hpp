#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cpdm/closest_pair.hpp"
#include "cpdm/spaces.hpp"

// Checker building blocks shared by `cpdm verify` and the acceptance
// runner. Everything here is deterministic in its seed arguments.
namespace cpdm::verify {

struct SuiteResult {
  std::string name;
  std::uint64_t checks = 0;
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

struct FamilyPlan {
  GeneratorKind kind = GeneratorKind::line_uniform;
  std::uint64_t count = 0;  // instances, sizes geometric over [n_min, n_max]
  std::uint64_t n_min = 2;
  std::uint64_t n_max = 2;
};

// Outcome of a batch of audited runs, each compared against the quadratic
// scan. Violation messages carry a kind tag prefix ("separator-ball: ...");
// the map groups counts by that tag.
struct AuditTally {
  std::uint64_t instances = 0;
  std::uint64_t checks = 0;
  std::uint64_t delta_mismatches = 0;
  std::uint64_t nodes = 0;
  std::uint64_t internal_nodes = 0;
  std::map<std::string, std::uint64_t> violations;
  std::vector<std::string> failures;
};

std::uint64_t violations_for(const AuditTally& tally,
                             std::initializer_list<const char*> kinds);

AuditTally run_audited_family(const FamilyPlan& plan, std::uint64_t seed);
void merge(AuditTally& into, const AuditTally& from);

struct IterationStats {
  std::uint64_t runs = 0;
  std::uint64_t separator_calls = 0;  // internal recursion nodes
  double mean_sepann = 0.0;           // separator-point draws per call
  double mean_sparse_loop = 0.0;      // annulus-index draws per call
};

// Repeated unaudited runs on one fixed space; iteration counts averaged
// over every separator call across all runs.
IterationStats iteration_stats(const MetricSpace& space, double d,
                               std::uint64_t seeds, std::uint64_t seed0);

// Exhaustive: fraction of points p whose ball of radius mu*R_p holds at
// most half the points, R_p being the ceil(n/c)-th smallest distance from p
// (self included). The separator sampler accepts exactly these points.
double good_point_fraction(const MetricSpace& space, double d, double mu);

struct ScalingPoint {
  std::uint64_t n = 0;
  double mean_calls = 0.0;
  double normalized = 0.0;  // mean_calls / (n * log2 n)
};

// Line instances at the given sizes, `seeds` runs each, d = 1.
std::vector<ScalingPoint> scaling_experiment(
    const std::vector<std::uint64_t>& sizes, std::uint64_t seeds,
    std::uint64_t seed0);

// max/min of the normalized column.
double scaling_spread(const std::vector<ScalingPoint>& points);

struct Options {
  std::uint64_t trials = 25;
  std::uint64_t seed = 1;
  std::uint64_t max_n = 4096;
};

// The full suite list, effort scaled by trials. An empty filter runs all.
std::vector<SuiteResult> run_suites(const Options& opts,
                                    const std::string& filter = {});

}  // namespace cpdm::verify
