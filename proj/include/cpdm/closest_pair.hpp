#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "cpdm/annulus.hpp"
#include "cpdm/metric_core.hpp"

namespace cpdm {

// Recursion switches to the quadratic scan below 2*(16e)^d points.
double base_case_threshold(double d);

// Number of annuli t = floor((1/(16e)) * (n/2)^(1/d)). The equivalent
// closed form floor((1/4) * (n/c)^(1/d)) with c = 2(4e)^d is cross-checked
// when ctx is supplied; a one-off difference is logged as a boundary note.
int t_of(std::uint64_t n, double d);
int t_of(std::uint64_t n, double d, RunContext* ctx);

struct PartitionResult {
  std::vector<PointId> s1;  // dist(p,x) <= R
  std::vector<PointId> s2;  // R < dist(p,x) <= R*(1+1/t)
  std::vector<PointId> s3;  // dist(p,x) >  R*(1+1/t)
};

// Single scan over subset (n oracle calls), order-preserving within each
// part. Thresholds match sparse_sep_ann's bit for bit.
PartitionResult partition(const MetricSpace& space, RunContext& ctx,
                          SubsetView subset, PointId p, double r, int t);

struct RunStats {
  std::uint64_t distance_calls = 0;
  std::uint64_t sepann_iterations = 0;
  std::uint64_t sparse_loop_iterations = 0;
  std::uint64_t recursion_nodes = 0;
  std::uint32_t max_depth = 0;
  std::uint64_t base_cases = 0;
  std::uint64_t audit_violations = 0;
};

struct ClosestPairResult {
  double delta = 0.0;
  PointId a = kNoPoint;
  PointId b = kNoPoint;
  RunStats stats;
};

// Exact closest pair over the whole space. d is an upper bound on the
// doubling dimension; correctness never depends on it, only the expected
// call count does. Requires space.size() >= 2.
ClosestPairResult closest_pair(const MetricSpace& space, double d,
                               std::uint64_t seed, AlgorithmConfig config = {});

// Same recursion on an arbitrary subset with caller-owned context; used by
// tests that need counter or RNG continuity across calls.
PairDistance closest_pair_on(const MetricSpace& space, RunContext& ctx,
                             SubsetView subset);

struct AuditedResult {
  ClosestPairResult result;
  AuditReport report;
};

// closest_pair with every per-node guarantee checked via shadow scans:
// separator ball/annulus/outside bounds, recursive size bounds, overlap
// bound, sparse-annulus width against the final delta.
AuditedResult closest_pair_audited(const MetricSpace& space, double d,
                                   std::uint64_t seed,
                                   AlgorithmConfig config = {});

}  // namespace cpdm
