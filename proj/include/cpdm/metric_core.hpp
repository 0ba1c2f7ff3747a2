#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cpdm/rng.hpp"

namespace cpdm {

using PointId = std::uint32_t;
inline constexpr PointId kNoPoint = std::numeric_limits<PointId>::max();

// Bad input data or a violated caller-facing precondition.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exact checkers refuse instances too large for exponential search.
struct SizeError : InputError {
  using InputError::InputError;
};

// Raised when a configured iteration cap is exceeded; the usual cause is a
// supplied d below the true doubling dimension of the space.
struct IterationCapError : std::runtime_error {
  IterationCapError(std::string what, std::uint64_t cap_value)
      : std::runtime_error(std::move(what)), cap(cap_value) {}
  std::uint64_t cap;
};

// Immutable distance oracle over points 0..size()-1. Implementations must be
// safe for concurrent readers; all mutable run state lives in RunContext.
class MetricSpace {
 public:
  virtual ~MetricSpace() = default;
  std::size_t size() const { return size_; }

  // Raw oracle, uncounted. Use distance() to account for a call.
  virtual double eval(PointId i, PointId j) const = 0;

 protected:
  explicit MetricSpace(std::size_t n) : size_(n) {}

 private:
  std::size_t size_;
};

// An ordered list of distinct point ids denoting S ⊆ P. Non-owning; the
// recursion keeps each node's id vector alive on its explicit work stack.
struct SubsetView {
  std::span<const PointId> ids;

  SubsetView() = default;
  SubsetView(std::span<const PointId> s) : ids(s) {}
  SubsetView(const std::vector<PointId>& v) : ids(v) {}

  std::size_t size() const { return ids.size(); }
  PointId operator[](std::size_t k) const { return ids[k]; }
  auto begin() const { return ids.begin(); }
  auto end() const { return ids.end(); }
};

std::vector<PointId> all_points(const MetricSpace& space);

// True iff ids are distinct and all within [0, space.size()). O(n log n);
// meant for tests and loaders, not the hot path.
bool is_valid_subset(const MetricSpace& space, SubsetView subset);

struct AlgorithmConfig {
  // Upper bound on the doubling dimension of the WHOLE space (P, dist).
  double d = 1.0;
  // Replaces the derived sparseness constant for experiments; only honored
  // when strict_constants is off.
  std::optional<double> c_override;
  // Per-loop cap converting nontermination under a lying d into an error.
  std::optional<std::uint64_t> iteration_cap;
  bool audit = false;
  bool strict_constants = true;
};

// Suggested cap (64·c·ln n) for callers that opt in.
std::uint64_t suggested_iteration_cap(double c, std::uint64_t n);

// Per-recursion-node audit record; filled only when audit is on.
struct NodeAudit {
  std::uint64_t n = 0;
  std::uint32_t depth = 0;
  bool base = false;
  // Internal nodes only:
  std::uint64_t n_left = 0;   // n'  = |S1 ∪ S2|
  std::uint64_t n_right = 0;  // n'' = |S2 ∪ S3|
  std::uint64_t s1 = 0, s2 = 0, s3 = 0;
  int t = 0;
  double inner_radius = 0.0;  // R
  std::uint64_t sepann_iterations = 0;
  std::uint64_t sparse_iterations = 0;
};

struct AuditReport {
  std::vector<NodeAudit> nodes;
  std::vector<std::string> violations;
  // Float-boundary observations (e.g. the two t formulas differing by one);
  // informational, not violations.
  std::uint64_t boundary_notes = 0;
  std::uint64_t shadow_calls = 0;
};

// Exclusively owned by one in-flight algorithm invocation. Same seed, same
// input, same config => identical outputs and identical counters.
struct RunContext {
  explicit RunContext(std::uint64_t seed, AlgorithmConfig cfg = {})
      : rng(seed), config(cfg) {}

  Rng rng;
  AlgorithmConfig config;
  std::uint64_t calls = 0;         // oracle invocations by the algorithm
  std::uint64_t shadow_calls = 0;  // audit-only recomputation
  std::uint64_t sepann_iterations = 0;
  std::uint64_t sparse_iterations = 0;
  AuditReport audit;

  RunContext(const RunContext&) = delete;
  RunContext& operator=(const RunContext&) = delete;

  void violation(std::string msg);
};

// Counted distance oracle call.
inline double distance(const MetricSpace& space, RunContext& ctx, PointId i,
                       PointId j) {
  if (i >= space.size() || j >= space.size())
    throw InputError("distance: point id out of range");
  ++ctx.calls;
  return space.eval(i, j);
}

// Audit-only distance; bumps the shadow counter so the main algorithm's
// reported call count is unaffected by verification.
inline double shadow_distance(const MetricSpace& space, RunContext& ctx,
                              PointId i, PointId j) {
  ++ctx.shadow_calls;
  return space.eval(i, j);
}

// One scan: distances from p to every point of subset, p itself included
// (value 0). Counter increases by subset.size().
std::vector<std::pair<PointId, double>> distances_from(const MetricSpace& space,
                                                       RunContext& ctx,
                                                       SubsetView subset,
                                                       PointId p);

// k-th order statistic, 1-based, duplicates counted with multiplicity.
// Expected linear time (introselect on a scratch copy).
double kth_smallest(std::span<const double> values, std::size_t k);

// |{x in subset : dist(p,x) <= r}| with the closed comparison; one scan,
// subset.size() oracle calls.
std::uint64_t ball_count(const MetricSpace& space, RunContext& ctx,
                         SubsetView subset, PointId p, double r);

struct PairDistance {
  double delta = std::numeric_limits<double>::infinity();
  PointId a = kNoPoint;
  PointId b = kNoPoint;
  bool valid() const { return a != kNoPoint; }
};

// O(n²) pairwise scan. delta is the exact oracle value achieved by the
// witness pair; ties broken by lexicographically smallest (a, b), a < b.
// For n < 2 returns the infinity sentinel with invalid ids.
PairDistance brute_force_closest_pair(const MetricSpace& space, RunContext& ctx,
                                      SubsetView subset);
PairDistance brute_force_closest_pair_serial(const MetricSpace& space,
                                             RunContext& ctx, SubsetView subset);
PairDistance brute_force_closest_pair_parallel(const MetricSpace& space,
                                               RunContext& ctx,
                                               SubsetView subset);

struct DistanceMatrix {
  explicit DistanceMatrix(std::size_t n_) : n(n_), values(n_ * n_, 0.0) {}
  double at(std::size_t i, std::size_t j) const { return values[i * n + j]; }
  double& at(std::size_t i, std::size_t j) { return values[i * n + j]; }

  std::size_t n;
  std::vector<double> values;
};

enum class Axiom { identity, positivity, symmetry, triangle };

struct MetricViolation {
  Axiom axiom;
  std::size_t i = 0, j = 0, k = 0;  // k meaningful for triangle only
  bool operator==(const MetricViolation&) const = default;
};

std::string to_string(const MetricViolation& v);

// Checks all four metric axioms exactly (no tolerance); O(N³).
// Empty result means the matrix is a metric.
std::vector<MetricViolation> validate_metric(const DistanceMatrix& m);
std::vector<MetricViolation> validate_metric_serial(const DistanceMatrix& m);
std::vector<MetricViolation> validate_metric_parallel(const DistanceMatrix& m);

}  // namespace cpdm
