#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cpdm/metric_core.hpp"

namespace cpdm {

// Exact covering search is branch-and-bound over bitmasks; universes beyond
// this size would not finish.
inline constexpr std::size_t kExactCoverLimit = 64;

// Minimum number of balls of radius R/2, centered at points of subset,
// needed to cover ball(p, R) ∩ subset. Exact (branch and bound seeded with
// the greedy bound). Throws SizeError when the ball to cover exceeds
// kExactCoverLimit points.
std::uint64_t min_cover_size(const MetricSpace& space, SubsetView subset,
                             PointId p, double r);

// Exact doubling dimension: log2 of the worst cover count over all centers
// p and all critical radii (the distinct pairwise distances; between two
// consecutive distances every ball is constant while half-radius balls can
// only lose points, so the maximum is attained on the grid). Exponential;
// guarded by kExactCoverLimit.
double doubling_dimension_exact(const MetricSpace& space);

// Same, for the induced subspace (S, dist): balls restricted to S, centers
// restricted to S.
double doubling_dimension_exact(const MetricSpace& space, SubsetView subset);

struct PackingViolation {
  PointId p = kNoPoint;
  double radius = 0.0;
  std::uint64_t ball = 0;
  double bound = 0.0;
};

// Checks |ball(p, R)| <= (4R/delta)^d for every center p and every critical
// radius R >= delta/2, where delta is the exact closest-pair distance and d
// the supplied dimension bound. Returns the first violation, if any.
std::optional<PackingViolation> packing_check(const MetricSpace& space,
                                              double d);

}  // namespace cpdm
