#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cpdm/metric_core.hpp"

namespace cpdm {

// Sparseness constant c for dimension bound d and growth factor mu:
// 2(4mu)^d in general, bumped to 2(8mu)^d when log2(4mu) lands exactly on an
// integer (the dyadic boundary would otherwise break the packing argument).
double derive_c(double d, double mu);

// Smallest integer k with k*c >= n, i.e. ceil(n/c) computed against the
// double value of c without forming the quotient.
std::uint64_t ceil_ratio(std::uint64_t n, double c);

// The sparseness constant a run actually uses: config.c_override when set
// (rejected under strict_constants), else derive_c(d, mu).
double effective_c(const AlgorithmConfig& config, double d, double mu);

struct SepAnnResult {
  PointId p = kNoPoint;
  double r_prime = 0.0;  // R' with |ball(p, R')| >= ceil(n/c)
  std::uint64_t iterations = 0;
};

namespace detail {
// SepAnnResult plus the final iteration's distance scan (pairs (id, dist)
// over the whole subset, p included). Lets the caller reuse those n oracle
// values instead of paying for a second scan.
struct SepAnnScan {
  SepAnnResult result;
  std::vector<std::pair<PointId, double>> dists;
};

SepAnnScan sep_ann_scan(const MetricSpace& space, RunContext& ctx,
                        SubsetView subset, double d, double mu);
}  // namespace detail

// Randomized separating-annulus search: repeat { p uniform from subset;
// R' = (ceil(n/c))-th smallest distance from p, self included } until
// |ball(p, mu*R')| <= n/2. Each iteration costs exactly n oracle calls.
// Requires n >= c + 1 (else no sparse annulus is guaranteed to exist).
// Postconditions hold on exit by construction; with audit on they are
// re-verified through shadow scans.
SepAnnResult sep_ann(const MetricSpace& space, RunContext& ctx,
                     SubsetView subset, double d, double mu);

// R_i = R' * (1 + 1/t)^i for i = 0..t, built by repeated multiplication so
// every consumer sees bit-identical thresholds.
std::vector<double> radii_schedule(double r_prime, int t);

// Shared expression for the outer radius of the annulus at inner radius R.
inline double annulus_outer_radius(double r, int t) {
  return r * (1.0 + 1.0 / static_cast<double>(t));
}

struct AnnulusIndex {
  enum class Kind { inside, annulus, outside };
  Kind kind;
  // For annulus: the index i in 1..t with R_{i-1} < dist <= R_i.
  int i = 0;
};

// Locates dist in the schedule: inside means dist <= radii[0], outside means
// dist > radii[t]. Closed on the outer edge, open on the inner edge.
AnnulusIndex annulus_index(double dist, std::span<const double> radii);

struct SeparatorResult {
  PointId p = kNoPoint;
  double inner_radius = 0.0;  // R = R_{i-1} of the accepted sparse annulus
  int t = 0;
  // Point counts for the partition induced by (p, R, t):
  // sizes[0] = |ball(p,R)|, sizes[1] = |annulus|, sizes[2] = rest.
  std::uint64_t sizes[3] = {0, 0, 0};
  std::uint64_t loop_iterations = 0;  // accepted draw included
  std::uint64_t sepann_iterations = 0;
};

// SepAnn with mu = e followed by the sparse-annulus sampling loop: draw i
// uniform from 1..t, accept when |A_i| * t <= n. The candidate annuli all
// live inside ball(p, e*R'), so each loop iteration reclassifies the cached
// distance scan and costs zero oracle calls.
SeparatorResult sparse_sep_ann(const MetricSpace& space, RunContext& ctx,
                               SubsetView subset, double d, int t);

}  // namespace cpdm
