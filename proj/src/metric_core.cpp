#include "cpdm/metric_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cpdm {

namespace {

constexpr std::size_t kParallelPairCutoff = 1024;
constexpr std::size_t kParallelMatrixCutoff = 64;

bool contains(SubsetView subset, PointId p) {
  return std::find(subset.begin(), subset.end(), p) != subset.end();
}

// Strict total order on candidate pairs; the global minimum is unique, so
// any reduction order yields the same winner.
bool better(const PairDistance& x, const PairDistance& y) {
  if (x.delta != y.delta) return x.delta < y.delta;
  if (x.a != y.a) return x.a < y.a;
  return x.b < y.b;
}

void consider(PairDistance& best, double delta, PointId u, PointId v) {
  PairDistance cand{delta, std::min(u, v), std::max(u, v)};
  if (better(cand, best)) best = cand;
}

}  // namespace

std::vector<PointId> all_points(const MetricSpace& space) {
  std::vector<PointId> ids(space.size());
  std::iota(ids.begin(), ids.end(), PointId{0});
  return ids;
}

bool is_valid_subset(const MetricSpace& space, SubsetView subset) {
  std::vector<PointId> sorted(subset.begin(), subset.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    return false;
  return sorted.empty() || sorted.back() < space.size();
}

void RunContext::violation(std::string msg) {
  audit.violations.push_back(std::move(msg));
}

std::uint64_t suggested_iteration_cap(double c, std::uint64_t n) {
  const double cap = 64.0 * c * std::log(static_cast<double>(std::max<std::uint64_t>(n, 2)));
  return static_cast<std::uint64_t>(cap) + 1;
}

std::vector<std::pair<PointId, double>> distances_from(const MetricSpace& space,
                                                       RunContext& ctx,
                                                       SubsetView subset,
                                                       PointId p) {
  if (!contains(subset, p))
    throw InputError("distances_from: center is not a member of the subset");
  std::vector<std::pair<PointId, double>> out;
  out.reserve(subset.size());
  for (PointId x : subset) out.emplace_back(x, distance(space, ctx, p, x));
  return out;
}

double kth_smallest(std::span<const double> values, std::size_t k) {
  if (k < 1 || k > values.size())
    throw InputError("kth_smallest: rank out of range");
  std::vector<double> scratch(values.begin(), values.end());
  auto nth = scratch.begin() + static_cast<std::ptrdiff_t>(k - 1);
  std::nth_element(scratch.begin(), nth, scratch.end());
  return *nth;
}

std::uint64_t ball_count(const MetricSpace& space, RunContext& ctx,
                         SubsetView subset, PointId p, double r) {
  if (!contains(subset, p))
    throw InputError("ball_count: center is not a member of the subset");
  if (!(r >= 0.0)) throw InputError("ball_count: negative radius");
  std::uint64_t count = 0;
  for (PointId x : subset)
    if (distance(space, ctx, p, x) <= r) ++count;
  return count;
}

PairDistance brute_force_closest_pair_serial(const MetricSpace& space,
                                             RunContext& ctx,
                                             SubsetView subset) {
  PairDistance best;
  const std::size_t n = subset.size();
  if (n < 2) return best;
  ctx.calls += static_cast<std::uint64_t>(n) * (n - 1) / 2;
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      consider(best, space.eval(subset[i], subset[j]), subset[i], subset[j]);
  return best;
}

PairDistance brute_force_closest_pair_parallel(const MetricSpace& space,
                                               RunContext& ctx,
                                               SubsetView subset) {
  PairDistance best;
  const std::size_t n = subset.size();
  if (n < 2) return best;
  ctx.calls += static_cast<std::uint64_t>(n) * (n - 1) / 2;
#ifdef _OPENMP
#pragma omp parallel
  {
    PairDistance local;
#pragma omp for schedule(dynamic, 16) nowait
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n) - 1; ++i)
      for (std::size_t j = static_cast<std::size_t>(i) + 1; j < n; ++j)
        consider(local, space.eval(subset[i], subset[j]), subset[i],
                 subset[j]);
#pragma omp critical(cpdm_pair_merge)
    if (better(local, best)) best = local;
  }
#else
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      consider(best, space.eval(subset[i], subset[j]), subset[i], subset[j]);
#endif
  return best;
}

PairDistance brute_force_closest_pair(const MetricSpace& space, RunContext& ctx,
                                      SubsetView subset) {
  if (subset.size() >= kParallelPairCutoff)
    return brute_force_closest_pair_parallel(space, ctx, subset);
  return brute_force_closest_pair_serial(space, ctx, subset);
}

std::string to_string(const MetricViolation& v) {
  std::ostringstream os;
  switch (v.axiom) {
    case Axiom::identity:
      os << "identity violation at " << v.i;
      break;
    case Axiom::positivity:
      os << "positivity violation at (" << v.i << "," << v.j << ")";
      break;
    case Axiom::symmetry:
      os << "symmetry violation at (" << v.i << "," << v.j << ")";
      break;
    case Axiom::triangle:
      os << "triangle violation at (" << v.i << "," << v.j << "," << v.k
         << ")";
      break;
  }
  return os.str();
}

namespace {

// Identity, positivity, and symmetry scans are quadratic and shared by both
// validators; only the cubic triangle scan is worth parallelizing.
void validate_flat_axioms(const DistanceMatrix& m,
                          std::vector<MetricViolation>& out) {
  const std::size_t n = m.n;
  for (std::size_t i = 0; i < n; ++i)
    if (m.at(i, i) != 0.0) out.push_back({Axiom::identity, i, i, 0});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && !(m.at(i, j) > 0.0))
        out.push_back({Axiom::positivity, i, j, 0});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (m.at(i, j) != m.at(j, i)) out.push_back({Axiom::symmetry, i, j, 0});
}

// d(i,k) > d(i,j) + d(j,k) with j the midpoint; i < k since the reversed
// triple states the same inequality on a symmetric matrix.
void triangle_row(const DistanceMatrix& m, std::size_t i,
                  std::vector<MetricViolation>& out) {
  const std::size_t n = m.n;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i) continue;
    for (std::size_t k = i + 1; k < n; ++k) {
      if (k == j) continue;
      if (m.at(i, k) > m.at(i, j) + m.at(j, k))
        out.push_back({Axiom::triangle, i, j, k});
    }
  }
}

}  // namespace

std::vector<MetricViolation> validate_metric_serial(const DistanceMatrix& m) {
  std::vector<MetricViolation> out;
  validate_flat_axioms(m, out);
  for (std::size_t i = 0; i < m.n; ++i) triangle_row(m, i, out);
  return out;
}

std::vector<MetricViolation> validate_metric_parallel(const DistanceMatrix& m) {
  std::vector<MetricViolation> out;
  validate_flat_axioms(m, out);
  const std::size_t n = m.n;
  std::vector<std::vector<MetricViolation>> rows(n);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 4)
#endif
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i)
    triangle_row(m, static_cast<std::size_t>(i), rows[static_cast<std::size_t>(i)]);
  for (const auto& row : rows) out.insert(out.end(), row.begin(), row.end());
  return out;
}

std::vector<MetricViolation> validate_metric(const DistanceMatrix& m) {
  if (m.n >= kParallelMatrixCutoff) return validate_metric_parallel(m);
  return validate_metric_serial(m);
}

}  // namespace cpdm
