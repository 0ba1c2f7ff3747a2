#include "cpdm/dimension.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

namespace cpdm {

namespace {

constexpr double kRelSlack = 4.0 * std::numeric_limits<double>::epsilon();

struct CoverSolver {
  std::vector<std::uint64_t> masks;           // candidate half-radius balls
  std::vector<std::vector<std::uint32_t>> by_elem;  // element -> covering masks
  std::uint64_t full = 0;
  std::uint64_t best = 0;
  int max_bits = 1;

  std::uint64_t greedy() const {
    std::uint64_t covered = 0, used = 0;
    while (covered != full) {
      std::uint64_t pick = 0;
      int gain = -1;
      for (std::uint64_t mask : masks) {
        const int g = std::popcount(mask & ~covered);
        if (g > gain) {
          gain = g;
          pick = mask;
        }
      }
      covered |= pick;
      ++used;
    }
    return used;
  }

  void dfs(std::uint64_t covered, std::uint64_t used) {
    if (covered == full) {
      best = std::min(best, used);
      return;
    }
    const int remaining = std::popcount(full & ~covered);
    const std::uint64_t floor_needed =
        (static_cast<std::uint64_t>(remaining) + max_bits - 1) /
        static_cast<std::uint64_t>(max_bits);
    if (used + floor_needed >= best) return;
    const int elem = std::countr_zero(full & ~covered);
    for (std::uint32_t mi : by_elem[static_cast<std::size_t>(elem)])
      dfs(covered | masks[mi], used + 1);
  }
};

}  // namespace

std::uint64_t min_cover_size(const MetricSpace& space, SubsetView subset,
                             PointId p, double r) {
  if (!(r >= 0.0)) throw InputError("min_cover_size: negative radius");
  std::vector<PointId> universe;
  for (PointId x : subset)
    if (space.eval(p, x) <= r) universe.push_back(x);
  if (universe.size() > kExactCoverLimit) {
    std::ostringstream os;
    os << "min_cover_size: ball of " << universe.size()
       << " points exceeds the exact-search limit of " << kExactCoverLimit;
    throw SizeError(os.str());
  }
  if (universe.empty()) return 0;

  const double half = r / 2.0;
  CoverSolver solver;
  solver.full = universe.size() == 64
                    ? ~std::uint64_t{0}
                    : (std::uint64_t{1} << universe.size()) - 1;
  for (PointId q : subset) {
    std::uint64_t mask = 0;
    for (std::size_t idx = 0; idx < universe.size(); ++idx)
      if (space.eval(q, universe[idx]) <= half) mask |= std::uint64_t{1} << idx;
    if (mask != 0) solver.masks.push_back(mask);
  }
  std::sort(solver.masks.begin(), solver.masks.end());
  solver.masks.erase(std::unique(solver.masks.begin(), solver.masks.end()),
                     solver.masks.end());
  // drop masks strictly contained in another candidate
  std::vector<std::uint64_t> kept;
  for (std::uint64_t m : solver.masks) {
    bool dominated = false;
    for (std::uint64_t other : solver.masks)
      if (other != m && (m & other) == m) {
        dominated = true;
        break;
      }
    if (!dominated) kept.push_back(m);
  }
  solver.masks = std::move(kept);

  solver.by_elem.resize(universe.size());
  for (std::uint32_t mi = 0; mi < solver.masks.size(); ++mi)
    for (std::size_t e = 0; e < universe.size(); ++e)
      if (solver.masks[mi] & (std::uint64_t{1} << e))
        solver.by_elem[e].push_back(mi);
  for (auto& list : solver.by_elem)
    std::sort(list.begin(), list.end(), [&](std::uint32_t a, std::uint32_t b) {
      return std::popcount(solver.masks[a]) > std::popcount(solver.masks[b]);
    });
  for (std::uint64_t m : solver.masks)
    solver.max_bits = std::max(solver.max_bits, std::popcount(m));

  solver.best = solver.greedy();
  solver.dfs(0, 0);
  return solver.best;
}

namespace {

std::vector<double> distinct_distances(const MetricSpace& space,
                                       SubsetView subset) {
  std::vector<double> out;
  out.reserve(subset.size() * (subset.size() + 1) / 2);
  for (std::size_t i = 0; i < subset.size(); ++i)
    for (std::size_t j = i + 1; j < subset.size(); ++j)
      out.push_back(space.eval(subset[i], subset[j]));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

double doubling_dimension_exact(const MetricSpace& space, SubsetView subset) {
  if (subset.size() == 0)
    throw InputError("doubling_dimension_exact: empty subset");
  if (!is_valid_subset(space, subset))
    throw InputError("doubling_dimension_exact: invalid subset");
  // Between consecutive distance values a ball's content is fixed while the
  // half-radius balls only grow, so the worst cover sits on this grid.
  const auto radii = distinct_distances(space, subset);
  std::uint64_t lambda = 1;
  for (PointId p : subset)
    for (double r : radii)
      lambda = std::max(lambda, min_cover_size(space, subset, p, r));
  return std::log2(static_cast<double>(lambda));
}

double doubling_dimension_exact(const MetricSpace& space) {
  const auto ids = all_points(space);
  return doubling_dimension_exact(space, ids);
}

std::optional<PackingViolation> packing_check(const MetricSpace& space,
                                              double d) {
  const std::size_t n = space.size();
  if (n < 2) return std::nullopt;
  RunContext ctx(0);
  const auto ids = all_points(space);
  const PairDistance closest = brute_force_closest_pair(space, ctx, ids);
  const double delta = closest.delta;

  std::vector<double> dists(n);
  for (PointId p = 0; p < n; ++p) {
    for (PointId q = 0; q < n; ++q) dists[q] = space.eval(p, q);
    std::sort(dists.begin(), dists.end());
    // Candidate radii: delta/2 plus every distance value at or above it;
    // between candidates the count is flat while the bound grows.
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i <= n; ++i) {
      double r;
      if (i == n) {
        r = delta / 2.0;
      } else {
        r = dists[i];
        if (r < delta / 2.0 || r == prev) continue;
        prev = r;
      }
      const auto it = std::upper_bound(dists.begin(), dists.end(), r);
      const auto count =
          static_cast<std::uint64_t>(std::distance(dists.begin(), it));
      const double bound = std::pow(4.0 * r / delta, d);
      if (static_cast<double>(count) > bound * (1.0 + kRelSlack))
        return PackingViolation{p, r, count, bound};
    }
  }
  return std::nullopt;
}

}  // namespace cpdm
