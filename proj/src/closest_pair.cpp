#include "cpdm/closest_pair.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace cpdm {

namespace {

constexpr double kRelSlack = 4.0 * std::numeric_limits<double>::epsilon();

bool improves(const PairDistance& cand, const PairDistance& best) {
  // Strict: on equal delta the earlier node keeps the witness, which makes
  // ties resolve to the first recursive call's pair.
  return cand.valid() && cand.delta < best.delta;
}

}  // namespace

double base_case_threshold(double d) {
  return 2.0 * std::pow(16.0 * std::numbers::e, d);
}

int t_of(std::uint64_t n, double d) { return t_of(n, d, nullptr); }

int t_of(std::uint64_t n, double d, RunContext* ctx) {
  const double nd = static_cast<double>(n);
  if (nd < base_case_threshold(d))
    throw std::logic_error("t_of: called below the base-case threshold");
  const double inv_d = 1.0 / d;
  const double primary =
      std::floor(std::pow(nd / 2.0, inv_d) / (16.0 * std::numbers::e));
  const double c = derive_c(d, std::numbers::e);
  const double alternate = std::floor(0.25 * std::pow(nd / c, inv_d));
  if (ctx != nullptr && primary != alternate) {
    if (std::fabs(primary - alternate) <= 1.0) {
      ++ctx->audit.boundary_notes;
    } else {
      std::ostringstream os;
      os << "t-forms: the two closed forms disagree at n=" << n << " d=" << d
         << ": " << primary << " vs " << alternate;
      ctx->violation(os.str());
    }
  }
  int t = static_cast<int>(primary);
  if (t < 1) {
    // Rounding at the exact threshold can nudge the floor just below one.
    t = 1;
    if (ctx != nullptr) ++ctx->audit.boundary_notes;
  }
  return t;
}

PartitionResult partition(const MetricSpace& space, RunContext& ctx,
                          SubsetView subset, PointId p, double r, int t) {
  if (t < 1) throw InputError("partition: need t >= 1");
  if (!(r > 0.0)) throw InputError("partition: radius must be positive");
  if (std::find(subset.begin(), subset.end(), p) == subset.end())
    throw InputError("partition: center is not a member of the subset");
  const double outer = annulus_outer_radius(r, t);
  PartitionResult out;
  for (PointId x : subset) {
    const double dist = distance(space, ctx, p, x);
    if (dist <= r)
      out.s1.push_back(x);
    else if (dist <= outer)
      out.s2.push_back(x);
    else
      out.s3.push_back(x);
  }
  return out;
}

namespace {

struct Frame {
  std::vector<PointId> pts;
  std::uint32_t depth = 0;
};

void audit_internal_node(RunContext& ctx, const NodeAudit& node, double d) {
  const std::uint64_t n = node.n;
  const double c = effective_c(ctx.config, d, std::numbers::e);
  const std::uint64_t k = ceil_ratio(n, c);
  const std::uint64_t np = node.n_left, npp = node.n_right;
  const std::uint64_t t = static_cast<std::uint64_t>(node.t);

  if (node.s1 + node.s2 + node.s3 != n) {
    std::ostringstream os;
    os << "partition-sizes: parts sum to " << node.s1 + node.s2 + node.s3
       << " != n = " << n;
    ctx.violation(os.str());
  }
  if (np < 2 || npp < 2 || np > n - k || npp > n - k) {
    // n - ceil(n/c) <= (1 - 1/c) n exactly, so the integer comparison
    // implies the real-valued bound without a float boundary.
    std::ostringstream os;
    os << "recursive-size: n'=" << np << " n''=" << npp
       << " outside [2, n - ceil(n/c)] = [2, " << n - k << "] at n=" << n;
    ctx.violation(os.str());
  }
  if ((np + npp) * t > n * t + n) {
    std::ostringstream os;
    os << "overlap: n' + n'' = " << np + npp << " > n + n/t at n=" << n
       << " t=" << t;
    ctx.violation(os.str());
  }
  const double nd = static_cast<double>(n);
  if (nd >= std::pow(8.0, d) * c) {
    const double lhs = nd / static_cast<double>(t);
    const double rhs = 8.0 * std::pow(c, 1.0 / d) * std::pow(nd, 1.0 - 1.0 / d);
    if (lhs > rhs * (1.0 + kRelSlack)) {
      std::ostringstream os;
      os << "annulus-bound: n/t = " << lhs << " > " << rhs << " at n=" << n
         << " t=" << t;
      ctx.violation(os.str());
    }
  }
}

// Iterative DFS; children are pushed right-then-left so the left child is
// processed first, matching the draw order of the plain recursive form.
PairDistance recurse(const MetricSpace& space, RunContext& ctx,
                     std::vector<PointId> root, RunStats& stats) {
  const double d = ctx.config.d;
  const double threshold = base_case_threshold(d);
  const bool audit = ctx.config.audit;
  const std::size_t first_node = ctx.audit.nodes.size();

  PairDistance best;
  std::vector<Frame> stack;
  stack.push_back(Frame{std::move(root), 0});
  while (!stack.empty()) {
    Frame frame = std::move(stack.back());
    stack.pop_back();
    const std::uint64_t n = frame.pts.size();
    ++stats.recursion_nodes;
    stats.max_depth = std::max(stats.max_depth, frame.depth);

    if (static_cast<double>(n) < threshold) {
      ++stats.base_cases;
      if (audit) {
        NodeAudit node;
        node.n = n;
        node.depth = frame.depth;
        node.base = true;
        ctx.audit.nodes.push_back(node);
      }
      const PairDistance local =
          brute_force_closest_pair_serial(space, ctx, frame.pts);
      if (improves(local, best)) best = local;
      continue;
    }

    int t;
    if (ctx.config.c_override && !ctx.config.strict_constants) {
      const double c = *ctx.config.c_override;
      const double raw =
          std::floor(0.25 * std::pow(static_cast<double>(n) / c, 1.0 / d));
      t = std::max(1, static_cast<int>(raw));
    } else {
      t = t_of(n, d, audit ? &ctx : nullptr);
    }

    const std::uint64_t sep0 = ctx.sepann_iterations;
    const std::uint64_t sparse0 = ctx.sparse_iterations;
    const SeparatorResult sep = sparse_sep_ann(space, ctx, frame.pts, d, t);
    const PartitionResult parts =
        partition(space, ctx, frame.pts, sep.p, sep.inner_radius, t);

    if (audit) {
      NodeAudit node;
      node.n = n;
      node.depth = frame.depth;
      node.base = false;
      node.s1 = parts.s1.size();
      node.s2 = parts.s2.size();
      node.s3 = parts.s3.size();
      node.n_left = parts.s1.size() + parts.s2.size();
      node.n_right = parts.s2.size() + parts.s3.size();
      node.t = t;
      node.inner_radius = sep.inner_radius;
      node.sepann_iterations = ctx.sepann_iterations - sep0;
      node.sparse_iterations = ctx.sparse_iterations - sparse0;
      if (node.s1 != sep.sizes[0] || node.s2 != sep.sizes[1] ||
          node.s3 != sep.sizes[2]) {
        std::ostringstream os;
        os << "partition-sizes: partition (" << node.s1 << "," << node.s2
           << "," << node.s3 << ") != separator counts (" << sep.sizes[0]
           << "," << sep.sizes[1] << "," << sep.sizes[2] << ") at n=" << n;
        ctx.violation(os.str());
      }
      audit_internal_node(ctx, node, d);
      ctx.audit.nodes.push_back(node);
    }

    Frame left, right;
    left.depth = frame.depth + 1;
    right.depth = frame.depth + 1;
    left.pts.reserve(parts.s1.size() + parts.s2.size());
    left.pts.insert(left.pts.end(), parts.s1.begin(), parts.s1.end());
    left.pts.insert(left.pts.end(), parts.s2.begin(), parts.s2.end());
    right.pts.reserve(parts.s2.size() + parts.s3.size());
    right.pts.insert(right.pts.end(), parts.s2.begin(), parts.s2.end());
    right.pts.insert(right.pts.end(), parts.s3.begin(), parts.s3.end());
    stack.push_back(std::move(right));
    stack.push_back(std::move(left));
  }

  if (audit) {
    // Width property: every internal node's annulus is wide enough that the
    // final closest pair cannot straddle it.
    for (std::size_t i = first_node; i < ctx.audit.nodes.size(); ++i) {
      const NodeAudit& node = ctx.audit.nodes[i];
      if (node.base) continue;
      const double width = node.inner_radius / static_cast<double>(node.t);
      if (best.valid() && width < best.delta) {
        std::ostringstream os;
        os << "width: R/t = " << width << " < delta = " << best.delta
           << " at n=" << node.n << " depth=" << node.depth;
        ctx.violation(os.str());
      }
    }
  }
  return best;
}

AuditedResult run_whole_space(const MetricSpace& space, double d,
                              std::uint64_t seed, AlgorithmConfig config) {
  if (space.size() < 2)
    throw InputError("closest_pair: need at least two points");
  if (!(d >= 1.0))
    throw InputError("closest_pair: dimension bound must be >= 1");
  config.d = d;
  RunContext ctx(seed, config);
  RunStats stats;
  const PairDistance best = recurse(space, ctx, all_points(space), stats);
  stats.distance_calls = ctx.calls;
  stats.sepann_iterations = ctx.sepann_iterations;
  stats.sparse_loop_iterations = ctx.sparse_iterations;
  stats.audit_violations = ctx.audit.violations.size();
  AuditedResult out;
  out.result.delta = best.delta;
  out.result.a = best.a;
  out.result.b = best.b;
  out.result.stats = stats;
  out.report = std::move(ctx.audit);
  out.report.shadow_calls = ctx.shadow_calls;
  return out;
}

}  // namespace

ClosestPairResult closest_pair(const MetricSpace& space, double d,
                               std::uint64_t seed, AlgorithmConfig config) {
  return run_whole_space(space, d, seed, config).result;
}

PairDistance closest_pair_on(const MetricSpace& space, RunContext& ctx,
                             SubsetView subset) {
  if (!is_valid_subset(space, subset))
    throw InputError("closest_pair_on: invalid subset");
  if (subset.size() < 2) return PairDistance{};
  RunStats stats;
  std::vector<PointId> pts(subset.begin(), subset.end());
  return recurse(space, ctx, std::move(pts), stats);
}

AuditedResult closest_pair_audited(const MetricSpace& space, double d,
                                   std::uint64_t seed, AlgorithmConfig config) {
  config.audit = true;
  return run_whole_space(space, d, seed, config);
}

}  // namespace cpdm
