#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "cpdm/closest_pair.hpp"
#include "cpdm/metric_core.hpp"
#include "cpdm/rng.hpp"
#include "cpdm/spaces.hpp"

using namespace cpdm;

namespace {

bool is_subsequence(const std::vector<PointId>& part,
                    const std::vector<PointId>& whole) {
  std::size_t w = 0;
  for (PointId x : part) {
    while (w < whole.size() && whole[w] != x) ++w;
    if (w == whole.size()) return false;
    ++w;
  }
  return true;
}

}  // namespace

TEST_SUITE("closest_pair") {

TEST_CASE("base-case threshold and annulus count: pinned values") {
  CHECK(base_case_threshold(1.0) ==
        doctest::Approx(86.985018510689436).epsilon(1e-14));
  CHECK(87.0 >= base_case_threshold(1.0));
  CHECK(86.0 < base_case_threshold(1.0));
  CHECK(base_case_threshold(2.0) == doctest::Approx(3783.197).epsilon(1e-5));

  CHECK(t_of(87, 1.0) == 1);
  CHECK(t_of(2000, 1.0) == 22);
  CHECK(t_of(1000000, 2.0) == 16);
  CHECK_THROWS_AS(t_of(86, 1.0), std::logic_error);
  // More annuli as n grows, never below one.
  int prev = 1;
  for (std::uint64_t n = 87; n < 100000; n = n * 3 / 2) {
    const int t = t_of(n, 1.0);
    CHECK(t >= prev);
    prev = t;
  }
}

TEST_CASE("partition: analytic split and guards") {
  auto space = EuclideanSpace::from_rows({{0.0}, {1.0}, {2.5}});
  RunContext ctx(1);
  const auto ids = all_points(space);
  const auto parts = partition(space, ctx, ids, 0, 1.0, 1);
  CHECK(parts.s1 == std::vector<PointId>{0, 1});
  CHECK(parts.s2.empty());  // outer edge at 2.0, nothing in (1, 2]
  CHECK(parts.s3 == std::vector<PointId>{2});
  CHECK(ctx.calls == 3);

  CHECK_THROWS_AS(partition(space, ctx, ids, 0, 0.0, 1), InputError);
  CHECK_THROWS_AS(partition(space, ctx, ids, 0, 1.0, 0), InputError);
  std::vector<PointId> no_center{1, 2};
  CHECK_THROWS_AS(partition(space, ctx, no_center, 0, 1.0, 1), InputError);
}

TEST_CASE("partition: sizes match ball counts, order preserved, disjoint") {
  auto space = generate_instance(GeneratorKind::square_uniform, 300, 21);
  const auto ids = all_points(*space);
  const PointId p = 42;
  const double r = 0.2;
  const int t = 4;
  RunContext ctx(1);
  const auto parts = partition(*space, ctx, ids, p, r, t);

  RunContext octx(1);
  const std::uint64_t inner = ball_count(*space, octx, ids, p, r);
  const std::uint64_t outer =
      ball_count(*space, octx, ids, p, annulus_outer_radius(r, t));
  CHECK(parts.s1.size() == inner);
  CHECK(parts.s1.size() + parts.s2.size() == outer);
  CHECK(parts.s1.size() + parts.s2.size() + parts.s3.size() == ids.size());

  CHECK(is_subsequence(parts.s1, ids));
  CHECK(is_subsequence(parts.s2, ids));
  CHECK(is_subsequence(parts.s3, ids));

  std::vector<PointId> all;
  all.insert(all.end(), parts.s1.begin(), parts.s1.end());
  all.insert(all.end(), parts.s2.begin(), parts.s2.end());
  all.insert(all.end(), parts.s3.begin(), parts.s3.end());
  std::sort(all.begin(), all.end());
  CHECK(std::adjacent_find(all.begin(), all.end()) == all.end());
}

TEST_CASE("three points below the threshold: one base node") {
  auto space = EuclideanSpace::from_rows({{0, 0}, {3, 4}, {10, 0}});
  const auto res = closest_pair(space, 3.0, 1);
  CHECK(res.delta == 5.0);
  CHECK(res.a == 0);
  CHECK(res.b == 1);
  CHECK(res.stats.recursion_nodes == 1);
  CHECK(res.stats.base_cases == 1);
  CHECK(res.stats.max_depth == 0);
  CHECK(res.stats.distance_calls == 3);
  CHECK(res.stats.sepann_iterations == 0);
}

TEST_CASE("hub-and-members space: minimum is the hub link") {
  LayeredExampleSpace space(4);
  const auto res = closest_pair(space, std::log2(5.0), 2);
  CHECK(res.delta == 1.0);
  CHECK(space.eval(res.a, res.b) == 1.0);
}

TEST_CASE("recursion equals the quadratic scan bit for bit") {
  for (std::uint64_t n : {100ULL, 500ULL, 1500ULL, 5000ULL}) {
    for (std::uint64_t seed : {1ULL, 2ULL}) {
      auto space = generate_instance(GeneratorKind::line_uniform, n, seed);
      const auto res = closest_pair(*space, 1.0, seed + 100);
      RunContext octx(0);
      const auto oracle =
          brute_force_closest_pair(*space, octx, all_points(*space));
      CHECK(res.delta == oracle.delta);
      CHECK(space->eval(res.a, res.b) == res.delta);
      CHECK(res.a < res.b);
      if (n >= 100) CHECK(res.stats.recursion_nodes > 1);
    }
  }
}

TEST_CASE("other families agree with the scan at their dimension bounds") {
  auto square = generate_instance(GeneratorKind::square_uniform, 700, 3);
  auto clustered = generate_instance(GeneratorKind::clustered, 700, 4);
  auto matrix = generate_instance(GeneratorKind::explicit_random, 120, 5);
  const MetricSpace* spaces[] = {square.get(), clustered.get(), matrix.get()};
  const double dims[] = {3.0, 3.0, 7.0};
  for (int i = 0; i < 3; ++i) {
    const auto res = closest_pair(*spaces[i], dims[i], 11);
    RunContext octx(0);
    const auto oracle =
        brute_force_closest_pair(*spaces[i], octx, all_points(*spaces[i]));
    CHECK(res.delta == oracle.delta);
    CHECK(spaces[i]->eval(res.a, res.b) == res.delta);
  }
}

TEST_CASE("subset runs equal the subset scan and respect the global floor") {
  auto space = generate_instance(GeneratorKind::line_uniform, 400, 7);
  RunContext gctx(0);
  const auto global =
      brute_force_closest_pair(*space, gctx, all_points(*space));

  Rng pick(33);
  for (int trial = 0; trial < 6; ++trial) {
    std::vector<PointId> subset;
    for (PointId x = 0; x < 400; ++x)
      if (pick.below(2) == 0) subset.push_back(x);
    if (subset.size() < 2) continue;

    RunContext ctx(100 + trial);
    const auto res = closest_pair_on(*space, ctx, subset);
    RunContext octx(0);
    const auto oracle = brute_force_closest_pair(*space, octx, subset);
    CHECK(res.delta == oracle.delta);
    CHECK(res.delta >= global.delta);
    CHECK(std::find(subset.begin(), subset.end(), res.a) != subset.end());
    CHECK(std::find(subset.begin(), subset.end(), res.b) != subset.end());
    CHECK(space->eval(res.a, res.b) == res.delta);
  }

  RunContext ctx(1);
  std::vector<PointId> tiny{5};
  CHECK_FALSE(closest_pair_on(*space, ctx, tiny).valid());
  std::vector<PointId> dup{5, 5};
  CHECK_THROWS_AS(closest_pair_on(*space, ctx, dup), InputError);
}

TEST_CASE("same seed, same run: result and every counter") {
  auto space = generate_instance(GeneratorKind::line_uniform, 3000, 12);
  const auto a = closest_pair(*space, 1.0, 99);
  const auto b = closest_pair(*space, 1.0, 99);
  CHECK(a.delta == b.delta);
  CHECK(a.a == b.a);
  CHECK(a.b == b.b);
  CHECK(a.stats.distance_calls == b.stats.distance_calls);
  CHECK(a.stats.sepann_iterations == b.stats.sepann_iterations);
  CHECK(a.stats.sparse_loop_iterations == b.stats.sparse_loop_iterations);
  CHECK(a.stats.recursion_nodes == b.stats.recursion_nodes);
  CHECK(a.stats.max_depth == b.stats.max_depth);
  CHECK(a.stats.base_cases == b.stats.base_cases);

  const auto c = closest_pair(*space, 1.0, 100);
  CHECK(c.delta == a.delta);  // value never depends on the seed
}

TEST_CASE("input guards") {
  auto one = EuclideanSpace::from_rows({{0.0}});
  CHECK_THROWS_AS(closest_pair(one, 1.0, 1), InputError);
  auto two = EuclideanSpace::from_rows({{0.0}, {1.0}});
  CHECK_THROWS_AS(closest_pair(two, 0.5, 1), InputError);
  CHECK(closest_pair(two, 1.0, 1).delta == 1.0);
}

TEST_CASE("a dimension bound below the truth trips the cap, not a hang") {
  UniformDiscreteSpace uni(300);
  AlgorithmConfig cfg;
  cfg.iteration_cap = 500;
  CHECK_THROWS_AS(closest_pair(uni, 1.0, 1, cfg), IterationCapError);
}

TEST_CASE("constant override: rejected when strict, honored otherwise") {
  auto space = generate_instance(GeneratorKind::line_uniform, 200, 8);
  AlgorithmConfig cfg;
  cfg.c_override = 50.0;
  CHECK_THROWS_AS(closest_pair(*space, 1.0, 1, cfg), InputError);

  cfg.strict_constants = false;
  const auto res = closest_pair(*space, 1.0, 1, cfg);
  RunContext octx(0);
  const auto oracle =
      brute_force_closest_pair(*space, octx, all_points(*space));
  CHECK(res.delta == oracle.delta);
}

TEST_CASE("audited run: clean report with consistent node accounting") {
  auto space = generate_instance(GeneratorKind::line_uniform, 4096, 9);
  const auto audited = closest_pair_audited(*space, 1.0, 9);
  const auto& res = audited.result;
  const auto& report = audited.report;

  CHECK(report.violations.empty());
  CHECK(res.stats.audit_violations == 0);
  CHECK(report.shadow_calls > 0);
  CHECK(report.nodes.size() == res.stats.recursion_nodes);

  RunContext octx(0);
  const auto oracle =
      brute_force_closest_pair(*space, octx, all_points(*space));
  CHECK(res.delta == oracle.delta);

  std::uint64_t bases = 0;
  std::uint32_t deepest = 0;
  for (const auto& node : report.nodes) {
    deepest = std::max(deepest, node.depth);
    if (node.base) {
      ++bases;
      CHECK(static_cast<double>(node.n) < base_case_threshold(1.0));
      continue;
    }
    CHECK(static_cast<double>(node.n) >= base_case_threshold(1.0));
    CHECK(node.t >= 1);
    CHECK(node.inner_radius > 0.0);
    CHECK(node.s1 + node.s2 + node.s3 == node.n);
    CHECK(node.n_left == node.s1 + node.s2);
    CHECK(node.n_right == node.s2 + node.s3);
    // Strict shrink: both children lose at least two points.
    CHECK(node.n_left <= node.n - 2);
    CHECK(node.n_right <= node.n - 2);
    CHECK(node.sepann_iterations >= 1);
    CHECK(node.sparse_iterations >= 1);
    // No pair can straddle an annulus this wide.
    CHECK(node.inner_radius / static_cast<double>(node.t) >= res.delta);
  }
  CHECK(bases == res.stats.base_cases);
  CHECK(deepest == res.stats.max_depth);
}

TEST_CASE("partition sizes match the separator's counts bit for bit") {
  // The audit cross-checks the partition against the separator's reported
  // sizes; both must classify against the identical outer threshold.
  auto space = generate_instance(GeneratorKind::line_uniform, 4096, 1);
  const auto ids = all_points(*space);
  const int t = t_of(4096, 1.0);
  for (std::uint64_t seed : {2ULL, 3ULL, 4ULL}) {
    RunContext ctx(seed);
    const auto sep = sparse_sep_ann(*space, ctx, ids, 1.0, t);
    const auto parts = partition(*space, ctx, ids, sep.p, sep.inner_radius, t);
    CHECK(parts.s1.size() == sep.sizes[0]);
    CHECK(parts.s2.size() == sep.sizes[1]);
    CHECK(parts.s3.size() == sep.sizes[2]);
  }
}

TEST_CASE("a mismatched annulus count shifts the split and is detectable") {
  // Partitioning with t + 1 moves only the outer threshold; a point placed
  // between the two thresholds lands in a different part, which is the
  // mismatch the partition-size cross-check exists to flag.
  auto space = EuclideanSpace::from_rows({{0.0}, {1.7}, {5.0}});
  RunContext ctx(1);
  const auto ids = all_points(space);
  const auto wide = partition(space, ctx, ids, 0, 1.0, 1);   // outer = 2.0
  const auto narrow = partition(space, ctx, ids, 0, 1.0, 2); // outer = 1.5
  CHECK(wide.s1.size() == narrow.s1.size());  // inner threshold unchanged
  CHECK(wide.s2 == std::vector<PointId>{1});
  CHECK(narrow.s2.empty());
  CHECK(narrow.s3 == std::vector<PointId>{1, 2});
}

}  // TEST_SUITE
