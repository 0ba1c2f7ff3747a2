#include "cpdm/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "cpdm/annulus.hpp"
#include "cpdm/dimension.hpp"
#include "cpdm/rng.hpp"

namespace cpdm::verify {

namespace {

std::vector<std::uint64_t> geometric_sizes(std::uint64_t n_min,
                                           std::uint64_t n_max,
                                           std::uint64_t count) {
  std::vector<std::uint64_t> out;
  out.reserve(count);
  if (count == 0) return out;
  if (count == 1 || n_min >= n_max) {
    out.assign(count, n_max);
    return out;
  }
  const double lo = std::log(static_cast<double>(n_min));
  const double hi = std::log(static_cast<double>(n_max));
  for (std::uint64_t i = 0; i < count; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(count - 1);
    const auto n = static_cast<std::uint64_t>(
        std::llround(std::exp(lo + f * (hi - lo))));
    out.push_back(std::clamp(n, n_min, n_max));
  }
  return out;
}

std::string format_spot(GeneratorKind kind, std::uint64_t n,
                        std::uint64_t inst_seed, std::uint64_t run_seed) {
  std::ostringstream os;
  os << "(generator=" << to_string(kind) << " n=" << n << " instance_seed="
     << inst_seed << " run_seed=" << run_seed << ")";
  return os.str();
}

}  // namespace

std::uint64_t violations_for(const AuditTally& tally,
                             std::initializer_list<const char*> kinds) {
  std::uint64_t sum = 0;
  for (const char* kind : kinds) {
    const auto it = tally.violations.find(kind);
    if (it != tally.violations.end()) sum += it->second;
  }
  return sum;
}

void merge(AuditTally& into, const AuditTally& from) {
  into.instances += from.instances;
  into.checks += from.checks;
  into.delta_mismatches += from.delta_mismatches;
  into.nodes += from.nodes;
  into.internal_nodes += from.internal_nodes;
  for (const auto& [kind, count] : from.violations)
    into.violations[kind] += count;
  into.failures.insert(into.failures.end(), from.failures.begin(),
                       from.failures.end());
}

AuditTally run_audited_family(const FamilyPlan& plan, std::uint64_t seed) {
  AuditTally tally;
  const auto sizes = geometric_sizes(plan.n_min, plan.n_max, plan.count);
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const std::uint64_t n = sizes[i];
    const std::uint64_t inst_seed = mix_seed(seed, i);
    const std::uint64_t run_seed = mix_seed(inst_seed, 0x5eed);
    const double d = generator_dimension(plan.kind, n);
    const std::string spot = format_spot(plan.kind, n, inst_seed, run_seed);
    try {
      const auto space = generate_instance(plan.kind, n, inst_seed);
      AlgorithmConfig cfg;
      cfg.iteration_cap =
          suggested_iteration_cap(derive_c(d, std::numbers::e), n);
      const AuditedResult audited =
          closest_pair_audited(*space, d, run_seed, cfg);

      RunContext oracle_ctx(0);
      const auto ids = all_points(*space);
      const PairDistance oracle = brute_force_closest_pair(*space, oracle_ctx, ids);

      ++tally.instances;
      tally.checks += 2 + audited.report.nodes.size();
      if (audited.result.delta != oracle.delta) {
        ++tally.delta_mismatches;
        std::ostringstream os;
        os << "delta mismatch: recursion " << audited.result.delta
           << " vs scan " << oracle.delta << " " << spot;
        tally.failures.push_back(os.str());
      }
      if (space->eval(audited.result.a, audited.result.b) !=
          audited.result.delta) {
        ++tally.delta_mismatches;
        tally.failures.push_back("witness pair does not realize delta " + spot);
      }
      tally.nodes += audited.report.nodes.size();
      for (const NodeAudit& node : audited.report.nodes)
        if (!node.base) ++tally.internal_nodes;
      for (const std::string& v : audited.report.violations) {
        const auto colon = v.find(':');
        const std::string kind =
            colon == std::string::npos ? "other" : v.substr(0, colon);
        ++tally.violations[kind];
        if (tally.failures.size() < 64)
          tally.failures.push_back(v + " " + spot);
      }
    } catch (const std::exception& e) {
      tally.failures.push_back(std::string("exception: ") + e.what() + " " +
                               spot);
    }
  }
  return tally;
}

IterationStats iteration_stats(const MetricSpace& space, double d,
                               std::uint64_t seeds, std::uint64_t seed0) {
  IterationStats st;
  std::uint64_t sep = 0, sparse = 0, internal = 0;
  for (std::uint64_t s = 0; s < seeds; ++s) {
    const ClosestPairResult res = closest_pair(space, d, mix_seed(seed0, s));
    internal += res.stats.recursion_nodes - res.stats.base_cases;
    sep += res.stats.sepann_iterations;
    sparse += res.stats.sparse_loop_iterations;
  }
  st.runs = seeds;
  st.separator_calls = internal;
  if (internal > 0) {
    st.mean_sepann = static_cast<double>(sep) / static_cast<double>(internal);
    st.mean_sparse_loop =
        static_cast<double>(sparse) / static_cast<double>(internal);
  }
  return st;
}

double good_point_fraction(const MetricSpace& space, double d, double mu) {
  const std::uint64_t n = space.size();
  const double c = derive_c(d, mu);
  if (static_cast<double>(n) < c + 1.0)
    throw InputError("good_point_fraction: space smaller than c + 1");
  const std::uint64_t k = ceil_ratio(n, c);
  std::vector<double> dists(n);
  std::uint64_t good = 0;
  for (PointId p = 0; p < n; ++p) {
    for (PointId q = 0; q < n; ++q) dists[q] = space.eval(p, q);
    const double rp = kth_smallest(dists, k);
    const double mu_r = mu * rp;
    std::uint64_t inside = 0;
    for (double v : dists)
      if (v <= mu_r) ++inside;
    if (2 * inside <= n) ++good;
  }
  return static_cast<double>(good) / static_cast<double>(n);
}

std::vector<ScalingPoint> scaling_experiment(
    const std::vector<std::uint64_t>& sizes, std::uint64_t seeds,
    std::uint64_t seed0) {
  struct Cell {
    std::size_t size_idx;
    std::uint64_t s;
  };
  std::vector<Cell> cells;
  for (std::size_t i = 0; i < sizes.size(); ++i)
    for (std::uint64_t s = 0; s < seeds; ++s) cells.push_back({i, s});
  std::vector<std::uint64_t> calls(cells.size(), 0);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (std::int64_t idx = 0; idx < static_cast<std::int64_t>(cells.size());
       ++idx) {
    const Cell cell = cells[static_cast<std::size_t>(idx)];
    const std::uint64_t n = sizes[cell.size_idx];
    const auto space = generate_instance(GeneratorKind::line_uniform, n,
                                         mix_seed(seed0, n * 131 + cell.s));
    const ClosestPairResult res = closest_pair(
        *space, 1.0, mix_seed(seed0 ^ 0x5ca1ab1e, n * 131 + cell.s));
    calls[static_cast<std::size_t>(idx)] = res.stats.distance_calls;
  }
  std::vector<ScalingPoint> out(sizes.size());
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    out[i].n = sizes[i];
    std::uint64_t total = 0;
    for (std::size_t idx = 0; idx < cells.size(); ++idx)
      if (cells[idx].size_idx == i) total += calls[idx];
    out[i].mean_calls = static_cast<double>(total) / static_cast<double>(seeds);
    out[i].normalized =
        out[i].mean_calls / (static_cast<double>(sizes[i]) *
                             std::log2(static_cast<double>(sizes[i])));
  }
  return out;
}

double scaling_spread(const std::vector<ScalingPoint>& points) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const ScalingPoint& pt : points) {
    lo = std::min(lo, pt.normalized);
    hi = std::max(hi, pt.normalized);
  }
  return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

namespace {

bool stats_equal(const RunStats& a, const RunStats& b) {
  return a.distance_calls == b.distance_calls &&
         a.sepann_iterations == b.sepann_iterations &&
         a.sparse_loop_iterations == b.sparse_loop_iterations &&
         a.recursion_nodes == b.recursion_nodes && a.max_depth == b.max_depth &&
         a.base_cases == b.base_cases &&
         a.audit_violations == b.audit_violations;
}

}  // namespace

std::vector<SuiteResult> run_suites(const Options& opts,
                                    const std::string& filter) {
  std::vector<SuiteResult> out;
  const std::uint64_t trials = std::max<std::uint64_t>(opts.trials, 1);
  const auto want = [&](const char* name) {
    return filter.empty() || filter == name;
  };
  const double e = std::numbers::e;

  if (want("exactness")) {
    SuiteResult r;
    r.name = "exactness";
    AuditTally tally;
    const FamilyPlan plans[] = {
        {GeneratorKind::line_uniform, trials, 2,
         std::min<std::uint64_t>(opts.max_n, 2000)},
        {GeneratorKind::square_uniform, std::max<std::uint64_t>(trials / 2, 2),
         2, std::min<std::uint64_t>(opts.max_n, 600)},
        {GeneratorKind::clustered, std::max<std::uint64_t>(trials / 2, 2), 2,
         std::min<std::uint64_t>(opts.max_n, 600)},
        {GeneratorKind::explicit_random, std::max<std::uint64_t>(trials / 3, 2),
         2, std::min<std::uint64_t>(opts.max_n, 128)},
    };
    for (std::size_t i = 0; i < std::size(plans); ++i)
      merge(tally, run_audited_family(plans[i], mix_seed(opts.seed, i)));
    r.checks = tally.checks;
    r.failures = tally.failures;
    out.push_back(std::move(r));
  }

  if (want("iteration-bounds")) {
    SuiteResult r;
    r.name = "iteration-bounds";
    const std::uint64_t n = std::min<std::uint64_t>(opts.max_n, 1024);
    if (n >= 128) {
      const auto space = generate_instance(GeneratorKind::line_uniform, n,
                                           mix_seed(opts.seed, 0x17e7));
      const IterationStats st =
          iteration_stats(*space, 1.0, std::max<std::uint64_t>(trials, 8),
                          mix_seed(opts.seed, 0x17e8));
      const double c = derive_c(1.0, e);
      r.checks = 2;
      if (!(st.mean_sparse_loop <= 2.5)) {
        std::ostringstream os;
        os << "mean annulus-sampling iterations " << st.mean_sparse_loop
           << " > 2.5 over " << st.separator_calls << " separator calls";
        r.failures.push_back(os.str());
      }
      if (!(st.mean_sepann <= c)) {
        std::ostringstream os;
        os << "mean separator-point draws " << st.mean_sepann << " > c = " << c;
        r.failures.push_back(os.str());
      }
    }
    out.push_back(std::move(r));
  }

  if (want("good-points")) {
    SuiteResult r;
    r.name = "good-points";
    const std::uint64_t n = std::min<std::uint64_t>(opts.max_n, 1024);
    if (n >= 64) {
      const auto space = generate_instance(GeneratorKind::line_uniform, n,
                                           mix_seed(opts.seed, 0x900d));
      const double c = derive_c(1.0, e);
      const double fraction = good_point_fraction(*space, 1.0, e);
      r.checks = 1;
      if (!(fraction >= 1.0 / c)) {
        std::ostringstream os;
        os << "good-point fraction " << fraction << " < 1/c = " << 1.0 / c
           << " at n=" << n;
        r.failures.push_back(os.str());
      }
    }
    out.push_back(std::move(r));
  }

  if (want("dimension")) {
    SuiteResult r;
    r.name = "dimension";
    r.checks = 3;
    const UniformDiscreteSpace uniform(16);
    if (doubling_dimension_exact(uniform) != 4.0)
      r.failures.push_back("uniform 16-point dimension != 4");
    const LayeredExampleSpace layered(4);
    const double expect = std::log2(5.0);
    if (std::fabs(doubling_dimension_exact(layered) - expect) > 1e-12)
      r.failures.push_back("layered n=4 dimension != log2(5)");
    std::vector<PointId> members(16);
    for (PointId i = 0; i < 16; ++i) members[i] = i;
    if (doubling_dimension_exact(layered, members) != 4.0)
      r.failures.push_back("layered member-subset dimension != 4");
    // subset dimension never exceeds twice the whole space's
    const std::uint64_t pairs = std::min<std::uint64_t>(trials, 8);
    Rng rng(mix_seed(opts.seed, 0xd1));
    for (std::uint64_t k = 0; k < pairs; ++k) {
      const auto space = generate_instance(GeneratorKind::square_uniform, 10,
                                           mix_seed(opts.seed, 0xd100 + k));
      const double dim_p = doubling_dimension_exact(*space);
      std::vector<PointId> subset;
      for (PointId i = 0; i < 10; ++i)
        if (rng.below(2) == 0) subset.push_back(i);
      if (subset.size() < 2) subset = {0, 1, 2};
      const double dim_s = doubling_dimension_exact(*space, subset);
      ++r.checks;
      if (dim_s > 2.0 * dim_p + 1e-9) {
        std::ostringstream os;
        os << "subset dimension " << dim_s << " exceeds twice " << dim_p
           << " (k=" << k << ")";
        r.failures.push_back(os.str());
      }
    }
    out.push_back(std::move(r));
  }

  if (want("packing")) {
    SuiteResult r;
    r.name = "packing";
    const std::uint64_t count = std::max<std::uint64_t>(trials, 8);
    const auto sizes =
        geometric_sizes(2, std::min<std::uint64_t>(opts.max_n, 512), count);
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      const auto space = generate_instance(GeneratorKind::line_uniform,
                                           sizes[i], mix_seed(opts.seed, i));
      ++r.checks;
      if (const auto v = packing_check(*space, 1.0)) {
        std::ostringstream os;
        os << "packing violation on line instance n=" << sizes[i]
           << ": ball(" << v->p << "," << v->radius << ") = " << v->ball
           << " > " << v->bound;
        r.failures.push_back(os.str());
      }
    }
    for (std::uint32_t n = 2; n <= 32; ++n) {
      const UniformDiscreteSpace space(n);
      ++r.checks;
      if (packing_check(space, std::log2(static_cast<double>(n)))) {
        std::ostringstream os;
        os << "packing violation on uniform discrete n=" << n;
        r.failures.push_back(os.str());
      }
    }
    out.push_back(std::move(r));
  }

  if (want("determinism")) {
    SuiteResult r;
    r.name = "determinism";
    const std::uint64_t reps = std::max<std::uint64_t>(trials / 2, 3);
    for (std::uint64_t i = 0; i < reps; ++i) {
      const std::uint64_t n =
          2 + mix_seed(opts.seed, 0xde7 + i) % std::min<std::uint64_t>(opts.max_n, 400);
      const auto space = generate_instance(GeneratorKind::line_uniform,
                                           std::max<std::uint64_t>(n, 2),
                                           mix_seed(opts.seed, 0x90 + i));
      const std::uint64_t run_seed = mix_seed(opts.seed, 0x91 + i);
      const ClosestPairResult a = closest_pair(*space, 1.0, run_seed);
      const ClosestPairResult b = closest_pair(*space, 1.0, run_seed);
      ++r.checks;
      if (a.delta != b.delta || a.a != b.a || a.b != b.b ||
          !stats_equal(a.stats, b.stats)) {
        std::ostringstream os;
        os << "two identical runs diverged (n=" << space->size()
           << " run_seed=" << run_seed << ")";
        r.failures.push_back(os.str());
      }
    }
    out.push_back(std::move(r));
  }

  if (want("scaling")) {
    SuiteResult r;
    r.name = "scaling";
    std::vector<std::uint64_t> sizes;
    for (std::uint64_t n : {1024u, 2048u, 4096u, 8192u})
      if (n <= opts.max_n) sizes.push_back(n);
    if (sizes.size() >= 2) {
      const auto points = scaling_experiment(
          sizes, std::max<std::uint64_t>(trials / 5, 3),
          mix_seed(opts.seed, 0x5ca1e));
      const double spread = scaling_spread(points);
      r.checks = 1;
      if (!(spread <= 3.0)) {
        std::ostringstream os;
        os << "normalized distance-call spread " << spread << " exceeds 3.0";
        r.failures.push_back(os.str());
      }
    }
    out.push_back(std::move(r));
  }

  return out;
}

}  // namespace cpdm::verify
