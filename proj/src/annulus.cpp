#include "cpdm/annulus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace cpdm {

namespace {

constexpr double kRelSlack = 4.0 * std::numeric_limits<double>::epsilon();

std::string cap_message(const char* where, std::uint64_t cap) {
  std::ostringstream os;
  os << where << ": iteration cap " << cap
     << " exceeded; the configured dimension bound is likely below the true "
        "doubling dimension";
  return os.str();
}

}  // namespace

double derive_c(double d, double mu) {
  const double l = std::log2(4.0 * mu);
  const bool dyadic = l == std::nearbyint(l);
  return 2.0 * std::pow((dyadic ? 8.0 : 4.0) * mu, d);
}

std::uint64_t ceil_ratio(std::uint64_t n, double c) {
  if (!(c > 0.0)) throw InputError("ceil_ratio: divisor must be positive");
  const double nd = static_cast<double>(n);
  std::uint64_t k = static_cast<std::uint64_t>(nd / c);
  while (static_cast<double>(k) * c < nd) ++k;
  while (k > 0 && static_cast<double>(k - 1) * c >= nd) --k;
  return k;
}

double effective_c(const AlgorithmConfig& config, double d, double mu) {
  if (config.c_override) {
    if (config.strict_constants)
      throw InputError(
          "c override is only honored with strict_constants disabled");
    return *config.c_override;
  }
  return derive_c(d, mu);
}

namespace detail {

SepAnnScan sep_ann_scan(const MetricSpace& space, RunContext& ctx,
                        SubsetView subset, double d, double mu) {
  const std::uint64_t n = subset.size();
  const double c = effective_c(ctx.config, d, mu);
  if (static_cast<double>(n) < c + 1.0) {
    std::ostringstream os;
    os << "sep_ann: subset of size " << n << " is below c + 1 = " << c + 1.0
       << "; no separating annulus is guaranteed";
    throw InputError(os.str());
  }
  const std::uint64_t k = ceil_ratio(n, c);
  const std::uint64_t cap = ctx.config.iteration_cap.value_or(0);

  SepAnnScan out;
  std::vector<double> vals(n);
  for (std::uint64_t iter = 1;; ++iter) {
    if (cap != 0 && iter > cap)
      throw IterationCapError(cap_message("sep_ann", cap), cap);
    ++ctx.sepann_iterations;
    const PointId p = subset[static_cast<std::size_t>(ctx.rng.below(n))];
    out.dists = distances_from(space, ctx, subset, p);
    for (std::size_t i = 0; i < n; ++i) vals[i] = out.dists[i].second;
    const double r_prime = kth_smallest(vals, k);
    const double mu_r = mu * r_prime;
    std::uint64_t inner = 0;
    for (double v : vals)
      if (v <= mu_r) ++inner;
    if (2 * inner <= n) {  // p is good: the mu-ball misses half the subset
      out.result = SepAnnResult{p, r_prime, iter};
      break;
    }
  }

  if (ctx.config.audit) {
    const SepAnnResult& r = out.result;
    ctx.shadow_calls += n;
    std::uint64_t in_rp = 0, in_mu = 0;
    for (PointId x : subset) {
      const double dist = space.eval(r.p, x);
      if (dist <= r.r_prime) ++in_rp;
      if (dist <= mu * r.r_prime) ++in_mu;
    }
    if (!(r.r_prime > 0.0)) {
      std::ostringstream os;
      os << "separator-radius: R' = " << r.r_prime << " not positive at n=" << n;
      ctx.violation(os.str());
    }
    if (in_rp < k) {
      std::ostringstream os;
      os << "separator-ball: |ball(p,R')| = " << in_rp << " < " << k
         << " = ceil(n/c) at n=" << n;
      ctx.violation(os.str());
    }
    if (2 * in_mu > n) {
      std::ostringstream os;
      os << "separator-half: |ball(p,mu*R')| = " << in_mu << " > n/2 at n="
         << n;
      ctx.violation(os.str());
    }
  }
  return out;
}

}  // namespace detail

SepAnnResult sep_ann(const MetricSpace& space, RunContext& ctx,
                     SubsetView subset, double d, double mu) {
  return detail::sep_ann_scan(space, ctx, subset, d, mu).result;
}

std::vector<double> radii_schedule(double r_prime, int t) {
  if (!(r_prime > 0.0))
    throw InputError("radii_schedule: base radius must be positive");
  if (t < 1) throw InputError("radii_schedule: need t >= 1");
  std::vector<double> radii(static_cast<std::size_t>(t) + 1);
  const double factor = 1.0 + 1.0 / static_cast<double>(t);
  radii[0] = r_prime;
  for (std::size_t i = 1; i < radii.size(); ++i) radii[i] = radii[i - 1] * factor;
  return radii;
}

AnnulusIndex annulus_index(double dist, std::span<const double> radii) {
  if (radii.size() < 2)
    throw InputError("annulus_index: schedule needs at least two radii");
  if (dist <= radii.front()) return {AnnulusIndex::Kind::inside, 0};
  if (dist > radii.back()) return {AnnulusIndex::Kind::outside, 0};
  const auto it = std::lower_bound(radii.begin(), radii.end(), dist);
  return {AnnulusIndex::Kind::annulus, static_cast<int>(it - radii.begin())};
}

namespace {

// Post-exit verification of the separator against a fresh distance scan;
// every count is recomputed from raw oracle reads.
void audit_separator(const MetricSpace& space, RunContext& ctx,
                     SubsetView subset, const SeparatorResult& res,
                     std::span<const double> radii, double d) {
  const std::uint64_t n = subset.size();
  const int t = res.t;
  const double c = effective_c(ctx.config, d, std::numbers::e);
  const std::uint64_t k = ceil_ratio(n, c);

  ctx.shadow_calls += n;
  std::vector<std::uint64_t> hist(static_cast<std::size_t>(t) + 2, 0);
  std::uint64_t s1 = 0, s2 = 0, s3 = 0;
  const double outer = annulus_outer_radius(res.inner_radius, t);
  for (PointId x : subset) {
    const double dist = space.eval(res.p, x);
    const AnnulusIndex cls = annulus_index(dist, radii);
    switch (cls.kind) {
      case AnnulusIndex::Kind::inside:
        ++hist[0];
        break;
      case AnnulusIndex::Kind::annulus:
        ++hist[static_cast<std::size_t>(cls.i)];
        break;
      case AnnulusIndex::Kind::outside:
        ++hist[static_cast<std::size_t>(t) + 1];
        break;
    }
    if (dist <= res.inner_radius)
      ++s1;
    else if (dist <= outer)
      ++s2;
    else
      ++s3;
  }

  std::uint64_t classified = 0;
  for (std::uint64_t h : hist) classified += h;
  if (classified != n) {
    std::ostringstream os;
    os << "classification: " << classified << " of " << n
       << " points classified";
    ctx.violation(os.str());
  }
  if (s1 != res.sizes[0] || s2 != res.sizes[1] || s3 != res.sizes[2]) {
    std::ostringstream os;
    os << "classification: recount (" << s1 << "," << s2 << "," << s3
       << ") != reported (" << res.sizes[0] << "," << res.sizes[1] << ","
       << res.sizes[2] << ")";
    ctx.violation(os.str());
  }
  if (s1 < k) {
    std::ostringstream os;
    os << "sparse-ball: |ball(p,R)| = " << s1 << " < " << k
       << " = ceil(n/c) at n=" << n;
    ctx.violation(os.str());
  }
  if (s2 * static_cast<std::uint64_t>(t) > n) {
    std::ostringstream os;
    os << "sparse-annulus: |annulus| = " << s2 << " > n/t at n=" << n
       << " t=" << t;
    ctx.violation(os.str());
  }
  if (2 * s3 < n) {
    std::ostringstream os;
    os << "sparse-outside: |outside| = " << s3 << " < n/2 at n=" << n;
    ctx.violation(os.str());
  }

  std::uint64_t light = 0;
  for (int i = 1; i <= t; ++i)
    if (hist[static_cast<std::size_t>(i)] * static_cast<std::uint64_t>(t) <= n)
      ++light;
  const std::uint64_t need = (static_cast<std::uint64_t>(t) + 1) / 2;
  if (light < need) {
    std::ostringstream os;
    os << "light-annuli: only " << light << " of " << t
       << " annuli hold <= n/t points (need " << need << ")";
    ctx.violation(os.str());
  }

  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1])) {
      std::ostringstream os;
      os << "schedule-order: radii not strictly increasing at index " << i;
      ctx.violation(os.str());
      break;
    }
  const double cap = std::numbers::e * radii.front() * (1.0 + kRelSlack);
  if (radii.back() > cap) {
    std::ostringstream os;
    os << "schedule-cap: outermost radius " << radii.back() << " exceeds e*R' = "
       << std::numbers::e * radii.front();
    ctx.violation(os.str());
  }
}

}  // namespace

SeparatorResult sparse_sep_ann(const MetricSpace& space, RunContext& ctx,
                               SubsetView subset, double d, int t) {
  if (t < 1) throw InputError("sparse_sep_ann: need t >= 1");
  const std::uint64_t n = subset.size();
  auto scan = detail::sep_ann_scan(space, ctx, subset, d, std::numbers::e);
  const auto radii = radii_schedule(scan.result.r_prime, t);

  // Occupancy of each candidate annulus, from the final scan already paid
  // for; the sampling loop below costs no oracle calls.
  std::vector<std::uint64_t> hist(static_cast<std::size_t>(t) + 2, 0);
  for (const auto& [id, dist] : scan.dists) {
    const AnnulusIndex cls = annulus_index(dist, radii);
    if (cls.kind == AnnulusIndex::Kind::inside)
      ++hist[0];
    else if (cls.kind == AnnulusIndex::Kind::outside)
      ++hist[static_cast<std::size_t>(t) + 1];
    else
      ++hist[static_cast<std::size_t>(cls.i)];
  }

  const std::uint64_t cap = ctx.config.iteration_cap.value_or(0);
  std::uint64_t iterations = 0;
  int accepted = 0;
  for (;;) {
    ++iterations;
    if (cap != 0 && iterations > cap)
      throw IterationCapError(cap_message("sparse_sep_ann", cap), cap);
    ++ctx.sparse_iterations;
    const int i = 1 + static_cast<int>(ctx.rng.below(static_cast<std::uint64_t>(t)));
    if (hist[static_cast<std::size_t>(i)] * static_cast<std::uint64_t>(t) <= n) {
      accepted = i;
      break;
    }
  }

  SeparatorResult res;
  res.p = scan.result.p;
  res.t = t;
  res.inner_radius = radii[static_cast<std::size_t>(accepted - 1)];
  res.loop_iterations = iterations;
  res.sepann_iterations = scan.result.iterations;
  const double outer = annulus_outer_radius(res.inner_radius, t);
  for (const auto& [id, dist] : scan.dists) {
    if (dist <= res.inner_radius)
      ++res.sizes[0];
    else if (dist <= outer)
      ++res.sizes[1];
    else
      ++res.sizes[2];
  }

  if (ctx.config.audit) audit_separator(space, ctx, subset, res, radii, d);
  return res;
}

}  // namespace cpdm
