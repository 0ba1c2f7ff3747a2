#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "cpdm/metric_core.hpp"

namespace cpdm {

// Points in R^dim under the Euclidean metric. Coordinates are stored flat,
// point i at [i*dim, (i+1)*dim). Duplicate points are rejected at
// construction since they would make the closest-pair distance zero in a
// degenerate way the recursion's strict annulus widths cannot serve.
class EuclideanSpace final : public MetricSpace {
 public:
  EuclideanSpace(std::vector<double> coords, std::size_t dim);
  static EuclideanSpace from_rows(const std::vector<std::vector<double>>& rows);

  double eval(PointId i, PointId j) const override;
  std::size_t dim() const { return dim_; }
  const std::vector<double>& coords() const { return coords_; }

 private:
  std::vector<double> coords_;
  std::size_t dim_;
};

// Arbitrary finite metric given by its full distance matrix. The matrix is
// validated on construction; the first axiom violation is reported with its
// witness indices.
class ExplicitSpace final : public MetricSpace {
 public:
  explicit ExplicitSpace(DistanceMatrix m);

  double eval(PointId i, PointId j) const override;
  const DistanceMatrix& matrix() const { return matrix_; }

 private:
  DistanceMatrix matrix_;
};

// n^2 + n points: n groups of n members plus one hub per group. A hub is at
// distance 1 from each member of its own group; every other pair is at
// distance 2. Doubling dimension log2(n+1): a radius-2 ball is everything,
// and any radius-1 ball around a hub needs its n members plus itself
// covered, each half-ball holding at most one "other" point.
class LayeredExampleSpace final : public MetricSpace {
 public:
  explicit LayeredExampleSpace(std::uint32_t n);

  double eval(PointId i, PointId j) const override;
  std::uint32_t groups() const { return n_; }
  bool is_hub(PointId i) const { return i >= n_ * n_; }

 private:
  std::uint32_t n_;
};

// n points, every distinct pair at distance 1. Doubling dimension log2(n):
// half-radius balls are singletons.
class UniformDiscreteSpace final : public MetricSpace {
 public:
  explicit UniformDiscreteSpace(std::uint32_t n) : MetricSpace(n) {}
  double eval(PointId i, PointId j) const override {
    return i == j ? 0.0 : 1.0;
  }
};

// "N" on the first line, then N rows of N whitespace-separated reals.
DistanceMatrix parse_matrix(std::istream& in);
DistanceMatrix load_matrix(const std::string& path);

// One point per row, comma-separated coordinates; dimension fixed by the
// first row. Blank lines and lines starting with '#' are skipped.
EuclideanSpace parse_points_csv(std::istream& in);
EuclideanSpace load_points_csv(const std::string& path);

enum class GeneratorKind { line_uniform, square_uniform, clustered, explicit_random };

const char* to_string(GeneratorKind kind);
GeneratorKind parse_generator_kind(const std::string& name);

struct GeneratorParams {
  double cluster_sigma = 0.05;
};

// d to pass to closest_pair for instances of this generator: 1 for the
// line, 3 for the square and clustered families (plane dimension doubled by
// the subset argument, rounded up), ceil(log2 n) for random explicit
// matrices.
double generator_dimension(GeneratorKind kind, std::uint64_t n);

// Deterministic in (kind, n, seed, params). line_uniform: n uniform reals
// in [0,1). square_uniform: n uniform points in [0,1)^2. clustered:
// ceil(sqrt(n)) uniform centers, each point a Gaussian offset from a
// uniformly chosen center. explicit_random: symmetric uniform entries in
// [1,2) (any such matrix is a metric; the shortest-path closure kept here
// is an identity on it), zero diagonal. Rejection-resamples the coordinate
// draws on duplicate collisions.
std::unique_ptr<MetricSpace> generate_instance(GeneratorKind kind,
                                               std::uint64_t n,
                                               std::uint64_t seed,
                                               GeneratorParams params = {});

}  // namespace cpdm
