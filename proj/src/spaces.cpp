#include "cpdm/spaces.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "cpdm/rng.hpp"

namespace cpdm {

namespace {

bool rows_equal(const std::vector<double>& coords, std::size_t dim,
                std::size_t a, std::size_t b) {
  for (std::size_t k = 0; k < dim; ++k)
    if (coords[a * dim + k] != coords[b * dim + k]) return false;
  return true;
}

}  // namespace

EuclideanSpace::EuclideanSpace(std::vector<double> coords, std::size_t dim)
    : MetricSpace(dim == 0 ? 0 : coords.size() / dim),
      coords_(std::move(coords)),
      dim_(dim) {
  if (dim_ == 0) throw InputError("EuclideanSpace: dimension must be positive");
  if (coords_.size() % dim_ != 0)
    throw InputError(
        "EuclideanSpace: coordinate count is not a multiple of the dimension");
  for (double v : coords_)
    if (!std::isfinite(v))
      throw InputError("EuclideanSpace: non-finite coordinate");
  const std::size_t n = size();
  std::vector<std::uint32_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<std::uint32_t>(i);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return std::lexicographical_compare(
        coords_.begin() + a * dim_, coords_.begin() + (a + 1) * dim_,
        coords_.begin() + b * dim_, coords_.begin() + (b + 1) * dim_);
  });
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (rows_equal(coords_, dim_, order[i], order[i + 1])) {
      std::ostringstream os;
      os << "EuclideanSpace: duplicate points at indices " << order[i]
         << " and " << order[i + 1];
      throw InputError(os.str());
    }
}

EuclideanSpace EuclideanSpace::from_rows(
    const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw InputError("EuclideanSpace: need at least one point");
  const std::size_t dim = rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * dim);
  for (const auto& row : rows) {
    if (row.size() != dim)
      throw InputError("EuclideanSpace: rows of differing dimension");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return EuclideanSpace(std::move(flat), dim);
}

double EuclideanSpace::eval(PointId i, PointId j) const {
  double sq = 0.0;
  const double* a = coords_.data() + static_cast<std::size_t>(i) * dim_;
  const double* b = coords_.data() + static_cast<std::size_t>(j) * dim_;
  for (std::size_t k = 0; k < dim_; ++k) {
    const double diff = a[k] - b[k];
    sq += diff * diff;
  }
  return std::sqrt(sq);
}

ExplicitSpace::ExplicitSpace(DistanceMatrix m)
    : MetricSpace(m.n), matrix_(std::move(m)) {
  const auto violations = validate_metric(matrix_);
  if (!violations.empty())
    throw InputError("matrix is not a metric: " + to_string(violations.front()));
}

double ExplicitSpace::eval(PointId i, PointId j) const {
  return matrix_.at(i, j);
}

LayeredExampleSpace::LayeredExampleSpace(std::uint32_t n)
    : MetricSpace(static_cast<std::size_t>(n) * n + n), n_(n) {
  if (n == 0) throw InputError("LayeredExampleSpace: need n >= 1");
}

double LayeredExampleSpace::eval(PointId i, PointId j) const {
  if (i == j) return 0.0;
  const std::uint32_t members = n_ * n_;
  const bool hub_i = i >= members;
  const bool hub_j = j >= members;
  if (hub_i != hub_j) {
    const std::uint32_t hub = (hub_i ? i : j) - members;
    const std::uint32_t member = hub_i ? j : i;
    if (member / n_ == hub) return 1.0;
  }
  return 2.0;
}

DistanceMatrix parse_matrix(std::istream& in) {
  std::size_t n = 0;
  if (!(in >> n)) throw InputError("matrix: missing size header");
  if (n > 32768) throw InputError("matrix: size too large");
  DistanceMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!(in >> m.at(i, j))) {
        std::ostringstream os;
        os << "matrix: expected " << n * n << " entries, failed at row " << i
           << " column " << j;
        throw InputError(os.str());
      }
  return m;
}

DistanceMatrix load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path);
  return parse_matrix(in);
}

namespace {

double parse_cell(const std::string& cell, std::size_t line_no) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  while (begin != end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end != begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r'))
    --end;
  double value = 0.0;
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc{} || res.ptr != end) {
    std::ostringstream os;
    os << "points: cannot parse coordinate on line " << line_no;
    throw InputError(os.str());
  }
  return value;
}

}  // namespace

EuclideanSpace parse_points_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(parse_cell(cell, line_no));
    if (!rows.empty() && row.size() != rows.front().size()) {
      std::ostringstream os;
      os << "points: line " << line_no << " has " << row.size()
         << " coordinates, expected " << rows.front().size();
      throw InputError(os.str());
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError("points: no data rows");
  return EuclideanSpace::from_rows(rows);
}

EuclideanSpace load_points_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path);
  return parse_points_csv(in);
}

const char* to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::line_uniform:
      return "line-uniform";
    case GeneratorKind::square_uniform:
      return "square-uniform";
    case GeneratorKind::clustered:
      return "clustered";
    case GeneratorKind::explicit_random:
      return "explicit-random";
  }
  return "unknown";
}

GeneratorKind parse_generator_kind(const std::string& name) {
  if (name == "line-uniform") return GeneratorKind::line_uniform;
  if (name == "square-uniform") return GeneratorKind::square_uniform;
  if (name == "clustered") return GeneratorKind::clustered;
  if (name == "explicit-random") return GeneratorKind::explicit_random;
  throw InputError("unknown generator kind: " + name);
}

double generator_dimension(GeneratorKind kind, std::uint64_t n) {
  switch (kind) {
    case GeneratorKind::line_uniform:
      return 1.0;
    case GeneratorKind::square_uniform:
    case GeneratorKind::clustered:
      return 3.0;
    case GeneratorKind::explicit_random:
      return std::max(1.0, std::ceil(std::log2(static_cast<double>(n))));
  }
  return 1.0;
}

namespace {

std::unique_ptr<MetricSpace> make_euclidean(Rng& rng, std::uint64_t n,
                                            std::size_t dim, double sigma,
                                            bool clustered) {
  std::vector<double> centers;
  std::uint64_t k = 0;
  if (clustered) {
    k = static_cast<std::uint64_t>(
        std::ceil(std::sqrt(static_cast<double>(n))));
    centers.resize(k * dim);
    for (double& v : centers) v = rng.unit();
  }
  std::set<std::vector<double>> seen;
  std::vector<double> flat;
  flat.reserve(n * dim);
  std::vector<double> row(dim);
  while (seen.size() < n) {
    if (clustered) {
      const std::uint64_t c = rng.below(k);
      for (std::size_t kd = 0; kd < dim; ++kd)
        row[kd] = centers[c * dim + kd] + sigma * rng.normal();
    } else {
      for (std::size_t kd = 0; kd < dim; ++kd) row[kd] = rng.unit();
    }
    if (!seen.insert(row).second) continue;  // exact duplicate: redraw
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return std::make_unique<EuclideanSpace>(std::move(flat), dim);
}

std::unique_ptr<MetricSpace> make_explicit(Rng& rng, std::uint64_t n) {
  DistanceMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      // entries in [1,2): any symmetric matrix with this range is a metric
      const double v = 1.0 + rng.unit();
      m.at(i, j) = v;
      m.at(j, i) = v;
    }
  // shortest-path closure; a no-op on the range above, kept so the metric
  // property never rests on the range argument alone
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double via = m.at(i, k) + m.at(k, j);
        if (i != j && via < m.at(i, j)) m.at(i, j) = via;
      }
  return std::make_unique<ExplicitSpace>(std::move(m));
}

}  // namespace

std::unique_ptr<MetricSpace> generate_instance(GeneratorKind kind,
                                               std::uint64_t n,
                                               std::uint64_t seed,
                                               GeneratorParams params) {
  if (n < 2) throw InputError("generate_instance: need n >= 2");
  if (!(params.cluster_sigma > 0.0))
    throw InputError("generate_instance: cluster_sigma must be positive");
  Rng rng(mix_seed(seed, n * 4 + static_cast<std::uint64_t>(kind)));
  switch (kind) {
    case GeneratorKind::line_uniform:
      return make_euclidean(rng, n, 1, 0.0, false);
    case GeneratorKind::square_uniform:
      return make_euclidean(rng, n, 2, 0.0, false);
    case GeneratorKind::clustered:
      return make_euclidean(rng, n, 2, params.cluster_sigma, true);
    case GeneratorKind::explicit_random:
      return make_explicit(rng, n);
  }
  throw InputError("generate_instance: unknown kind");
}

}  // namespace cpdm
