#include "perc/point_process.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <utility>

namespace perc {

Box::Box(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.empty() || lower_.size() != upper_.size()) {
    throw std::invalid_argument("Box: lower/upper must be non-empty and of equal dimension");
  }
  for (std::size_t i = 0; i < lower_.size(); ++i) {
    if (!(lower_[i] < upper_[i])) {
      throw std::invalid_argument("Box: requires lower < upper on every axis");
    }
  }
}

Box Box::centered_cube(int dim, double edge) {
  if (dim < 1) throw std::invalid_argument("Box: dimension must be positive");
  if (!(edge > 0.0)) throw std::invalid_argument("Box: edge must be positive");
  std::vector<double> lo(static_cast<std::size_t>(dim), -edge / 2.0);
  std::vector<double> hi(static_cast<std::size_t>(dim), edge / 2.0);
  return Box(std::move(lo), std::move(hi));
}

double Box::volume() const {
  double v = 1.0;
  for (int i = 0; i < dim(); ++i) v *= extent(i);
  return v;
}

bool Box::is_cube() const {
  for (int i = 1; i < dim(); ++i) {
    if (extent(i) != extent(0)) return false;
  }
  return true;
}

double Box::edge() const {
  if (!is_cube()) throw std::invalid_argument("Box: edge() requires equal extents");
  return extent(0);
}

bool Box::contains(std::span<const double> point) const {
  if (point.size() != static_cast<std::size_t>(dim())) return false;
  for (int i = 0; i < dim(); ++i) {
    if (!(point[i] >= lower_[i] && point[i] <= upper_[i])) return false;
  }
  return true;
}

std::optional<Box> Box::intersect(const Box& other) const {
  if (other.dim() != dim()) throw std::invalid_argument("Box: dimension mismatch");
  std::vector<double> lo(static_cast<std::size_t>(dim()));
  std::vector<double> hi(static_cast<std::size_t>(dim()));
  for (int i = 0; i < dim(); ++i) {
    lo[i] = std::max(lower_[i], other.lower_[i]);
    hi[i] = std::min(upper_[i], other.upper_[i]);
    if (!(lo[i] < hi[i])) return std::nullopt;
  }
  return Box(std::move(lo), std::move(hi));
}

PointSet::PointSet(Box box, std::vector<double> coords)
    : box_(std::move(box)), coords_(std::move(coords)) {
  const auto m = static_cast<std::size_t>(box_.dim());
  if (coords_.size() % m != 0) {
    throw std::invalid_argument("PointSet: coordinate count not a multiple of the dimension");
  }
  for (std::size_t i = 0; i < coords_.size() / m; ++i) {
    if (!box_.contains({coords_.data() + i * m, m})) {
      throw std::invalid_argument("PointSet: point outside the box");
    }
  }
}

PointSet::PointSet(Box box, std::vector<double> coords, SampleMeta meta)
    : PointSet(std::move(box), std::move(coords)) {
  meta_ = meta;
}

std::uint64_t PointSet::coord_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double c : coords_) {
    std::uint64_t bits;
    std::memcpy(&bits, &c, sizeof(bits));
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xffULL;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

namespace {

// Knuth's product-of-uniforms method; exact for modest means.
std::uint64_t poisson_small(double mean, RngStream& rng) {
  const double threshold = std::exp(-mean);
  std::uint64_t k = 0;
  double t = 1.0;
  for (;;) {
    t *= rng.next_unit();
    if (t <= threshold) return k;
    ++k;
  }
}

}  // namespace

std::uint64_t poisson_count(double mean, RngStream& rng) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw std::invalid_argument("poisson_count: mean must be finite and nonnegative");
  }
  // Split a large mean into chunks; the sum of independent Poissons is Poisson.
  constexpr double kChunk = 16.0;
  std::uint64_t total = 0;
  double remaining = mean;
  while (remaining > kChunk) {
    total += poisson_small(kChunk, rng);
    remaining -= kChunk;
  }
  if (remaining > 0.0) total += poisson_small(remaining, rng);
  return total;
}

PointSet sample_poisson(const Box& box, double lambda, RngStream& rng) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("sample_poisson: lambda must be positive and finite");
  }
  const double mean = lambda * box.volume();
  if (mean >= 9.0e15) {
    throw std::invalid_argument("sample_poisson: expected count too large");
  }
  const std::uint64_t count = poisson_count(mean, rng);
  const int m = box.dim();
  std::vector<double> coords;
  coords.reserve(count * static_cast<std::size_t>(m));
  for (std::uint64_t i = 0; i < count; ++i) {
    for (int a = 0; a < m; ++a) {
      coords.push_back(box.lower()[a] + rng.next_unit() * box.extent(a));
    }
  }
  return PointSet(box, std::move(coords),
                  SampleMeta{lambda, rng.master_seed(), rng.stream_index()});
}

}  // namespace perc
