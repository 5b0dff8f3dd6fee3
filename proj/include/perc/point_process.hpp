#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "perc/rng.hpp"

namespace perc {

// Axis-aligned box in R^m with strictly positive extent on every axis.
class Box {
 public:
  Box(std::vector<double> lower, std::vector<double> upper);

  // The cube [-edge/2, edge/2]^dim.
  static Box centered_cube(int dim, double edge);

  int dim() const { return static_cast<int>(lower_.size()); }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  double extent(int axis) const { return upper_[axis] - lower_[axis]; }
  double volume() const;

  // Edge length, defined only for boxes with identical extents on all axes.
  bool is_cube() const;
  double edge() const;

  bool contains(std::span<const double> point) const;

  // Largest box contained in both, or nullopt if the intersection is degenerate.
  std::optional<Box> intersect(const Box& other) const;

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
};

// Sampling provenance carried by PointSets produced by sample_poisson.
struct SampleMeta {
  double lambda = 0.0;
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;
};

// Immutable list of m-dimensional points inside a box, row-major storage.
class PointSet {
 public:
  PointSet(Box box, std::vector<double> coords);
  PointSet(Box box, std::vector<double> coords, SampleMeta meta);

  int dim() const { return box_.dim(); }
  std::size_t size() const { return coords_.size() / static_cast<std::size_t>(dim()); }
  bool empty() const { return coords_.empty(); }

  std::span<const double> point(std::size_t i) const {
    const auto m = static_cast<std::size_t>(dim());
    return {coords_.data() + i * m, m};
  }
  const std::vector<double>& coords() const { return coords_; }
  const Box& box() const { return box_; }
  const std::optional<SampleMeta>& meta() const { return meta_; }

  // FNV-1a over the raw coordinate bytes; used to verify paired-seed reuse.
  std::uint64_t coord_hash() const;

 private:
  Box box_;
  std::vector<double> coords_;
  std::optional<SampleMeta> meta_;
};

// Homogeneous Poisson point process on `box` with rate `lambda`:
// Poisson(lambda * volume) count, then i.i.d. uniform placement.
PointSet sample_poisson(const Box& box, double lambda, RngStream& rng);

// Exact Poisson(mean) draw; exposed for the sampler's distribution tests.
std::uint64_t poisson_count(double mean, RngStream& rng);

}  // namespace perc
