#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "perc/grid.hpp"
#include "perc/point_process.hpp"

namespace perc {

// Connected components of the radius-r graph with strict open-ball
// connectivity: points x != y are adjacent iff ||x - y|| < r.
//
// Component ids are canonical: components are numbered by their smallest
// contained point index, in ascending order. This makes the labeling a pure
// function of the point set, independent of union order or thread count.
struct ClusterLabeling {
  std::vector<std::uint32_t> component_of;  // per point
  std::vector<std::uint32_t> sizes;         // per component id
  std::vector<std::uint32_t> order;         // ids by (size desc, id asc)

  std::size_t num_components() const { return sizes.size(); }
  std::size_t num_points() const { return component_of.size(); }
};

struct TopClusters {
  std::uint64_t largest_size = 0;
  std::uint64_t second_size = 0;
  bool largest_unique = false;
  std::optional<std::uint32_t> largest_id;
};

ClusterLabeling find_clusters(const PointSet& points, double r);
ClusterLabeling find_clusters(const PointSet& points, double r, const GridIndex& grid);

TopClusters top_clusters(const ClusterLabeling& labeling);

std::uint32_t cluster_of(const ClusterLabeling& labeling, std::size_t point_index);

// Debug dump: point index, coordinates, component id.
void dump_labeling_csv(const PointSet& points, const ClusterLabeling& labeling, std::ostream& out);

// Union-find with path halving and union by size, shared by the clustering
// passes and the per-window scorer.
class UnionFind {
 public:
  void reset(std::size_t n);
  std::uint32_t find(std::uint32_t x);
  void unite(std::uint32_t a, std::uint32_t b);
  std::uint32_t size_of_root(std::uint32_t root) const { return size_[root]; }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> size_;
};

// Adjacency of the radius-r graph in CSR form, storing for each point only
// the neighbors with larger index (each undirected edge appears once).
struct UpperAdjacency {
  std::vector<std::uint32_t> offsets;
  std::vector<std::uint32_t> neighbors;

  std::span<const std::uint32_t> row(std::uint32_t i) const {
    return {neighbors.data() + offsets[i], offsets[i + 1] - offsets[i]};
  }
};

UpperAdjacency build_upper_adjacency(const PointSet& points, double r, const GridIndex& grid);

}  // namespace perc
