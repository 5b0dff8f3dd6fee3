#include "perc/clusters.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace perc {

void UnionFind::reset(std::size_t n) {
  parent_.resize(n);
  size_.assign(n, 1);
  std::iota(parent_.begin(), parent_.end(), 0u);
}

std::uint32_t UnionFind::find(std::uint32_t x) {
  while (x != parent_[x]) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

void UnionFind::unite(std::uint32_t a, std::uint32_t b) {
  a = find(a);
  b = find(b);
  if (a == b) return;
  if (size_[a] < size_[b]) std::swap(a, b);
  parent_[b] = a;
  size_[a] += size_[b];
}

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    d2 += d * d;
  }
  return d2;
}

void validate_clustering_input(const PointSet& points, double r, const GridIndex& grid) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw std::invalid_argument("find_clusters: r must be positive and finite");
  }
  if (grid.dim() != points.dim()) {
    throw std::invalid_argument("find_clusters: grid/point dimension mismatch");
  }
  if (grid.cell_size() != r) {
    throw std::invalid_argument("find_clusters: grid cell size must equal r");
  }
}

// Visits every unordered candidate pair (i, j), i < j, from the same or
// Chebyshev-adjacent cells, exactly once per pair.
template <typename Fn>
void scan_candidate_pairs(const PointSet& points, const GridIndex& grid, Fn&& fn) {
  const int m = points.dim();
  const std::size_t n = points.size();
  std::vector<std::int64_t> cell(static_cast<std::size_t>(m));
  std::vector<std::int64_t> nb(static_cast<std::size_t>(m));
  std::vector<int> off(static_cast<std::size_t>(m));
  for (std::size_t i = 0; i < n; ++i) {
    grid.cell_of(points.point(i), cell.data());
    // Odometer over the 3^m neighborhood offsets in {-1,0,1}^m.
    std::fill(off.begin(), off.end(), -1);
    for (;;) {
      for (int a = 0; a < m; ++a) {
        nb[static_cast<std::size_t>(a)] = cell[static_cast<std::size_t>(a)] + off[static_cast<std::size_t>(a)];
      }
      for (std::uint32_t j : grid.bucket(nb)) {
        if (j > i) fn(static_cast<std::uint32_t>(i), j);
      }
      int a = m - 1;
      for (; a >= 0; --a) {
        if (++off[static_cast<std::size_t>(a)] <= 1) break;
        off[static_cast<std::size_t>(a)] = -1;
      }
      if (a < 0) break;
    }
  }
}

ClusterLabeling labeling_from_union_find(std::size_t n, UnionFind& uf) {
  ClusterLabeling out;
  out.component_of.resize(n);
  constexpr std::uint32_t kUnset = 0xffffffffu;
  std::vector<std::uint32_t> root_to_id(n, kUnset);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t root = uf.find(static_cast<std::uint32_t>(i));
    if (root_to_id[root] == kUnset) {
      root_to_id[root] = static_cast<std::uint32_t>(out.sizes.size());
      out.sizes.push_back(uf.size_of_root(root));
    }
    out.component_of[i] = root_to_id[root];
  }
  out.order.resize(out.sizes.size());
  std::iota(out.order.begin(), out.order.end(), 0u);
  std::sort(out.order.begin(), out.order.end(), [&out](std::uint32_t a, std::uint32_t b) {
    if (out.sizes[a] != out.sizes[b]) return out.sizes[a] > out.sizes[b];
    return a < b;
  });
  return out;
}

}  // namespace

ClusterLabeling find_clusters(const PointSet& points, double r) {
  const GridIndex grid(points, r);
  return find_clusters(points, r, grid);
}

ClusterLabeling find_clusters(const PointSet& points, double r, const GridIndex& grid) {
  validate_clustering_input(points, r, grid);
  const double r2 = r * r;
  UnionFind uf;
  uf.reset(points.size());
  scan_candidate_pairs(points, grid, [&](std::uint32_t i, std::uint32_t j) {
    if (squared_distance(points.point(i), points.point(j)) < r2) uf.unite(i, j);
  });
  return labeling_from_union_find(points.size(), uf);
}

TopClusters top_clusters(const ClusterLabeling& labeling) {
  TopClusters top;
  if (labeling.sizes.empty()) return top;
  top.largest_id = labeling.order[0];
  top.largest_size = labeling.sizes[labeling.order[0]];
  if (labeling.sizes.size() >= 2) {
    top.second_size = labeling.sizes[labeling.order[1]];
    top.largest_unique = top.largest_size > top.second_size;
  } else {
    top.second_size = 0;
    top.largest_unique = true;
  }
  return top;
}

std::uint32_t cluster_of(const ClusterLabeling& labeling, std::size_t point_index) {
  if (point_index >= labeling.component_of.size()) {
    throw std::out_of_range("cluster_of: point index out of range");
  }
  return labeling.component_of[point_index];
}

void dump_labeling_csv(const PointSet& points, const ClusterLabeling& labeling,
                       std::ostream& out) {
  if (labeling.num_points() != points.size()) {
    throw std::invalid_argument("dump_labeling_csv: labeling/point count mismatch");
  }
  out << "index";
  for (int a = 0; a < points.dim(); ++a) out << ",x" << a;
  out << ",component\n";
  char buf[40];
  for (std::size_t i = 0; i < points.size(); ++i) {
    out << i;
    for (double c : points.point(i)) {
      std::snprintf(buf, sizeof(buf), "%.17g", c);
      out << ',' << buf;
    }
    out << ',' << labeling.component_of[i] << '\n';
  }
}

UpperAdjacency build_upper_adjacency(const PointSet& points, double r, const GridIndex& grid) {
  validate_clustering_input(points, r, grid);
  const double r2 = r * r;
  const std::size_t n = points.size();
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  scan_candidate_pairs(points, grid, [&](std::uint32_t i, std::uint32_t j) {
    if (squared_distance(points.point(i), points.point(j)) < r2) edges.emplace_back(i, j);
  });
  UpperAdjacency adj;
  adj.offsets.assign(n + 1, 0);
  for (const auto& e : edges) ++adj.offsets[e.first + 1];
  for (std::size_t i = 0; i < n; ++i) adj.offsets[i + 1] += adj.offsets[i];
  adj.neighbors.resize(edges.size());
  std::vector<std::uint32_t> cursor(adj.offsets.begin(), adj.offsets.end() - 1);
  for (const auto& e : edges) adj.neighbors[cursor[e.first]++] = e.second;
  return adj;
}

}  // namespace perc
