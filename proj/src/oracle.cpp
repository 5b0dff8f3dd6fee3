#include "perc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "perc/local_score.hpp"

namespace perc {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    d2 += d * d;
  }
  return d2;
}

void check_oracle_size(std::size_t n, std::size_t max_points, const char* what) {
  if (n > max_points) {
    throw std::invalid_argument(std::string(what) + ": input exceeds the oracle size cap");
  }
}

OraclePartition partition_from_roots(std::size_t n, UnionFind& uf) {
  std::map<std::uint32_t, std::vector<std::uint32_t>> by_root;
  for (std::size_t i = 0; i < n; ++i) {
    by_root[uf.find(static_cast<std::uint32_t>(i))].push_back(static_cast<std::uint32_t>(i));
  }
  OraclePartition out;
  out.blocks.reserve(by_root.size());
  for (auto& [root, block] : by_root) out.blocks.push_back(std::move(block));
  std::sort(out.blocks.begin(), out.blocks.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return out;
}

// All-pairs union of indices drawn from `subset` (or all points if empty).
void union_all_pairs(const PointSet& points, const std::vector<std::uint32_t>& subset, double r,
                     UnionFind& uf) {
  const double r2 = r * r;
  for (std::size_t a = 0; a < subset.size(); ++a) {
    for (std::size_t b = a + 1; b < subset.size(); ++b) {
      if (squared_distance(points.point(subset[a]), points.point(subset[b])) < r2) {
        uf.unite(static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b));
      }
    }
  }
}

}  // namespace

OraclePartition naive_clusters(const PointSet& points, double r, std::size_t max_points) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw std::invalid_argument("naive_clusters: r must be positive and finite");
  }
  check_oracle_size(points.size(), max_points, "naive_clusters");
  const std::size_t n = points.size();
  const double r2 = r * r;
  UnionFind uf;
  uf.reset(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (squared_distance(points.point(i), points.point(j)) < r2) {
        uf.unite(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
      }
    }
  }
  return partition_from_roots(n, uf);
}

std::uint64_t naive_localized_total(const PointSet& points, double theta, double r,
                                    std::size_t max_points) {
  check_oracle_size(points.size(), max_points, "naive_localized_total");
  if (points.empty()) return 0;
  const int m = points.dim();
  const double he = window_half_edge(theta, points.box().edge(), m);
  const std::size_t n = points.size();

  std::uint64_t total = 0;
  std::vector<std::uint32_t> window_pts;
  UnionFind uf;
  for (std::size_t x = 0; x < n; ++x) {
    const auto xc = points.point(x);
    window_pts.clear();
    std::size_t x_local = 0;
    for (std::size_t p = 0; p < n; ++p) {
      const auto pc = points.point(p);
      bool inside = true;
      for (int a = 0; a < m; ++a) {
        if (std::abs(pc[static_cast<std::size_t>(a)] - xc[static_cast<std::size_t>(a)]) > he) {
          inside = false;
          break;
        }
      }
      if (inside) {
        if (p == x) x_local = window_pts.size();
        window_pts.push_back(static_cast<std::uint32_t>(p));
      }
    }
    uf.reset(window_pts.size());
    union_all_pairs(points, window_pts, r, uf);

    // Size of every local cluster; the local score is 1 iff x's cluster is
    // the unique largest.
    std::vector<std::uint32_t> size_of(window_pts.size(), 0);
    for (std::size_t i = 0; i < window_pts.size(); ++i) {
      ++size_of[uf.find(static_cast<std::uint32_t>(i))];
    }
    std::uint32_t best = 0;
    int best_count = 0;
    for (std::size_t i = 0; i < window_pts.size(); ++i) {
      if (size_of[i] > best) {
        best = size_of[i];
        best_count = 1;
      } else if (size_of[i] == best && size_of[i] > 0) {
        ++best_count;
      }
    }
    const std::uint32_t x_root = uf.find(static_cast<std::uint32_t>(x_local));
    if (best_count == 1 && size_of[x_root] == best) ++total;
  }
  return total;
}

OraclePartition partition_from_labeling(const ClusterLabeling& labeling) {
  OraclePartition out;
  out.blocks.resize(labeling.num_components());
  for (std::size_t i = 0; i < labeling.component_of.size(); ++i) {
    out.blocks[labeling.component_of[i]].push_back(static_cast<std::uint32_t>(i));
  }
  std::sort(out.blocks.begin(), out.blocks.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return out;
}

}  // namespace perc
