#pragma once

#include <cstdint>
#include <vector>

#include "perc/clusters.hpp"
#include "perc/point_process.hpp"

namespace perc {

// Reference partition: blocks of point indices, each block ascending, blocks
// ordered by their smallest element.
struct OraclePartition {
  std::vector<std::vector<std::uint32_t>> blocks;

  bool operator==(const OraclePartition&) const = default;
};

// Guard against accidentally running the quadratic reference paths on
// production-sized inputs; callers that mean it can raise the cap.
inline constexpr std::size_t kOracleDefaultMaxPoints = 2000;

// All-pairs transitive closure of the strict ||x - y|| < r relation.
OraclePartition naive_clusters(const PointSet& points, double r,
                               std::size_t max_points = kOracleDefaultMaxPoints);

// Localized-score total recomputed from scratch: for every point, collect the
// points of its clipped window and cluster them all-pairs.
std::uint64_t naive_localized_total(const PointSet& points, double theta, double r,
                                    std::size_t max_points = kOracleDefaultMaxPoints);

// Canonical partition view of a labeling, for oracle comparisons.
OraclePartition partition_from_labeling(const ClusterLabeling& labeling);

}  // namespace perc
