#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "perc/clusters.hpp"
#include "perc/grid.hpp"
#include "perc/point_process.hpp"

namespace perc {

// Half the edge length of the unclipped score window: (theta * ln(edge))^(1/(m-1)).
double window_half_edge(double theta, double box_edge, int dim);

// The axis-aligned score window of a point: a cube of half-edge
// window_half_edge(...) around the point, clipped to the observation box.
// Membership is closed: boundary points belong to the window.
struct Window {
  std::vector<double> center;
  double half_edge;
  Box clipped;
};

Window make_window(std::span<const double> x, double theta, const Box& box);

// Per-point coupling outcome between the global score (point lies in the
// unique globally largest cluster) and the localized score (point's cluster
// within its window is the unique largest there).
enum class CouplingEvent : std::uint8_t {
  agree,           // scores equal and the local largest is unique
  e0_local_tie,    // local largest not unique (local score forced to 0)
  e1_global_only,  // global score 1, local score 0
  e2_local_only,   // global score 0, local score 1
};

struct ScorePair {
  bool global_bit = false;
  bool local_bit = false;
  CouplingEvent event = CouplingEvent::agree;
};

// Whether the local largest cluster is disconnected (distance >= r) from the
// global largest. Unclassifiable when either largest is not unique.
enum class E3Class : std::uint8_t { connected, disconnected, unclassifiable };

struct CouplingReport {
  std::uint64_t n_global = 0;  // sum of global scores
  std::uint64_t n_local = 0;   // sum of localized scores
  std::uint64_t mismatch_count = 0;
  std::uint64_t e0_count = 0;
  std::uint64_t e1_count = 0;
  std::uint64_t e2_count = 0;
  std::uint64_t e3_count = 0;  // disconnected local largests among non-tie points
};

// Evaluates score windows against a fixed configuration. The global labeling,
// grid, adjacency and per-component bounding boxes are built once; each
// window is then clustered from the grid restricted to its cells, skipping
// union work for components that lie entirely inside the window.
class WindowScorer {
 public:
  WindowScorer(const PointSet& points, double theta, double r);

  struct Eval {
    ScorePair pair;
    E3Class e3 = E3Class::unclassifiable;
    std::uint64_t local_largest_size = 0;
  };

  // Per-thread mutable state; evaluate() on distinct Scratch objects is safe
  // to run concurrently.
  class Scratch {
   public:
    explicit Scratch(const WindowScorer& scorer);

   private:
    friend class WindowScorer;
    std::vector<std::uint32_t> active_;     // window points needing union work
    std::vector<std::uint32_t> local_id_;   // global index -> active slot
    std::vector<std::uint32_t> stamp_;      // epoch mark per global index
    std::vector<std::uint32_t> comp_stamp_; // epoch mark per component
    std::vector<std::uint8_t> comp_inside_; // component fully inside window
    std::vector<std::uint32_t> root_stamp_; // epoch mark per active slot
    UnionFind uf_;
    std::uint32_t epoch_ = 0;
  };

  Eval evaluate(std::size_t x_index, Scratch& scratch) const;

  const ClusterLabeling& labeling() const { return labeling_; }
  const TopClusters& top() const { return top_; }
  const GridIndex& grid() const { return grid_; }
  const PointSet& points() const { return points_; }
  double half_edge() const { return half_edge_; }

 private:
  const PointSet& points_;
  double r_;
  double half_edge_;
  GridIndex grid_;
  ClusterLabeling labeling_;
  TopClusters top_;
  UpperAdjacency adjacency_;
  std::vector<double> comp_bbox_;  // per component: dim mins then dim maxs
};

struct LocalScoreOptions {
  int threads = 1;  // <= 0 means hardware concurrency
};

// One-off per-point operations (each builds a fresh WindowScorer).
ScorePair local_score(const PointSet& points, std::size_t x_index, double theta, double r);
E3Class classify_e3(const PointSet& points, std::size_t x_index, double theta, double r);

// Aggregate over every point of the configuration. Output is independent of
// the thread count.
CouplingReport localized_total(const PointSet& points, double theta, double r,
                               const LocalScoreOptions& options = {});
CouplingReport localized_total(const WindowScorer& scorer, const LocalScoreOptions& options = {});

}  // namespace perc
