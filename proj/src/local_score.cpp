#include "perc/local_score.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace perc {

double window_half_edge(double theta, double box_edge, int dim) {
  if (dim < 2) throw std::invalid_argument("window_half_edge: dimension must be >= 2");
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw std::invalid_argument("window_half_edge: theta must be positive and finite");
  }
  if (!(box_edge > 1.0)) {
    throw std::invalid_argument("window_half_edge: box edge must exceed 1");
  }
  return std::pow(theta * std::log(box_edge), 1.0 / static_cast<double>(dim - 1));
}

Window make_window(std::span<const double> x, double theta, const Box& box) {
  if (!box.contains(x)) throw std::invalid_argument("make_window: point outside the box");
  const double he = window_half_edge(theta, box.edge(), box.dim());
  std::vector<double> lo(x.size());
  std::vector<double> hi(x.size());
  for (std::size_t a = 0; a < x.size(); ++a) {
    lo[a] = x[a] - he;
    hi[a] = x[a] + he;
  }
  auto clipped = Box(std::move(lo), std::move(hi)).intersect(box);
  // Non-degenerate because the center lies in the box and he > 0.
  return Window{std::vector<double>(x.begin(), x.end()), he, std::move(*clipped)};
}

WindowScorer::Scratch::Scratch(const WindowScorer& scorer) {
  const std::size_t n = scorer.points_.size();
  local_id_.resize(n);
  stamp_.assign(n, 0);
  comp_stamp_.assign(scorer.labeling_.num_components(), 0);
  comp_inside_.assign(scorer.labeling_.num_components(), 0);
}

WindowScorer::WindowScorer(const PointSet& points, double theta, double r)
    : points_(points),
      r_(r),
      half_edge_(window_half_edge(theta, points.box().edge(), points.dim())),
      grid_(points, r),
      labeling_(find_clusters(points, r, grid_)),
      top_(top_clusters(labeling_)),
      adjacency_(build_upper_adjacency(points, r, grid_)) {
  // Per-component bounding boxes decide which components need no union work
  // inside a window (fully contained ones keep their global structure).
  const int m = points.dim();
  const std::size_t k = labeling_.num_components();
  comp_bbox_.assign(k * static_cast<std::size_t>(2 * m), 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    double* bb = comp_bbox_.data() + c * static_cast<std::size_t>(2 * m);
    for (int a = 0; a < m; ++a) {
      bb[a] = std::numeric_limits<double>::infinity();
      bb[m + a] = -std::numeric_limits<double>::infinity();
    }
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto p = points.point(i);
    double* bb = comp_bbox_.data() +
                 static_cast<std::size_t>(labeling_.component_of[i]) * static_cast<std::size_t>(2 * m);
    for (int a = 0; a < m; ++a) {
      bb[a] = std::min(bb[a], p[static_cast<std::size_t>(a)]);
      bb[m + a] = std::max(bb[m + a], p[static_cast<std::size_t>(a)]);
    }
  }
}

WindowScorer::Eval WindowScorer::evaluate(std::size_t x_index, Scratch& s) const {
  if (x_index >= points_.size()) {
    throw std::out_of_range("WindowScorer: point index out of range");
  }
  const int m = points_.dim();
  const auto x = points_.point(x_index);

  if (s.epoch_ == std::numeric_limits<std::uint32_t>::max()) {
    std::fill(s.stamp_.begin(), s.stamp_.end(), 0);
    std::fill(s.comp_stamp_.begin(), s.comp_stamp_.end(), 0);
    std::fill(s.root_stamp_.begin(), s.root_stamp_.end(), 0);
    s.epoch_ = 0;
  }
  const std::uint32_t epoch = ++s.epoch_;

  std::int64_t clo[8];
  std::int64_t chi[8];
  if (m > 8) throw std::invalid_argument("WindowScorer: dimension too large");
  for (int a = 0; a < m; ++a) {
    const double lo = x[static_cast<std::size_t>(a)] - half_edge_;
    const double hi = x[static_cast<std::size_t>(a)] + half_edge_;
    const double org = points_.box().lower()[static_cast<std::size_t>(a)];
    // One extra cell per side so that rounding in the membership predicate
    // can never push an in-window point outside the scanned range.
    clo[a] = static_cast<std::int64_t>(std::floor((lo - org) / r_)) - 1;
    chi[a] = static_cast<std::int64_t>(std::floor((hi - org) / r_)) + 1;
  }

  // Streaming top-2 over local clusters: size of the largest, how many
  // clusters attain it, and the global component owning the unique largest.
  std::uint64_t max_size = 0;
  int max_count = 0;
  std::uint32_t max_owner = 0;
  std::uint64_t x_cluster_size = 0;
  auto offer = [&](std::uint64_t size, std::uint32_t owner_comp) {
    if (size > max_size) {
      max_size = size;
      max_count = 1;
      max_owner = owner_comp;
    } else if (size == max_size) {
      ++max_count;
    }
  };

  // Phase 1: collect window points. Components whose bounding box lies inside
  // the window enter as whole clusters; points of clipped components form the
  // active set that gets re-clustered.
  s.active_.clear();
  const std::uint32_t x_comp = labeling_.component_of[x_index];
  grid_.for_points_in_cell_range(clo, chi, [&](std::uint32_t p) {
    const auto pc = points_.point(p);
    // Closed membership |p - x| <= half_edge, evaluated exactly as in the
    // reference recomputation.
    for (int a = 0; a < m; ++a) {
      if (std::abs(pc[static_cast<std::size_t>(a)] - x[static_cast<std::size_t>(a)]) > half_edge_) {
        return;
      }
    }
    const std::uint32_t c = labeling_.component_of[p];
    if (s.comp_stamp_[c] != epoch) {
      s.comp_stamp_[c] = epoch;
      // A component lies fully inside the window iff its extreme coordinates
      // do, using the same subtraction forms as the per-point predicate.
      const double* bb = comp_bbox_.data() + static_cast<std::size_t>(c) * static_cast<std::size_t>(2 * m);
      bool inside = true;
      for (int a = 0; a < m; ++a) {
        if (x[static_cast<std::size_t>(a)] - bb[a] > half_edge_ ||
            bb[m + a] - x[static_cast<std::size_t>(a)] > half_edge_) {
          inside = false;
          break;
        }
      }
      s.comp_inside_[c] = inside ? 1 : 0;
      if (inside) offer(labeling_.sizes[c], c);
    }
    if (!s.comp_inside_[c]) {
      s.local_id_[p] = static_cast<std::uint32_t>(s.active_.size());
      s.stamp_[p] = epoch;
      s.active_.push_back(p);
    }
  });

  // Phase 2: union active points along precomputed radius-r edges whose other
  // endpoint is also in the window.
  s.uf_.reset(s.active_.size());
  for (std::uint32_t li = 0; li < s.active_.size(); ++li) {
    const std::uint32_t p = s.active_[li];
    for (std::uint32_t q : adjacency_.row(p)) {
      if (s.stamp_[q] == epoch) s.uf_.unite(li, s.local_id_[q]);
    }
  }

  // Phase 3: sizes of the clipped pieces.
  if (s.root_stamp_.size() < s.active_.size()) s.root_stamp_.resize(s.active_.size(), 0);
  for (std::uint32_t li = 0; li < s.active_.size(); ++li) {
    const std::uint32_t root = s.uf_.find(li);
    if (s.root_stamp_[root] != epoch) {
      s.root_stamp_[root] = epoch;
      offer(s.uf_.size_of_root(root), labeling_.component_of[s.active_[root]]);
    }
  }

  if (s.comp_inside_[x_comp] && s.comp_stamp_[x_comp] == epoch) {
    x_cluster_size = labeling_.sizes[x_comp];
  } else {
    x_cluster_size = s.uf_.size_of_root(s.uf_.find(s.local_id_[x_index]));
  }

  Eval eval;
  eval.local_largest_size = max_size;
  const bool local_unique = (max_count == 1);
  const bool xi = top_.largest_unique && top_.largest_id && x_comp == *top_.largest_id;
  const bool xi_prime = local_unique && x_cluster_size == max_size;
  eval.pair.global_bit = xi;
  eval.pair.local_bit = xi_prime;
  if (!local_unique) {
    eval.pair.event = CouplingEvent::e0_local_tie;
  } else if (xi && !xi_prime) {
    eval.pair.event = CouplingEvent::e1_global_only;
  } else if (!xi && xi_prime) {
    eval.pair.event = CouplingEvent::e2_local_only;
  } else {
    eval.pair.event = CouplingEvent::agree;
  }

  // A local cluster is a subset of exactly one global component, and distinct
  // global components are at distance >= r, so the local largest is
  // disconnected from the global largest iff it belongs to a different
  // component.
  if (!local_unique || !top_.largest_unique || !top_.largest_id) {
    eval.e3 = E3Class::unclassifiable;
  } else {
    eval.e3 = (max_owner == *top_.largest_id) ? E3Class::connected : E3Class::disconnected;
  }
  return eval;
}

namespace {

void validate_index(const PointSet& points, std::size_t x_index) {
  if (x_index >= points.size()) {
    throw std::out_of_range("local_score: point index out of range");
  }
}

}  // namespace

ScorePair local_score(const PointSet& points, std::size_t x_index, double theta, double r) {
  validate_index(points, x_index);
  WindowScorer scorer(points, theta, r);
  WindowScorer::Scratch scratch(scorer);
  return scorer.evaluate(x_index, scratch).pair;
}

E3Class classify_e3(const PointSet& points, std::size_t x_index, double theta, double r) {
  validate_index(points, x_index);
  WindowScorer scorer(points, theta, r);
  WindowScorer::Scratch scratch(scorer);
  return scorer.evaluate(x_index, scratch).e3;
}

CouplingReport localized_total(const PointSet& points, double theta, double r,
                               const LocalScoreOptions& options) {
  if (points.empty()) {
    window_half_edge(theta, points.box().edge(), points.dim());  // still validate arguments
    return {};
  }
  WindowScorer scorer(points, theta, r);
  return localized_total(scorer, options);
}

CouplingReport localized_total(const WindowScorer& scorer, const LocalScoreOptions& options) {
  const std::size_t n = scorer.points().size();
  int threads = options.threads;
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  threads = std::min<int>(threads, static_cast<int>(n) > 0 ? static_cast<int>(n) : 1);

  auto run_range = [&](std::size_t lo, std::size_t hi, CouplingReport& out) {
    WindowScorer::Scratch scratch(scorer);
    for (std::size_t i = lo; i < hi; ++i) {
      const auto eval = scorer.evaluate(i, scratch);
      out.n_global += eval.pair.global_bit ? 1 : 0;
      out.n_local += eval.pair.local_bit ? 1 : 0;
      out.mismatch_count += (eval.pair.global_bit != eval.pair.local_bit) ? 1 : 0;
      switch (eval.pair.event) {
        case CouplingEvent::agree:
          break;
        case CouplingEvent::e0_local_tie:
          ++out.e0_count;
          break;
        case CouplingEvent::e1_global_only:
          ++out.e1_count;
          break;
        case CouplingEvent::e2_local_only:
          ++out.e2_count;
          break;
      }
      if (eval.e3 == E3Class::disconnected) ++out.e3_count;
    }
  };

  if (threads == 1) {
    CouplingReport report;
    run_range(0, n, report);
    return report;
  }

  std::vector<CouplingReport> partial(static_cast<std::size_t>(threads));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  const std::size_t chunk = (n + static_cast<std::size_t>(threads) - 1) / static_cast<std::size_t>(threads);
  for (int t = 0; t < threads; ++t) {
    const std::size_t lo = static_cast<std::size_t>(t) * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi, t] { run_range(lo, hi, partial[static_cast<std::size_t>(t)]); });
  }
  for (auto& th : pool) th.join();

  CouplingReport report;
  for (const auto& p : partial) {
    report.n_global += p.n_global;
    report.n_local += p.n_local;
    report.mismatch_count += p.mismatch_count;
    report.e0_count += p.e0_count;
    report.e1_count += p.e1_count;
    report.e2_count += p.e2_count;
    report.e3_count += p.e3_count;
  }
  return report;
}

}  // namespace perc
