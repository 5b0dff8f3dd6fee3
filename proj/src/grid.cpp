#include "perc/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace perc {

namespace {
// Above this many cells the dense CSR layout would waste memory on mostly
// empty space (huge box, sparse points); fall back to hashed buckets.
constexpr std::size_t kDenseCellLimit = std::size_t{1} << 26;
}  // namespace

std::size_t GridIndex::CellKeyHash::operator()(const std::vector<std::int64_t>& key) const {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (std::int64_t v : key) {
    h ^= static_cast<std::size_t>(v);
    h *= 0x100000001b3ULL;
    h ^= h >> 29;
  }
  return h;
}

GridIndex::GridIndex(const PointSet& points, double r) : dim_(points.dim()), cell_(r) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw std::invalid_argument("GridIndex: r must be positive and finite");
  }
  const Box& box = points.box();
  origin_ = box.lower();
  counts_.resize(static_cast<std::size_t>(dim_));
  std::size_t total = 1;
  bool overflow = false;
  for (int a = 0; a < dim_; ++a) {
    counts_[static_cast<std::size_t>(a)] =
        static_cast<std::int64_t>(std::floor(box.extent(a) / cell_)) + 1;
    const auto c = static_cast<std::size_t>(counts_[static_cast<std::size_t>(a)]);
    if (total > kDenseCellLimit / c) overflow = true;
    total *= c;
  }
  dense_ = !overflow && total <= kDenseCellLimit;

  const std::size_t n = points.size();
  std::vector<std::int64_t> cell(static_cast<std::size_t>(dim_));
  if (dense_) {
    strides_.resize(static_cast<std::size_t>(dim_));
    std::size_t stride = 1;
    for (int a = dim_ - 1; a >= 0; --a) {
      strides_[static_cast<std::size_t>(a)] = stride;
      stride *= static_cast<std::size_t>(counts_[static_cast<std::size_t>(a)]);
    }
    offsets_.assign(total + 1, 0);
    // Counting sort of points by linearized cell.
    std::vector<std::size_t> lin(n);
    for (std::size_t i = 0; i < n; ++i) {
      cell_of(points.point(i), cell.data());
      lin[i] = linear_index(cell.data());
      ++offsets_[lin[i] + 1];
    }
    for (std::size_t c = 0; c < total; ++c) offsets_[c + 1] += offsets_[c];
    indices_.resize(n);
    std::vector<std::uint32_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (std::size_t i = 0; i < n; ++i) {
      indices_[cursor[lin[i]]++] = static_cast<std::uint32_t>(i);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      cell_of(points.point(i), cell.data());
      map_[cell].push_back(static_cast<std::uint32_t>(i));
    }
  }
}

void GridIndex::cell_of(std::span<const double> point, std::int64_t* out) const {
  for (int a = 0; a < dim_; ++a) {
    auto c = static_cast<std::int64_t>(
        std::floor((point[static_cast<std::size_t>(a)] - origin_[static_cast<std::size_t>(a)]) / cell_));
    // A point exactly on the box's upper face belongs to the last cell.
    if (c < 0) c = 0;
    if (c > cell_max(a)) c = cell_max(a);
    out[a] = c;
  }
}

std::size_t GridIndex::linear_index(const std::int64_t* cell) const {
  std::size_t lin = 0;
  for (int a = 0; a < dim_; ++a) {
    lin += static_cast<std::size_t>(cell[a]) * strides_[static_cast<std::size_t>(a)];
  }
  return lin;
}

std::span<const std::uint32_t> GridIndex::bucket(std::span<const std::int64_t> cell) const {
  for (int a = 0; a < dim_; ++a) {
    if (cell[static_cast<std::size_t>(a)] < 0 || cell[static_cast<std::size_t>(a)] > cell_max(a)) {
      return {};
    }
  }
  if (dense_) {
    const std::size_t lin = linear_index(cell.data());
    return {indices_.data() + offsets_[lin], offsets_[lin + 1] - offsets_[lin]};
  }
  auto it = map_.find(std::vector<std::int64_t>(cell.begin(), cell.end()));
  if (it == map_.end()) return {};
  return {it->second.data(), it->second.size()};
}

std::span<const std::uint32_t> GridIndex::dense_linear_range(std::size_t lin_lo,
                                                             std::size_t lin_hi) const {
  return {indices_.data() + offsets_[lin_lo], offsets_[lin_hi + 1] - offsets_[lin_lo]};
}

std::size_t GridIndex::nonempty_bucket_count() const {
  if (!dense_) return map_.size();
  std::size_t count = 0;
  for (std::size_t c = 0; c + 1 < offsets_.size(); ++c) {
    if (offsets_[c + 1] > offsets_[c]) ++count;
  }
  return count;
}

void GridIndex::for_points_in_cell_range(const std::int64_t* lo, const std::int64_t* hi,
                                         const std::function<void(std::uint32_t)>& fn) const {
  std::vector<std::int64_t> clo(static_cast<std::size_t>(dim_));
  std::vector<std::int64_t> chi(static_cast<std::size_t>(dim_));
  for (int a = 0; a < dim_; ++a) {
    clo[static_cast<std::size_t>(a)] = std::max<std::int64_t>(lo[a], 0);
    chi[static_cast<std::size_t>(a)] = std::min<std::int64_t>(hi[a], cell_max(a));
    if (clo[static_cast<std::size_t>(a)] > chi[static_cast<std::size_t>(a)]) return;
  }
  if (dense_) {
    // Walk odometer-style over all axes but the last; the last axis is a
    // contiguous run of cells in the CSR layout.
    std::vector<std::int64_t> cur(clo);
    const auto last = static_cast<std::size_t>(dim_ - 1);
    for (;;) {
      std::size_t base = 0;
      for (int a = 0; a + 1 < dim_; ++a) {
        base += static_cast<std::size_t>(cur[static_cast<std::size_t>(a)]) *
                strides_[static_cast<std::size_t>(a)];
      }
      const std::size_t lin_lo = base + static_cast<std::size_t>(clo[last]);
      const std::size_t lin_hi = base + static_cast<std::size_t>(chi[last]);
      for (std::uint32_t idx : dense_linear_range(lin_lo, lin_hi)) fn(idx);
      int a = dim_ - 2;
      for (; a >= 0; --a) {
        if (++cur[static_cast<std::size_t>(a)] <= chi[static_cast<std::size_t>(a)]) break;
        cur[static_cast<std::size_t>(a)] = clo[static_cast<std::size_t>(a)];
      }
      if (a < 0) break;
    }
  } else {
    for (const auto& [cell, pts] : map_) {
      bool inside = true;
      for (int a = 0; a < dim_; ++a) {
        if (cell[static_cast<std::size_t>(a)] < clo[static_cast<std::size_t>(a)] ||
            cell[static_cast<std::size_t>(a)] > chi[static_cast<std::size_t>(a)]) {
          inside = false;
          break;
        }
      }
      if (!inside) continue;
      for (std::uint32_t idx : pts) fn(idx);
    }
  }
}

void GridIndex::for_each_bucket(
    const std::function<void(std::span<const std::int64_t>, std::span<const std::uint32_t>)>& fn)
    const {
  if (dense_) {
    std::vector<std::int64_t> cell(static_cast<std::size_t>(dim_), 0);
    const std::size_t total = offsets_.size() - 1;
    for (std::size_t lin = 0; lin < total; ++lin) {
      if (offsets_[lin + 1] > offsets_[lin]) {
        std::size_t rem = lin;
        for (int a = 0; a < dim_; ++a) {
          cell[static_cast<std::size_t>(a)] =
              static_cast<std::int64_t>(rem / strides_[static_cast<std::size_t>(a)]);
          rem %= strides_[static_cast<std::size_t>(a)];
        }
        fn(cell, {indices_.data() + offsets_[lin], offsets_[lin + 1] - offsets_[lin]});
      }
    }
  } else {
    for (const auto& [cell, pts] : map_) {
      fn(cell, {pts.data(), pts.size()});
    }
  }
}

GridIndex build_grid(const PointSet& points, double r) { return GridIndex(points, r); }

}  // namespace perc
