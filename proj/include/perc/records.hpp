#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "perc/point_process.hpp"

namespace perc {

// Full input of one experiment.
struct ExperimentConfig {
  int m = 2;                  // dimension, >= 2
  double n = 40.0;            // box edge, > 1
  double lambda = 2.0;        // intensity, > 0
  double r = 1.0;             // connection radius, > 0
  double theta = 2.0;         // window scale, > 0
  std::uint64_t reps = 100;   // replication count, >= 1
  std::uint64_t master_seed = 0;
  bool compute_local = true;
  bool compute_e3 = false;
  bool oracle_check = false;
  std::uint32_t parallelism = 0;  // 0 = auto (hardware concurrency)
  double max_expected_points = 1.0e7;

  void validate() const;
  Box box() const { return Box::centered_cube(m, n); }
  double expected_points() const;
  std::uint32_t effective_parallelism() const;
};

// Localized-score observables; present only when compute_local is set.
struct LocalObservables {
  std::uint64_t n_prime = 0;
  std::uint64_t mismatch_count = 0;
  std::uint64_t e0_count = 0;
  std::uint64_t e1_count = 0;
  std::uint64_t e2_count = 0;
  std::optional<std::uint64_t> e3_count;  // present only when compute_e3
};

// Per-replication observables.
struct ReplicationRecord {
  std::uint64_t rep_id = 0;
  std::uint64_t stream_index = 0;
  std::uint64_t point_count = 0;
  std::uint64_t largest_size = 0;  // N
  std::uint64_t second_size = 0;
  bool global_unique = false;
  std::optional<LocalObservables> local;
  double wall_ms = 0.0;  // excluded from determinism guarantees
};

}  // namespace perc
