#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "perc/records.hpp"
#include "perc/stats.hpp"

namespace perc {

// Runs config.reps independent replications. Record i is computed from
// stream i of the master seed, so the output is identical for any degree of
// parallelism (wall_ms excepted).
std::vector<ReplicationRecord> run_experiment(const ExperimentConfig& config);

// How theta evolves along an n ladder.
enum class ThetaRule {
  fixed,            // theta(n) = base theta
  ln_proportional,  // theta(n) = base theta * ln n / ln n_first
};

struct LadderResult {
  std::vector<double> n_values;
  std::vector<double> theta_values;
  std::vector<SummarySet> summaries;
  std::optional<RateFit> fit_global;
  std::optional<RateFit> fit_local;
  std::optional<SecondScaling> second_scaling;
};

LadderResult run_ladder(const ExperimentConfig& base, const std::vector<double>& n_values,
                        ThetaRule rule);

struct ThetaCalibrationRow {
  double theta = 0.0;
  double mismatch_frac = 0.0;
  double e0_frac = 0.0;  // fraction of reps with at least one local tie
  double mean_wall_ms = 0.0;
};

// Paired comparison: every theta reuses the same per-replication streams, so
// replication i sees the identical point set at each theta (checked by
// hashing the coordinates).
std::vector<ThetaCalibrationRow> calibrate_theta(const ExperimentConfig& config,
                                                 const std::vector<double>& theta_values);

}  // namespace perc
