#include "perc/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "perc/clusters.hpp"
#include "perc/local_score.hpp"
#include "perc/oracle.hpp"

namespace perc {

void ExperimentConfig::validate() const {
  if (m < 2) throw std::invalid_argument("config: m must be >= 2");
  if (!(n > 1.0) || !std::isfinite(n)) throw std::invalid_argument("config: n must exceed 1");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("config: lambda must be positive");
  }
  if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("config: r must be positive");
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw std::invalid_argument("config: theta must be positive");
  }
  if (reps == 0) throw std::invalid_argument("config: reps must be positive");
  if (compute_e3 && !compute_local) {
    throw std::invalid_argument("config: compute_e3 requires compute_local");
  }
  if (!(max_expected_points > 0.0)) {
    throw std::invalid_argument("config: max_expected_points must be positive");
  }
  if (expected_points() > max_expected_points) {
    throw std::invalid_argument(
        "config: expected point count lambda*n^m exceeds the resource cap; raise "
        "max_expected_points to override");
  }
}

double ExperimentConfig::expected_points() const {
  return lambda * std::pow(n, m);
}

std::uint32_t ExperimentConfig::effective_parallelism() const {
  if (parallelism > 0) return parallelism;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

namespace {

// Explicit cap for opt-in oracle reruns; beyond this the quadratic reference
// implementations are unreasonably slow even for debugging.
constexpr std::size_t kOracleCheckMaxPoints = 20000;

void cross_check_with_oracle(const ExperimentConfig& config, const PointSet& points,
                             const ClusterLabeling& labeling,
                             const std::optional<std::uint64_t>& n_prime) {
  const OraclePartition expected = naive_clusters(points, config.r, kOracleCheckMaxPoints);
  if (!(expected == partition_from_labeling(labeling))) {
    throw std::runtime_error("oracle check failed: clustering partition mismatch");
  }
  if (n_prime) {
    const std::uint64_t expected_local =
        naive_localized_total(points, config.theta, config.r, kOracleCheckMaxPoints);
    if (expected_local != *n_prime) {
      throw std::runtime_error("oracle check failed: localized total mismatch");
    }
  }
}

ReplicationRecord run_one(const ExperimentConfig& config, const Box& box, std::uint64_t rep) {
  const auto t0 = std::chrono::steady_clock::now();
  RngStream rng = derive_stream(config.master_seed, rep);
  const PointSet points = sample_poisson(box, config.lambda, rng);

  ReplicationRecord rec;
  rec.rep_id = rep;
  rec.stream_index = rep;
  rec.point_count = points.size();

  if (config.compute_local && !points.empty()) {
    // The scorer already builds the grid and labeling; reuse them for N.
    WindowScorer scorer(points, config.theta, config.r);
    const TopClusters& top = scorer.top();
    rec.largest_size = top.largest_size;
    rec.second_size = top.second_size;
    rec.global_unique = top.largest_unique;
    const CouplingReport report = localized_total(scorer, {.threads = 1});
    LocalObservables local;
    local.n_prime = report.n_local;
    local.mismatch_count = report.mismatch_count;
    local.e0_count = report.e0_count;
    local.e1_count = report.e1_count;
    local.e2_count = report.e2_count;
    if (config.compute_e3) local.e3_count = report.e3_count;
    rec.local = local;
    if (config.oracle_check) {
      cross_check_with_oracle(config, points, scorer.labeling(), local.n_prime);
    }
  } else {
    const ClusterLabeling labeling = find_clusters(points, config.r);
    const TopClusters top = top_clusters(labeling);
    rec.largest_size = top.largest_size;
    rec.second_size = top.second_size;
    rec.global_unique = top.largest_unique;
    if (config.compute_local) {
      // Empty configuration: every localized count is zero.
      LocalObservables local;
      if (config.compute_e3) local.e3_count = 0;
      rec.local = local;
    }
    if (config.oracle_check) {
      cross_check_with_oracle(config, points, labeling, std::nullopt);
    }
  }

  const auto t1 = std::chrono::steady_clock::now();
  rec.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return rec;
}

}  // namespace

std::vector<ReplicationRecord> run_experiment(const ExperimentConfig& config) {
  config.validate();
  const Box box = config.box();
  std::vector<ReplicationRecord> records(config.reps);

  const std::uint32_t workers =
      static_cast<std::uint32_t>(std::min<std::uint64_t>(config.effective_parallelism(), config.reps));
  if (workers <= 1) {
    for (std::uint64_t rep = 0; rep < config.reps; ++rep) {
      records[rep] = run_one(config, box, rep);
    }
    return records;
  }

  std::atomic<std::uint64_t> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  pool.reserve(workers);
  for (std::uint32_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (;;) {
          const std::uint64_t rep = next.fetch_add(1);
          if (rep >= config.reps) return;
          records[rep] = run_one(config, box, rep);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
  return records;
}

LadderResult run_ladder(const ExperimentConfig& base, const std::vector<double>& n_values,
                        ThetaRule rule) {
  if (n_values.size() < 3) {
    throw std::invalid_argument("run_ladder: need at least 3 n values");
  }
  LadderResult result;
  result.n_values = n_values;

  std::vector<std::pair<double, std::vector<ReplicationRecord>>> records_by_n;
  for (double n : n_values) {
    ExperimentConfig config = base;
    config.n = n;
    if (rule == ThetaRule::ln_proportional) {
      config.theta = base.theta * std::log(n) / std::log(n_values.front());
    }
    result.theta_values.push_back(config.theta);
    auto records = run_experiment(config);
    result.summaries.push_back(summarize(records, config));
    records_by_n.emplace_back(n, std::move(records));
  }

  std::vector<std::pair<double, double>> global_points;
  std::vector<std::pair<double, double>> local_points;
  for (const auto& s : result.summaries) {
    if (s.dk_global && *s.dk_global > 0.0) global_points.emplace_back(s.n, *s.dk_global);
    if (s.dk_local && *s.dk_local > 0.0) local_points.emplace_back(s.n, *s.dk_local);
  }
  if (global_points.size() >= 3) result.fit_global = rate_fit(global_points);
  if (local_points.size() >= 3) result.fit_local = rate_fit(local_points);
  if (records_by_n.size() >= 2) {
    result.second_scaling = second_largest_scaling(records_by_n, base.m);
  }
  return result;
}

std::vector<ThetaCalibrationRow> calibrate_theta(const ExperimentConfig& config,
                                                 const std::vector<double>& theta_values) {
  if (theta_values.size() < 2) {
    throw std::invalid_argument("calibrate_theta: need at least 2 theta values");
  }
  ExperimentConfig probe = config;
  probe.compute_local = true;

  std::vector<ThetaCalibrationRow> rows;
  std::vector<std::uint64_t> point_hashes;  // per rep, from the first theta
  for (std::size_t t = 0; t < theta_values.size(); ++t) {
    ExperimentConfig c = probe;
    c.theta = theta_values[t];
    c.validate();
    // Paired-seed check: rerun the sampler exactly as run_experiment does and
    // confirm each replication consumes the identical point set.
    const Box box = c.box();
    for (std::uint64_t rep = 0; rep < c.reps; ++rep) {
      RngStream rng = derive_stream(c.master_seed, rep);
      const std::uint64_t h = sample_poisson(box, c.lambda, rng).coord_hash();
      if (t == 0) {
        point_hashes.push_back(h);
      } else if (point_hashes[rep] != h) {
        throw std::logic_error("calibrate_theta: paired-seed point sets diverged");
      }
    }

    const auto records = run_experiment(c);
    ThetaCalibrationRow row;
    row.theta = c.theta;
    std::uint64_t mismatched = 0;
    std::uint64_t with_ties = 0;
    double wall = 0.0;
    for (const auto& rec : records) {
      if (rec.local->n_prime != rec.largest_size) ++mismatched;
      if (rec.local->e0_count > 0) ++with_ties;
      wall += rec.wall_ms;
    }
    row.mismatch_frac = static_cast<double>(mismatched) / static_cast<double>(records.size());
    row.e0_frac = static_cast<double>(with_ties) / static_cast<double>(records.size());
    row.mean_wall_ms = wall / static_cast<double>(records.size());
    rows.push_back(row);
  }
  return rows;
}

}  // namespace perc
