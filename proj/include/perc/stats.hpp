#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "perc/records.hpp"

namespace perc {

// Standard normal CDF, absolute error below 1e-12.
double normal_cdf(double z);

// Exact sup-distance between the sample ECDF and the standard normal CDF,
// evaluated on both sides of every jump. With standardize, samples are first
// shifted and scaled by the sample mean and the unbiased sample standard
// deviation (a Lilliefors-type statistic: a raw distance, not a test).
double kolmogorov_distance(std::vector<double> samples, bool standardize);

// Cross-replication estimators for one (m, n) experiment.
struct SummarySet {
  int m = 0;
  double n = 0.0;
  std::uint64_t reps = 0;

  double mean_N = 0.0;
  double var_N = 0.0;       // unbiased sample variance of N
  double sigma2_hat = 0.0;  // var_N / n^m
  double rho_hat = 0.0;     // mean_N / n^m, estimates the largest-cluster density
  double second_mean = 0.0;

  std::optional<double> dk_global;      // absent when var_N == 0
  std::optional<double> dk_local;       // absent without local scores or when degenerate
  std::optional<double> mismatch_frac;  // fraction of reps with N' != N

  double se_mean_N = 0.0;
  double se_var_N = 0.0;
  double se_sigma2_hat = 0.0;
  double se_rho_hat = 0.0;
  double se_second_mean = 0.0;
  std::optional<double> se_dk_global;
  std::optional<double> se_dk_local;
  std::optional<double> se_mismatch_frac;

  bool zero_variance_global = false;
  bool zero_variance_local = false;
};

SummarySet summarize(const std::vector<ReplicationRecord>& records,
                     const ExperimentConfig& config);

// Ordinary least squares of ln(dk) on ln(n).
struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::vector<std::pair<double, double>> points;  // (ln n, ln dk)
};

RateFit rate_fit(const std::vector<std::pair<double, double>>& n_dk);

// Mean second-largest size normalized by (ln n)^(m/(m-1)), per ladder rung.
struct ScalingRow {
  double n = 0.0;
  double ratio = 0.0;
};

struct SecondScaling {
  std::vector<ScalingRow> rows;
  bool bounded_ratio = false;  // max/min of the ratios <= 4
};

SecondScaling second_largest_scaling(
    const std::vector<std::pair<double, std::vector<ReplicationRecord>>>& records_by_n, int m);

}  // namespace perc
