#include "perc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace perc {

double normal_cdf(double z) {
  if (std::isinf(z)) return z > 0 ? 1.0 : 0.0;
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double kolmogorov_distance(std::vector<double> samples, bool standardize) {
  const std::size_t n = samples.size();
  if (n < 2) throw std::invalid_argument("kolmogorov_distance: need at least 2 samples");
  if (standardize) {
    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : samples) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(sd > 0.0)) {
      throw std::invalid_argument("kolmogorov_distance: zero sample variance");
    }
    for (double& v : samples) v = (v - mean) / sd;
  }
  std::sort(samples.begin(), samples.end());
  double dk = 0.0;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double phi = normal_cdf(samples[i]);
    dk = std::max(dk, std::abs(static_cast<double>(i + 1) * inv_n - phi));
    dk = std::max(dk, std::abs(static_cast<double>(i) * inv_n - phi));
  }
  return dk;
}

namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;  // unbiased
  double m4 = 0.0;   // central fourth moment (plug-in)
};

Moments moments(const std::vector<double>& xs) {
  Moments mo;
  const auto r = static_cast<double>(xs.size());
  for (double v : xs) mo.mean += v;
  mo.mean /= r;
  double ss = 0.0;
  double s4 = 0.0;
  for (double v : xs) {
    const double d = v - mo.mean;
    ss += d * d;
    s4 += d * d * d * d;
  }
  mo.var = ss / (r - 1.0);
  mo.m4 = s4 / r;
  return mo;
}

// First-order sampling scale of the Kolmogorov statistic under the null;
// reported as a descriptive standard error.
double dk_standard_error(std::uint64_t reps) {
  const double pi = std::numbers::pi;
  const double ln2 = std::numbers::ln2;
  return std::sqrt(pi * pi / 12.0 - pi * ln2 * ln2 / 2.0) / std::sqrt(static_cast<double>(reps));
}

}  // namespace

SummarySet summarize(const std::vector<ReplicationRecord>& records,
                     const ExperimentConfig& config) {
  if (records.size() < 2) {
    throw std::invalid_argument("summarize: need at least 2 records");
  }
  const auto r = static_cast<double>(records.size());
  const double volume_scale = std::pow(config.n, config.m);

  SummarySet s;
  s.m = config.m;
  s.n = config.n;
  s.reps = records.size();

  std::vector<double> ns;
  std::vector<double> seconds;
  ns.reserve(records.size());
  seconds.reserve(records.size());
  for (const auto& rec : records) {
    ns.push_back(static_cast<double>(rec.largest_size));
    seconds.push_back(static_cast<double>(rec.second_size));
  }

  const Moments mn = moments(ns);
  s.mean_N = mn.mean;
  s.var_N = mn.var;
  s.sigma2_hat = s.var_N / volume_scale;
  s.rho_hat = s.mean_N / volume_scale;
  s.se_mean_N = std::sqrt(mn.var / r);
  // Plug-in standard error of the sample variance.
  const double var_of_var =
      std::max(0.0, (mn.m4 - (r - 3.0) / (r - 1.0) * mn.var * mn.var) / r);
  s.se_var_N = std::sqrt(var_of_var);
  s.se_sigma2_hat = s.se_var_N / volume_scale;
  s.se_rho_hat = s.se_mean_N / volume_scale;

  const Moments ms = moments(seconds);
  s.second_mean = ms.mean;
  s.se_second_mean = std::sqrt(ms.var / r);

  if (mn.var > 0.0) {
    s.dk_global = kolmogorov_distance(ns, true);
    s.se_dk_global = dk_standard_error(s.reps);
  } else {
    s.zero_variance_global = true;
  }

  const bool all_local = std::all_of(records.begin(), records.end(),
                                     [](const ReplicationRecord& rec) { return rec.local.has_value(); });
  if (all_local) {
    std::vector<double> primes;
    primes.reserve(records.size());
    std::uint64_t mismatched_reps = 0;
    for (const auto& rec : records) {
      primes.push_back(static_cast<double>(rec.local->n_prime));
      if (rec.local->n_prime != rec.largest_size) ++mismatched_reps;
    }
    const double p = static_cast<double>(mismatched_reps) / r;
    s.mismatch_frac = p;
    s.se_mismatch_frac = std::sqrt(p * (1.0 - p) / r);
    const Moments mp = moments(primes);
    if (mp.var > 0.0) {
      s.dk_local = kolmogorov_distance(primes, true);
      s.se_dk_local = dk_standard_error(s.reps);
    } else {
      s.zero_variance_local = true;
    }
  }
  return s;
}

RateFit rate_fit(const std::vector<std::pair<double, double>>& n_dk) {
  RateFit fit;
  for (const auto& [n, dk] : n_dk) {
    if (!(n > 1.0)) throw std::invalid_argument("rate_fit: n must exceed 1");
    if (!(dk > 0.0)) throw std::invalid_argument("rate_fit: dk must be positive");
    fit.points.emplace_back(std::log(n), std::log(dk));
  }
  std::vector<double> distinct;
  for (const auto& p : fit.points) distinct.push_back(p.first);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 3) {
    throw std::invalid_argument("rate_fit: need at least 3 distinct n values");
  }

  const auto k = static_cast<double>(fit.points.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& [x, y] : fit.points) {
    sx += x;
    sy += y;
  }
  const double mx = sx / k;
  const double my = sy / k;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [x, y] : fit.points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (const auto& [x, y] : fit.points) {
    const double e = y - (fit.intercept + fit.slope * x);
    ss_res += e * e;
  }
  fit.r2 = (syy > 0.0) ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return fit;
}

SecondScaling second_largest_scaling(
    const std::vector<std::pair<double, std::vector<ReplicationRecord>>>& records_by_n, int m) {
  if (records_by_n.size() < 2) {
    throw std::invalid_argument("second_largest_scaling: need at least 2 ladder rungs");
  }
  if (m < 2) throw std::invalid_argument("second_largest_scaling: dimension must be >= 2");
  SecondScaling out;
  const double expo = static_cast<double>(m) / static_cast<double>(m - 1);
  for (const auto& [n, records] : records_by_n) {
    if (!(n > 1.0)) throw std::invalid_argument("second_largest_scaling: n must exceed 1");
    if (records.empty()) {
      throw std::invalid_argument("second_largest_scaling: empty record list");
    }
    double mean_second = 0.0;
    for (const auto& rec : records) mean_second += static_cast<double>(rec.second_size);
    mean_second /= static_cast<double>(records.size());
    out.rows.push_back({n, mean_second / std::pow(std::log(n), expo)});
  }
  double lo = out.rows.front().ratio;
  double hi = lo;
  for (const auto& row : out.rows) {
    lo = std::min(lo, row.ratio);
    hi = std::max(hi, row.ratio);
  }
  out.bounded_ratio = lo > 0.0 && hi / lo <= 4.0;
  return out;
}

}  // namespace perc
