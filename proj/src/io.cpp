#include "perc/io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace perc {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void emit_csv(const std::vector<ReplicationRecord>& records, std::ostream& out) {
  out << kRecordsCsvHeader << '\n';
  for (const auto& rec : records) {
    out << rec.rep_id << ',' << rec.stream_index << ',' << rec.point_count << ','
        << rec.largest_size << ',' << rec.second_size << ',' << (rec.global_unique ? 1 : 0) << ',';
    if (rec.local) {
      out << rec.local->n_prime << ',' << rec.local->mismatch_count << ',' << rec.local->e0_count
          << ',' << rec.local->e1_count << ',' << rec.local->e2_count << ',';
      if (rec.local->e3_count) out << *rec.local->e3_count;
    } else {
      out << ",,,,,";
    }
    out << ',' << format_double(rec.wall_ms) << '\n';
  }
  if (!out) throw std::runtime_error("emit_csv: write failed");
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

std::uint64_t to_u64(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    const std::uint64_t v = std::stoull(s, &pos, 10);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(std::string("parse_csv: bad ") + what + " value '" + s + "'");
  }
}

double to_double(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(std::string("parse: bad ") + what + " value '" + s + "'");
  }
}

}  // namespace

std::vector<ReplicationRecord> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("parse_csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kRecordsCsvHeader) throw std::runtime_error("parse_csv: unexpected header");

  std::vector<ReplicationRecord> records;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 13) {
      throw std::runtime_error("parse_csv: expected 13 fields per row");
    }
    ReplicationRecord rec;
    rec.rep_id = to_u64(fields[0], "rep_id");
    rec.stream_index = to_u64(fields[1], "stream_index");
    rec.point_count = to_u64(fields[2], "point_count");
    rec.largest_size = to_u64(fields[3], "N");
    rec.second_size = to_u64(fields[4], "second_size");
    rec.global_unique = to_u64(fields[5], "global_unique") != 0;
    if (!fields[6].empty()) {
      LocalObservables local;
      local.n_prime = to_u64(fields[6], "N_prime");
      local.mismatch_count = to_u64(fields[7], "mismatch_count");
      local.e0_count = to_u64(fields[8], "e0_count");
      local.e1_count = to_u64(fields[9], "e1_count");
      local.e2_count = to_u64(fields[10], "e2_count");
      if (!fields[11].empty()) local.e3_count = to_u64(fields[11], "e3_count");
      rec.local = local;
    }
    rec.wall_ms = to_double(fields[12], "wall_ms");
    records.push_back(rec);
  }
  return records;
}

namespace {

nlohmann::json config_json(const ExperimentConfig& c) {
  return nlohmann::json{{"m", c.m},
                        {"n", c.n},
                        {"lambda", c.lambda},
                        {"r", c.r},
                        {"theta", c.theta},
                        {"reps", c.reps},
                        {"master_seed", c.master_seed},
                        {"compute_local", c.compute_local},
                        {"compute_e3", c.compute_e3},
                        {"oracle_check", c.oracle_check},
                        {"parallelism", c.parallelism},
                        {"max_expected_points", c.max_expected_points}};
}

nlohmann::json optional_json(const std::optional<double>& v) {
  if (v) return *v;
  return nullptr;
}

nlohmann::json summary_json(const SummarySet& s) {
  return nlohmann::json{{"m", s.m},
                        {"n", s.n},
                        {"reps", s.reps},
                        {"mean_N", s.mean_N},
                        {"var_N", s.var_N},
                        {"sigma2_hat", s.sigma2_hat},
                        {"rho_hat", s.rho_hat},
                        {"second_mean", s.second_mean},
                        {"dk_global", optional_json(s.dk_global)},
                        {"dk_local", optional_json(s.dk_local)},
                        {"mismatch_frac", optional_json(s.mismatch_frac)},
                        {"se_mean_N", s.se_mean_N},
                        {"se_var_N", s.se_var_N},
                        {"se_sigma2_hat", s.se_sigma2_hat},
                        {"se_rho_hat", s.se_rho_hat},
                        {"se_second_mean", s.se_second_mean},
                        {"se_dk_global", optional_json(s.se_dk_global)},
                        {"se_dk_local", optional_json(s.se_dk_local)},
                        {"se_mismatch_frac", optional_json(s.se_mismatch_frac)},
                        {"zero_variance_global", s.zero_variance_global},
                        {"zero_variance_local", s.zero_variance_local}};
}

nlohmann::json rate_fit_json(const RateFit& fit) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& [x, y] : fit.points) points.push_back({x, y});
  return nlohmann::json{
      {"slope", fit.slope}, {"intercept", fit.intercept}, {"r2", fit.r2}, {"points", points}};
}

void write_json(const nlohmann::json& j, std::ostream& out) {
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("emit json: write failed");
}

}  // namespace

void emit_summary_json(const SummarySet& summary, const ExperimentConfig& config,
                       std::ostream& out) {
  nlohmann::json j{{"version", kVersion},
                   {"config", config_json(config)},
                   {"summary", summary_json(summary)}};
  write_json(j, out);
}

void emit_ladder_json(const LadderResult& ladder, const ExperimentConfig& base,
                      std::ostream& out) {
  nlohmann::json j{{"version", kVersion}, {"base_config", config_json(base)}};
  j["n_values"] = ladder.n_values;
  j["theta_values"] = ladder.theta_values;
  nlohmann::json summaries = nlohmann::json::array();
  for (const auto& s : ladder.summaries) summaries.push_back(summary_json(s));
  j["summaries"] = summaries;
  j["rate_fit_global"] = ladder.fit_global ? rate_fit_json(*ladder.fit_global) : nlohmann::json();
  j["rate_fit_local"] = ladder.fit_local ? rate_fit_json(*ladder.fit_local) : nlohmann::json();
  if (ladder.second_scaling) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : ladder.second_scaling->rows) {
      rows.push_back({{"n", row.n}, {"ratio", row.ratio}});
    }
    j["second_largest_scaling"] = {{"rows", rows},
                                   {"bounded_ratio", ladder.second_scaling->bounded_ratio}};
  } else {
    j["second_largest_scaling"] = nullptr;
  }
  write_json(j, out);
}

void emit_calibration_csv(const std::vector<ThetaCalibrationRow>& rows, std::ostream& out) {
  out << "theta,mismatch_frac,e0_frac,mean_wall_ms\n";
  for (const auto& row : rows) {
    out << format_double(row.theta) << ',' << format_double(row.mismatch_frac) << ','
        << format_double(row.e0_frac) << ',' << format_double(row.mean_wall_ms) << '\n';
  }
  if (!out) throw std::runtime_error("emit_calibration_csv: write failed");
}

namespace {

bool to_bool(const std::string& s, const char* what) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw std::runtime_error(std::string("parse_config: bad ") + what + " value '" + s + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::uint64_t parse_seed(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw std::runtime_error("parse_seed: empty seed");
  try {
    std::size_t pos = 0;
    const int base = (t.size() > 2 && t[0] == '0' && (t[1] == 'x' || t[1] == 'X')) ? 16 : 10;
    const std::uint64_t v = std::stoull(t, &pos, base);
    if (pos != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("parse_seed: expected a decimal or 0x-hex 64-bit unsigned integer, got '" +
                             t + "'");
  }
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig config;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("parse_config: line " + std::to_string(lineno) +
                               " is not 'key = value'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key == "m") {
      config.m = static_cast<int>(to_u64(value, "m"));
    } else if (key == "n") {
      config.n = to_double(value, "n");
    } else if (key == "lambda") {
      config.lambda = to_double(value, "lambda");
    } else if (key == "r") {
      config.r = to_double(value, "r");
    } else if (key == "theta") {
      config.theta = to_double(value, "theta");
    } else if (key == "reps") {
      config.reps = to_u64(value, "reps");
    } else if (key == "master_seed") {
      config.master_seed = parse_seed(value);
    } else if (key == "compute_local") {
      config.compute_local = to_bool(value, "compute_local");
    } else if (key == "compute_e3") {
      config.compute_e3 = to_bool(value, "compute_e3");
    } else if (key == "oracle_check") {
      config.oracle_check = to_bool(value, "oracle_check");
    } else if (key == "parallelism") {
      config.parallelism = static_cast<std::uint32_t>(to_u64(value, "parallelism"));
    } else if (key == "max_expected_points") {
      config.max_expected_points = to_double(value, "max_expected_points");
    } else {
      throw std::runtime_error("parse_config: unknown key '" + key + "'");
    }
  }
  return config;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("parse_config_file: cannot open '" + path + "'");
  return parse_config(in);
}

}  // namespace perc
