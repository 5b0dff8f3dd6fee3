#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "perc/experiment.hpp"
#include "perc/records.hpp"
#include "perc/stats.hpp"

namespace perc {

inline constexpr const char* kVersion = "0.1.0";

// Fixed record schema. Optional fields are left empty when not computed.
inline constexpr const char* kRecordsCsvHeader =
    "rep_id,stream_index,point_count,N,second_size,global_unique,N_prime,"
    "mismatch_count,e0_count,e1_count,e2_count,e3_count,wall_ms";

void emit_csv(const std::vector<ReplicationRecord>& records, std::ostream& out);
std::vector<ReplicationRecord> parse_csv(std::istream& in);

void emit_summary_json(const SummarySet& summary, const ExperimentConfig& config,
                       std::ostream& out);
void emit_ladder_json(const LadderResult& ladder, const ExperimentConfig& base,
                      std::ostream& out);
void emit_calibration_csv(const std::vector<ThetaCalibrationRow>& rows, std::ostream& out);

// Flat key=value config: keys are the ExperimentConfig field names; '#' starts
// a comment line. Unknown keys are rejected.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);

// 64-bit unsigned seed, decimal or 0x-prefixed hex.
std::uint64_t parse_seed(const std::string& text);

// 17-significant-digit float formatting (round-trip exact).
std::string format_double(double v);

}  // namespace perc
