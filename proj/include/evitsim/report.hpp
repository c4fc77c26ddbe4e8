#pragma once

#include <string>
#include <vector>

#include "evitsim/hwconfig.hpp"
#include "evitsim/schedule.hpp"

namespace evitsim {

struct ReportError : SimError {
    using SimError::SimError;
};

struct ResourceEstimate {
    int64_t multipliers = 0;  // (M*N + S*T) * L
    int64_t dsp_count = 0;    // two int8 multiplies packed per DSP
    int64_t pg_count = 0;
};

ResourceEstimate resource_estimate(const HardwareConfig& hw);

struct StageReport {
    Stage stage = Stage::Conv;
    int64_t latency_cycles = 0;
    int64_t active_mac_cycles = 0;
    int64_t macs = 0;
    int64_t dram_bytes = 0;
    double utilization = 0.0;
    double gops = 0.0;
};

// Collapses per-group timings into one row per stage tag, in first-seen order.
std::vector<StageReport> aggregate_stages(const RunReport& rep, const HardwareConfig& hw);

struct Throughput {
    double gops = 0.0;
    double utilization = 0.0;
    double peak_gops = 0.0;
    double seconds = 0.0;
};

// Latency must be nonzero; 1 MAC counts as 2 ops.
Throughput throughput_and_utilization(int64_t macs, int64_t active_mac_cycles,
                                      int64_t latency_cycles, const HardwareConfig& hw);

// Full report serialization. The JSON form is the source of truth; the CSV is
// a flat mirror of the per-layer and per-stage tables.
std::string report_to_json(const RunReport& rep, const HardwareConfig& hw);
std::string report_to_csv(const RunReport& rep, const HardwareConfig& hw);

// Parses report_to_json output back; used to keep the format round-trippable.
RunReport report_from_json(const std::string& text);

}  // namespace evitsim
