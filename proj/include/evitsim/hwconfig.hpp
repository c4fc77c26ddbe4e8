#pragma once

#include <cstdint>
#include <string>

namespace evitsim {

// RPE: M PE lines, N MAC units per line.
struct RpeConfig {
    int m = 8;
    int n = 8;
    int64_t multipliers() const { return static_cast<int64_t>(m) * n; }
};

// MAT: S adder trees, T multipliers per tree (input-channel parallelism).
struct MatConfig {
    int s = 8;
    int t = 8;
    int64_t multipliers() const { return static_cast<int64_t>(s) * t; }
};

struct BufferSizes {
    int64_t a = 2 << 20;        // activation input
    int64_t b = 2 << 20;        // weights
    int64_t c = 2 << 20;        // activation output
    int64_t aux = 64 << 10;     // fused DW->PW row exchange
    int64_t divisor = 8 << 10;  // attention divisors (32-bit entries)
};

// One processing group = one RPE + one MAT; L groups total.
struct HardwareConfig {
    RpeConfig rpe;
    MatConfig mat;
    int l = 16;
    double clock_hz = 200e6;
    int64_t dram_bytes_per_cycle = 256;
    BufferSizes buffer_bytes;
    int64_t divider_count = 16;

    int64_t total_multipliers() const { return (rpe.multipliers() + mat.multipliers()) * l; }
    int64_t engine_count() const { return 2LL * l; }
    double peak_gops() const { return 2.0 * static_cast<double>(total_multipliers()) * clock_hz / 1e9; }
};

HardwareConfig load_hardware_config(const std::string& json_text);
HardwareConfig load_hardware_config_file(const std::string& path);
std::string save_hardware_config(const HardwareConfig& hw);

}  // namespace evitsim
