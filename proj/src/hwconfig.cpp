#include "evitsim/hwconfig.hpp"

#include <set>

#include "evitsim/graph.hpp"
#include "evitsim/graph_io.hpp"
#include "json.hpp"

namespace evitsim {

using nlohmann::json;

HardwareConfig load_hardware_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("hardware config parse error: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("hardware config must be an object");
    static const std::set<std::string> known = {"M", "N", "S", "T", "L", "clock_hz",
                                                "dram_bytes_per_cycle", "buffer_bytes",
                                                "divider_count"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw ConfigError("hardware config: unknown field '" + it.key() + "'");

    HardwareConfig hw;
    hw.rpe.m = j.value("M", hw.rpe.m);
    hw.rpe.n = j.value("N", hw.rpe.n);
    hw.mat.s = j.value("S", hw.mat.s);
    hw.mat.t = j.value("T", hw.mat.t);
    hw.l = j.value("L", hw.l);
    hw.clock_hz = j.value("clock_hz", hw.clock_hz);
    hw.dram_bytes_per_cycle = j.value("dram_bytes_per_cycle", hw.dram_bytes_per_cycle);
    hw.divider_count = j.value("divider_count", hw.divider_count);
    if (j.contains("buffer_bytes")) {
        const json& b = j["buffer_bytes"];
        static const std::set<std::string> bknown = {"A", "B", "C", "aux", "divisor"};
        for (auto it = b.begin(); it != b.end(); ++it)
            if (!bknown.count(it.key()))
                throw ConfigError("buffer_bytes: unknown field '" + it.key() + "'");
        hw.buffer_bytes.a = b.value("A", hw.buffer_bytes.a);
        hw.buffer_bytes.b = b.value("B", hw.buffer_bytes.b);
        hw.buffer_bytes.c = b.value("C", hw.buffer_bytes.c);
        hw.buffer_bytes.aux = b.value("aux", hw.buffer_bytes.aux);
        hw.buffer_bytes.divisor = b.value("divisor", hw.buffer_bytes.divisor);
    }
    if (hw.rpe.m < 1 || hw.rpe.n < 1 || hw.mat.s < 1 || hw.mat.t < 1 || hw.l < 1)
        throw ConfigError("hardware config: M, N, S, T, L must all be >= 1");
    if (hw.clock_hz <= 0 || hw.dram_bytes_per_cycle < 1 || hw.divider_count < 1)
        throw ConfigError("hardware config: clock/bandwidth/divider_count must be positive");
    return hw;
}

HardwareConfig load_hardware_config_file(const std::string& path) {
    return load_hardware_config(read_text_file(path));
}

std::string save_hardware_config(const HardwareConfig& hw) {
    json j;
    j["M"] = hw.rpe.m;
    j["N"] = hw.rpe.n;
    j["S"] = hw.mat.s;
    j["T"] = hw.mat.t;
    j["L"] = hw.l;
    j["clock_hz"] = hw.clock_hz;
    j["dram_bytes_per_cycle"] = hw.dram_bytes_per_cycle;
    j["buffer_bytes"] = {{"A", hw.buffer_bytes.a},
                         {"B", hw.buffer_bytes.b},
                         {"C", hw.buffer_bytes.c},
                         {"aux", hw.buffer_bytes.aux},
                         {"divisor", hw.buffer_bytes.divisor}};
    j["divider_count"] = hw.divider_count;
    return j.dump(2) + "\n";
}

}  // namespace evitsim
