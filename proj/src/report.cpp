#include "evitsim/report.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"

namespace evitsim {

using nlohmann::json;

ResourceEstimate resource_estimate(const HardwareConfig& hw) {
    ResourceEstimate r;
    r.multipliers = hw.total_multipliers();
    r.dsp_count = (r.multipliers + 1) / 2;
    r.pg_count = hw.l;
    return r;
}

Throughput throughput_and_utilization(int64_t macs, int64_t active_mac_cycles,
                                      int64_t latency_cycles, const HardwareConfig& hw) {
    if (latency_cycles <= 0) throw ReportError("latency must be positive to derive throughput");
    Throughput t;
    t.peak_gops = hw.peak_gops();
    t.gops = 2.0 * static_cast<double>(macs) * hw.clock_hz /
             static_cast<double>(latency_cycles) / 1e9;
    t.utilization = static_cast<double>(active_mac_cycles) /
                    (static_cast<double>(latency_cycles) *
                     static_cast<double>(hw.total_multipliers()));
    t.seconds = static_cast<double>(latency_cycles) / hw.clock_hz;
    return t;
}

std::vector<StageReport> aggregate_stages(const RunReport& rep, const HardwareConfig& hw) {
    std::vector<StageReport> stages;
    auto row = [&](Stage s) -> StageReport& {
        for (auto& r : stages)
            if (r.stage == s) return r;
        stages.push_back({});
        stages.back().stage = s;
        return stages.back();
    };
    for (const auto& t : rep.groups) {
        StageReport& r = row(t.stage);
        r.latency_cycles += t.latency_cycles;
        r.active_mac_cycles += t.active_mac_cycles;
        r.macs += t.macs;
        r.dram_bytes += t.dram_bytes;
    }
    for (auto& r : stages) {
        if (r.latency_cycles <= 0)
            throw ReportError(std::string("stage '") + to_string(r.stage) +
                              "' has zero latency");
        Throughput t = throughput_and_utilization(r.macs, r.active_mac_cycles,
                                                  r.latency_cycles, hw);
        r.utilization = t.utilization;
        r.gops = t.gops;
    }
    return stages;
}

namespace {

json timing_to_json(const LayerTiming& t) {
    return json{{"name", t.name},
                {"kind", to_string(t.kind)},
                {"stage", to_string(t.stage)},
                {"members", t.members},
                {"macs", t.macs},
                {"compute_cycles", t.compute_cycles},
                {"memory_cycles", t.memory_cycles},
                {"latency_cycles", t.latency_cycles},
                {"active_mac_cycles", t.active_mac_cycles},
                {"dram_bytes", t.dram_bytes}};
}

}  // namespace

std::string report_to_json(const RunReport& rep, const HardwareConfig& hw) {
    ResourceEstimate res = resource_estimate(hw);
    json j;
    j["ops_convention"] = "1 MAC = 2 ops";
    j["clock_hz"] = hw.clock_hz;
    j["multipliers"] = res.multipliers;
    j["dsp_count"] = res.dsp_count;
    j["pg_count"] = res.pg_count;
    j["peak_gops"] = hw.peak_gops();

    j["layers"] = json::array();
    for (const auto& t : rep.groups) {
        json row = timing_to_json(t);
        row["utilization"] =
            t.latency_cycles > 0
                ? static_cast<double>(t.active_mac_cycles) /
                      (static_cast<double>(t.latency_cycles) *
                       static_cast<double>(hw.total_multipliers()))
                : 0.0;
        row["gops"] = t.latency_cycles > 0
                          ? 2.0 * static_cast<double>(t.macs) * hw.clock_hz /
                                static_cast<double>(t.latency_cycles) / 1e9
                          : 0.0;
        j["layers"].push_back(std::move(row));
    }

    j["stages"] = json::array();
    for (const auto& s : aggregate_stages(rep, hw))
        j["stages"].push_back(json{{"stage", to_string(s.stage)},
                                   {"latency_cycles", s.latency_cycles},
                                   {"utilization", s.utilization},
                                   {"gops", s.gops},
                                   {"dram_bytes", s.dram_bytes},
                                   {"macs", s.macs},
                                   {"active_mac_cycles", s.active_mac_cycles}});

    j["totals"] = json{{"latency_cycles", rep.total_latency_cycles},
                       {"active_mac_cycles", rep.total_active_mac_cycles},
                       {"dram_bytes", rep.total_dram_bytes},
                       {"macs", rep.total_macs},
                       {"utilization", rep.utilization},
                       {"gops", rep.gops},
                       {"seconds", rep.seconds}};
    return j.dump(2) + "\n";
}

std::string report_to_csv(const RunReport& rep, const HardwareConfig& hw) {
    std::ostringstream out;
    out << "# 1 MAC = 2 ops\n";
    out << "section,name,stage,latency_cycles,utilization,gops,dram_bytes,macs,"
           "active_mac_cycles,compute_cycles,memory_cycles\n";
    const double mult = static_cast<double>(hw.total_multipliers());
    for (const auto& t : rep.groups) {
        const double util = t.latency_cycles > 0
                                ? static_cast<double>(t.active_mac_cycles) /
                                      (static_cast<double>(t.latency_cycles) * mult)
                                : 0.0;
        const double gops = t.latency_cycles > 0
                                ? 2.0 * static_cast<double>(t.macs) * hw.clock_hz /
                                      static_cast<double>(t.latency_cycles) / 1e9
                                : 0.0;
        out << "layer," << t.name << ',' << to_string(t.stage) << ',' << t.latency_cycles
            << ',' << util << ',' << gops << ',' << t.dram_bytes << ',' << t.macs << ','
            << t.active_mac_cycles << ',' << t.compute_cycles << ',' << t.memory_cycles
            << '\n';
    }
    for (const auto& s : aggregate_stages(rep, hw))
        out << "stage," << to_string(s.stage) << ',' << to_string(s.stage) << ','
            << s.latency_cycles << ',' << s.utilization << ',' << s.gops << ','
            << s.dram_bytes << ',' << s.macs << ',' << s.active_mac_cycles << ",,\n";
    out << "total,total,," << rep.total_latency_cycles << ',' << rep.utilization << ','
        << rep.gops << ',' << rep.total_dram_bytes << ',' << rep.total_macs << ','
        << rep.total_active_mac_cycles << ",,\n";
    return out.str();
}

RunReport report_from_json(const std::string& text) {
    json j = json::parse(text);
    RunReport rep;
    for (const auto& row : j.at("layers")) {
        LayerTiming t;
        t.name = row.at("name").get<std::string>();
        const std::string kind = row.at("kind").get<std::string>();
        if (kind == "dw_pw_fused")
            t.kind = GroupKind::DwPwFused;
        else if (kind == "msa_fused")
            t.kind = GroupKind::MsaFused;
        else
            t.kind = GroupKind::Standalone;
        t.stage = stage_from_string(row.at("stage").get<std::string>());
        t.members = row.at("members").get<std::vector<int>>();
        t.macs = row.at("macs").get<int64_t>();
        t.compute_cycles = row.at("compute_cycles").get<int64_t>();
        t.memory_cycles = row.at("memory_cycles").get<int64_t>();
        t.latency_cycles = row.at("latency_cycles").get<int64_t>();
        t.active_mac_cycles = row.at("active_mac_cycles").get<int64_t>();
        t.dram_bytes = row.at("dram_bytes").get<int64_t>();
        rep.groups.push_back(std::move(t));
    }
    const json& tot = j.at("totals");
    rep.total_latency_cycles = tot.at("latency_cycles").get<int64_t>();
    rep.total_active_mac_cycles = tot.at("active_mac_cycles").get<int64_t>();
    rep.total_dram_bytes = tot.at("dram_bytes").get<int64_t>();
    rep.total_macs = tot.at("macs").get<int64_t>();
    rep.utilization = tot.at("utilization").get<double>();
    rep.gops = tot.at("gops").get<double>();
    rep.seconds = tot.at("seconds").get<double>();
    return rep;
}

}  // namespace evitsim
