#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <json.hpp>
#include <string>

#include "evitsim/graph_io.hpp"
#include "evitsim/report.hpp"
#include "evitsim/schedule.hpp"
#include "evitsim/tensor_io.hpp"

using namespace evitsim;
namespace fs = std::filesystem;

namespace {

fs::path test_dir() {
    static fs::path p = [] {
        fs::path d = fs::temp_directory_path() / "evitsim_cli_test";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return p;
}

struct CmdResult {
    int code = -1;
    std::string out;
};

CmdResult run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path log = test_dir() / ("cli" + std::to_string(counter++) + ".log");
    const std::string cmd =
        std::string(EVITSIM_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    CmdResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = read_text_file(log.string());
    return r;
}

// A small network that exercises fusion, attention, and a residual layer.
const char* kSmallNet = R"({
  "input_shape": [1, 4, 8, 8],
  "layers": [
    {"name": "dw", "kind": "DWConv", "kernel": 3, "padding": 1,
     "in_channels": 4, "out_channels": 4, "activation": "relu"},
    {"name": "pw", "kind": "PWConv", "in_channels": 4, "out_channels": 8,
     "activation": "hardswish"},
    {"name": "att", "kind": "MsaBlock", "in_channels": 8, "out_channels": 8,
     "msa_dim": 4, "msa_scales": [1, 3]},
    {"name": "skip", "kind": "ResidualAdd", "in_channels": 8, "out_channels": 8,
     "src": "pw"}
  ],
  "stage_tags": ["DSConv", "DSConv", "S3", "S3"]
})";

RunReport small_net_report() {
    NetworkGraph g = load_network(kSmallNet);
    // Weight and scale choice does not matter for the timing rows.
    HardwareConfig hw;
    Schedule sched = plan_schedule(g, hw);
    return timing_report(g, sched, hw);
}

}  // namespace

TEST_CASE("resource estimate from the hardware config") {
    HardwareConfig hw;  // 16 groups of one 8x8 RPE and one 8x8 MAT
    ResourceEstimate r = resource_estimate(hw);
    CHECK(r.multipliers == 2048);
    CHECK(r.dsp_count == 1024);  // two int8 multiplies per DSP
    CHECK(r.pg_count == 16);

    hw.rpe = {4, 8};
    hw.mat = {16, 3};
    hw.l = 3;
    ResourceEstimate r2 = resource_estimate(hw);
    CHECK(r2.multipliers == (32 + 48) * 3);
    CHECK(r2.dsp_count == 120);
    CHECK(r2.pg_count == 3);

    CHECK(HardwareConfig{}.peak_gops() == 819.2);
}

TEST_CASE("throughput formulas") {
    HardwareConfig hw;
    Throughput t = throughput_and_utilization(1000, 800, 100, hw);
    CHECK(t.peak_gops == 819.2);
    CHECK(t.gops == doctest::Approx(4.0).epsilon(1e-12));       // 2*1000*200MHz/100
    CHECK(t.utilization == doctest::Approx(800.0 / (100 * 2048)).epsilon(1e-15));
    CHECK(t.seconds == doctest::Approx(100 / 200e6).epsilon(1e-15));

    CHECK_THROWS_WITH_AS(throughput_and_utilization(1, 1, 0, hw),
                         doctest::Contains("latency must be positive"), ReportError);
}

TEST_CASE("stage aggregation keeps first-seen order and sums the rows") {
    RunReport rep = small_net_report();
    HardwareConfig hw;
    auto stages = aggregate_stages(rep, hw);
    REQUIRE(stages.size() == 2);
    CHECK(stages[0].stage == Stage::DSConv);
    CHECK(stages[1].stage == Stage::S3);

    int64_t lat = 0, macs = 0;
    for (const auto& s : stages) {
        lat += s.latency_cycles;
        macs += s.macs;
    }
    CHECK(lat == rep.total_latency_cycles);
    CHECK(macs == rep.total_macs);
    for (const auto& s : stages)
        CHECK(s.utilization ==
              doctest::Approx(double(s.active_mac_cycles) / (double(s.latency_cycles) * 2048))
                  .epsilon(1e-15));

    RunReport broken = rep;
    for (auto& gr : broken.groups) gr.latency_cycles = 0;
    CHECK_THROWS_AS(aggregate_stages(broken, hw), ReportError);
}

TEST_CASE("report serialization: json round trip and csv mirror") {
    RunReport rep = small_net_report();
    HardwareConfig hw;

    std::string text = report_to_json(rep, hw);
    RunReport back = report_from_json(text);
    CHECK(report_to_json(back, hw) == text);

    auto j = nlohmann::json::parse(text);
    CHECK(j["ops_convention"] == "1 MAC = 2 ops");
    CHECK(j["peak_gops"] == 819.2);
    CHECK(j["multipliers"] == 2048);
    CHECK(j["dsp_count"] == 1024);
    CHECK(j["layers"].size() == rep.groups.size());
    CHECK(j["totals"]["latency_cycles"] == rep.total_latency_cycles);
    // fused group names join their members
    bool saw_fused = false;
    for (const auto& row : j["layers"])
        if (row["name"] == "dw+pw") {
            saw_fused = true;
            CHECK(row["kind"] == "dw_pw_fused");
        }
    CHECK(saw_fused);

    std::string csv = report_to_csv(rep, hw);
    CHECK(csv.find("# 1 MAC = 2 ops") != std::string::npos);
    CHECK(csv.find("layer,") != std::string::npos);
    CHECK(csv.find("stage,") != std::string::npos);
    CHECK(csv.find("total,") != std::string::npos);
    CHECK(csv.find("dw+pw") != std::string::npos);
}

TEST_CASE("quant tensor dump and load round trip") {
    QuantTensor t({1, 3, 2, 2}, QuantParams{0.125});
    for (size_t i = 0; i < t.data.size(); ++i) t.data[i] = static_cast<int8_t>(i * 7 - 40);

    const fs::path path = test_dir() / "acts.bin";
    std::string header = dump_quant_tensor(t, path.string());
    CHECK(header.find("int8") != std::string::npos);
    CHECK(fs::exists(path));
    CHECK(fs::exists(path.string() + ".txt"));
    CHECK(fs::file_size(path) == t.data.size());

    QuantTensor back = load_quant_tensor(path.string());
    CHECK(back.shape == t.shape);
    CHECK(back.data == t.data);
    CHECK(back.params.scale == t.params.scale);
}

TEST_CASE("cli: simulate, calibrate, report, verify") {
    const fs::path dir = test_dir();
    write_text_file((dir / "small.json").string(), kSmallNet);

    SUBCASE("simulate writes a report and an output dump") {
        CmdResult r = run_cli("simulate --network " + (dir / "small.json").string() + " --out " +
                              (dir / "rep.json").string() + " --csv " + (dir / "rep.csv").string() +
                              " --dump-output " + (dir / "out.bin").string() + " --seed 3");
        CAPTURE(r.out);
        REQUIRE(r.code == 0);

        auto j = nlohmann::json::parse(read_text_file((dir / "rep.json").string()));
        CHECK(j["totals"]["latency_cycles"].get<int64_t>() > 0);
        CHECK(j["layers"].size() == 2);  // dw+pw, att+skip (residual rides along)

        std::string csv = read_text_file((dir / "rep.csv").string());
        CHECK(csv.find("att+skip") != std::string::npos);

        QuantTensor out = load_quant_tensor((dir / "out.bin").string());
        CHECK(out.shape == TensorShape{1, 8, 8, 8});

        SUBCASE("report reformats the json into the same csv") {
            CmdResult r2 = run_cli("report --in " + (dir / "rep.json").string() + " --csv " +
                                   (dir / "rep2.csv").string());
            REQUIRE(r2.code == 0);
            CHECK(read_text_file((dir / "rep2.csv").string()) == csv);
        }

        SUBCASE("disabling fusion yields one group per layer and more traffic") {
            CmdResult r3 = run_cli("simulate --network " + (dir / "small.json").string() +
                                   " --no-fusion --seed 3 --out " + (dir / "nf.json").string());
            REQUIRE(r3.code == 0);
            auto jn = nlohmann::json::parse(read_text_file((dir / "nf.json").string()));
            CHECK(jn["layers"].size() == 4);
            CHECK(jn["totals"]["dram_bytes"].get<int64_t>() >
                  j["totals"]["dram_bytes"].get<int64_t>());
        }
    }

    SUBCASE("calibrate emits scales that simulate accepts") {
        CmdResult r = run_cli("calibrate --network " + (dir / "small.json").string() +
                              " --seed 5 --samples 4 --out " + (dir / "scales.json").string());
        CAPTURE(r.out);
        REQUIRE(r.code == 0);
        CmdResult r2 = run_cli("simulate --network " + (dir / "small.json").string() +
                               " --scales " + (dir / "scales.json").string() + " --seed 5 --out " +
                               (dir / "rep_cal.json").string());
        CAPTURE(r2.out);
        CHECK(r2.code == 0);
        CHECK(nlohmann::json::parse(read_text_file((dir / "rep_cal.json").string()))
                  .contains("totals"));
    }

    SUBCASE("verify runs its randomized dual-route checks") {
        CmdResult r = run_cli("verify --seed 7 --cases 20");
        CAPTURE(r.out);
        CHECK(r.code == 0);
        CHECK(r.out.find("engines vs quantized reference") != std::string::npos);
        CHECK(r.out.find("attention right vs left association") != std::string::npos);
        CHECK(r.out.find("max error <= 1 LSB") != std::string::npos);
    }

    SUBCASE("bad invocations fail with distinct codes") {
        CmdResult unknown = run_cli("simulate --network x.json --definitely-not-a-flag");
        CHECK(unknown.code == 2);

        CmdResult missing = run_cli("simulate --network " + (dir / "nope.json").string());
        CHECK(missing.code == 1);
        CHECK(missing.out.find("error:") != std::string::npos);

        CmdResult help = run_cli("--help");
        CHECK(help.code == 0);
        CHECK(help.out.find("simulate") != std::string::npos);
    }

    SUBCASE("paths resolve against --workdir with a .json fallback") {
        CmdResult r = run_cli("--workdir " + dir.string() +
                              " simulate --network small --seed 2 --out rel_rep.json");
        CAPTURE(r.out);
        REQUIRE(r.code == 0);
        CHECK(fs::exists(dir / "rel_rep.json"));
    }

    SUBCASE("the b1 config simulates end to end through the cli") {
        // ctest runs from the repository root, so the bundled config resolves.
        CmdResult r = run_cli("simulate --network configs/efficientvit-b1 --samples 1 --out " +
                              (dir / "b1.json").string());
        CAPTURE(r.out);
        REQUIRE(r.code == 0);
        auto j = nlohmann::json::parse(read_text_file((dir / "b1.json").string()));
        CHECK(j["totals"]["utilization"].get<double>() > 0.9);
        CHECK(j["stages"].size() == 6);
    }
}
