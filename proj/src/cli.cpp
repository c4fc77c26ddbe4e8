#include "evitsim/cli.hpp"

#include <cinttypes>
#include <cmath>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "evitsim/calibrate.hpp"
#include "evitsim/engines.hpp"
#include "evitsim/graph_io.hpp"
#include "evitsim/kernels.hpp"
#include "evitsim/log.hpp"
#include "evitsim/qkernels.hpp"
#include "evitsim/report.hpp"
#include "evitsim/serial_ref.hpp"
#include "evitsim/tensor_io.hpp"

namespace evitsim {

namespace {

namespace fs = std::filesystem;

// Paths resolve against --workdir; a missing extension falls back to .json.
std::string resolve_input(const std::string& workdir, const std::string& path) {
    fs::path p = fs::path(workdir) / path;
    if (fs::exists(p)) return p.string();
    fs::path with_ext = p;
    with_ext += ".json";
    if (fs::exists(with_ext)) return with_ext.string();
    return p.string();  // let the open fail with the plain name
}

std::string resolve_output(const std::string& workdir, const std::string& path) {
    return (fs::path(workdir) / path).string();
}

struct SimulateArgs {
    std::string network;
    std::string hw;
    std::string scales;
    std::string out;
    std::string csv;
    std::string dump_output;
    uint64_t seed = 1;
    int samples = 2;
    bool no_fusion = false;
};

int cmd_simulate(const std::string& workdir, const SimulateArgs& a) {
    NetworkGraph g = load_network_file(resolve_input(workdir, a.network));
    HardwareConfig hw;
    if (!a.hw.empty()) hw = load_hardware_config_file(resolve_input(workdir, a.hw));

    NetWeightsF w = generate_weights(g, a.seed);
    ScaleSet scales;
    if (!a.scales.empty()) {
        scales = scales_from_json(read_text_file(resolve_input(workdir, a.scales)));
    } else {
        Rng rng(a.seed ^ 0x9e3779b97f4a7c15ull);
        std::vector<FloatTensor> samples;
        for (int i = 0; i < a.samples; ++i)
            samples.push_back(random_tensor(g.input_shape, rng));
        scales = calibrate_scales(g, w, samples);
    }
    QNetWeights qw = quantize_weights(g, w, scales);

    Rng in_rng(a.seed);
    QuantTensor input = quantize(random_tensor(g.input_shape, in_rng), scales.input);

    Schedule sched = plan_schedule(g, hw, !a.no_fusion);
    SimResult res = simulate_schedule(g, sched, input, qw, scales, hw);

    const std::string json = report_to_json(res.report, hw);
    if (a.out.empty())
        std::cout << json;
    else
        write_text_file(resolve_output(workdir, a.out), json);
    if (!a.csv.empty())
        write_text_file(resolve_output(workdir, a.csv), report_to_csv(res.report, hw));
    if (!a.dump_output.empty())
        dump_quant_tensor(res.activations.back(), resolve_output(workdir, a.dump_output));

    LOG_INFO("simulated %zu groups, %" PRId64 " cycles", res.report.groups.size(),
             res.report.total_latency_cycles);
    return 0;
}

struct CalibrateArgs {
    std::string network;
    std::string out;
    uint64_t seed = 1;
    int samples = 8;
};

int cmd_calibrate(const std::string& workdir, const CalibrateArgs& a) {
    NetworkGraph g = load_network_file(resolve_input(workdir, a.network));
    NetWeightsF w = generate_weights(g, a.seed);
    Rng rng(a.seed ^ 0x9e3779b97f4a7c15ull);
    std::vector<FloatTensor> samples;
    for (int i = 0; i < a.samples; ++i) samples.push_back(random_tensor(g.input_shape, rng));
    ScaleSet scales = calibrate_scales(g, w, samples);
    const std::string json = scales_to_json(scales);
    if (a.out.empty())
        std::cout << json;
    else
        write_text_file(resolve_output(workdir, a.out), json);
    return 0;
}

struct ReportArgs {
    std::string in;
    std::string hw;
    std::string csv;
};

int cmd_report(const std::string& workdir, const ReportArgs& a) {
    RunReport rep = report_from_json(read_text_file(resolve_input(workdir, a.in)));
    HardwareConfig hw;
    if (!a.hw.empty()) hw = load_hardware_config_file(resolve_input(workdir, a.hw));
    const std::string csv = report_to_csv(rep, hw);
    if (a.csv.empty())
        std::cout << csv;
    else
        write_text_file(resolve_output(workdir, a.csv), csv);
    return 0;
}

// Randomized dual-route checks. Every case runs the engine pipeline and the
// plain quantized kernels on the same bytes, plus a float-domain oracle.
struct VerifyStats {
    int64_t cases = 0;
    int max_lsb = 0;
    double max_rel = 0.0;
};

LayerDesc random_conv_desc(Rng& rng, int i) {
    static const int kernels[] = {3, 5, 7};
    LayerDesc d;
    d.name = "case" + std::to_string(i);
    const double pick = rng.uniform(0.0, 3.0);
    if (pick < 1.0) {
        d.kind = LayerKind::DWConv;
        d.kernel = kernels[static_cast<int>(rng.uniform(0.0, 3.0)) % 3];
        d.stride = rng.uniform(0.0, 1.0) < 0.5 ? 1 : 2;
        d.padding = (d.kernel - 1) / 2;
        d.in_channels = d.out_channels = 4 + static_cast<int>(rng.uniform(0.0, 12.0));
        d.groups = d.in_channels;
    } else if (pick < 2.0) {
        d.kind = LayerKind::PWConv;
        d.in_channels = 4 + static_cast<int>(rng.uniform(0.0, 12.0));
        d.out_channels = 4 + static_cast<int>(rng.uniform(0.0, 12.0));
    } else {
        d.kind = LayerKind::GenericConv;
        d.kernel = 3;
        d.stride = rng.uniform(0.0, 1.0) < 0.5 ? 1 : 2;
        d.padding = 1;
        d.in_channels = 3 + static_cast<int>(rng.uniform(0.0, 6.0));
        d.out_channels = 4 + static_cast<int>(rng.uniform(0.0, 12.0));
    }
    d.activation = rng.uniform(0.0, 1.0) < 0.5 ? Activation::ReLU : Activation::Hardswish;
    return d;
}

void verify_engine_case(Rng& rng, int i, const HardwareConfig& hw, VerifyStats& st) {
    LayerDesc d = random_conv_desc(rng, i);
    TensorShape in{1, d.in_channels, 8 + static_cast<int64_t>(rng.uniform(0.0, 8.0)),
                   8 + static_cast<int64_t>(rng.uniform(0.0, 8.0))};

    FloatTensor xf = random_tensor(in, rng);
    QuantTensor x = quantize(xf);
    FloatTensor wf({d.out_channels, d.in_channels / d.groups, d.kernel, d.kernel});
    for (auto& v : wf.data) v = rng.uniform(-0.5, 0.5);
    QConvWeights qw;
    qw.scale = choose_scale(wf.data.data(), wf.data.size());
    qw.w.assign(wf.data.size(), 0);
    for (size_t j = 0; j < wf.data.size(); ++j)
        qw.w[j] = clamp_i8(round_half_even(wf.data[j] / qw.scale));
    qw.bias32.assign(static_cast<size_t>(d.out_channels), 0);
    for (auto& b : qw.bias32) b = static_cast<int32_t>(rng.uniform(-300.0, 300.0));

    TensorShape out = infer_output_shape(d, in);
    FloatTensor outf(out);
    const double out_scale = 0.05;
    DrainSpec drain{d.activation, out_scale, {}};

    QuantTensor ref = qlinear(x, qw, d, drain);
    EngineResult eng = d.kind == LayerKind::DWConv
                           ? rpe_dw_execute(x, qw, d, drain, hw.rpe)
                           : mat_execute(x, qw, d, drain, hw.mat);
    for (size_t j = 0; j < ref.data.size(); ++j)
        st.max_lsb = std::max(st.max_lsb,
                              std::abs(static_cast<int>(ref.data[j]) -
                                       static_cast<int>(eng.outputs.data[j])));
    if (d.kind != LayerKind::DWConv) {
        EngineResult rpe = rpe_pw_execute(x, qw, d, drain, hw.rpe);
        for (size_t j = 0; j < ref.data.size(); ++j)
            st.max_lsb = std::max(st.max_lsb,
                                  std::abs(static_cast<int>(ref.data[j]) -
                                           static_cast<int>(rpe.outputs.data[j])));
    }
    ++st.cases;
}

void verify_attention_case(Rng& rng, VerifyStats& st) {
    const int64_t n = 4 + static_cast<int64_t>(rng.uniform(0.0, 12.0));
    const int64_t dd = 4 + static_cast<int64_t>(rng.uniform(0.0, 12.0));
    TensorShape s{1, 1, n, dd};
    FloatTensor q = random_tensor(s, rng), k = random_tensor(s, rng),
                v = random_tensor(s, rng);
    FloatTensor right = relu_linear_attention_ref(q, k, v);
    FloatTensor left = serial_ref::attention_left(q, k, v);
    for (size_t j = 0; j < right.data.size(); ++j) {
        const double denom = std::max({std::fabs(right.data[j]), std::fabs(left.data[j]),
                                       1e-12});
        st.max_rel = std::max(st.max_rel, std::fabs(right.data[j] - left.data[j]) / denom);
    }
    ++st.cases;
}

int cmd_verify(uint64_t seed, int cases) {
    HardwareConfig hw;
    Rng rng(seed);
    VerifyStats engines, attn;
    for (int i = 0; i < cases; ++i) verify_engine_case(rng, i, hw, engines);
    for (int i = 0; i < cases; ++i) verify_attention_case(rng, attn);

    std::cout << "engines vs quantized reference: max error " << engines.max_lsb << " LSB ("
              << engines.cases << " cases)\n";
    std::cout << "attention right vs left association: max relative error " << attn.max_rel
              << " (" << attn.cases << " cases)\n";
    const bool ok = engines.max_lsb == 0 && attn.max_rel <= 1e-6;
    std::cout << (ok ? "max error <= 1 LSB\n" : "verification FAILED\n");
    return ok ? 0 : 1;
}

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"Cycle-level simulator of an int8 FPGA accelerator for "
                 "convolution-transformer networks"};
    app.require_subcommand(1);
    std::string workdir = ".";
    app.add_option("--workdir", workdir, "Directory all paths resolve against");

    SimulateArgs sim;
    CLI::App* simulate = app.add_subcommand("simulate", "Run a network and write its report");
    simulate->add_option("--network", sim.network, "Network topology JSON")->required();
    simulate->add_option("--hw", sim.hw, "Hardware config JSON");
    simulate->add_option("--scales", sim.scales, "Calibration file from `calibrate`");
    simulate->add_option("--seed", sim.seed, "Weight/input seed");
    simulate->add_option("--samples", sim.samples, "Calibration sample count");
    simulate->add_option("--out", sim.out, "Report JSON path (stdout when omitted)");
    simulate->add_option("--csv", sim.csv, "Also write the CSV mirror here");
    simulate->add_option("--dump-output", sim.dump_output,
                         "Dump the final activation tensor to this path");
    simulate->add_flag("--no-fusion", sim.no_fusion, "Schedule every layer standalone");

    uint64_t vseed = 7;
    int vcases = 100;
    CLI::App* verify = app.add_subcommand("verify", "Cross-check engines against references");
    verify->add_option("--seed", vseed, "Case seed");
    verify->add_option("--cases", vcases, "Cases per check family");

    CalibrateArgs cal;
    CLI::App* calibrate = app.add_subcommand("calibrate", "Derive per-tensor scales");
    calibrate->add_option("--network", cal.network, "Network topology JSON")->required();
    calibrate->add_option("--seed", cal.seed, "Weight/sample seed");
    calibrate->add_option("--samples", cal.samples, "Sample count");
    calibrate->add_option("--out", cal.out, "Scales JSON path (stdout when omitted)");

    ReportArgs repa;
    CLI::App* report = app.add_subcommand("report", "Reformat a saved report");
    report->add_option("--in", repa.in, "Report JSON path")->required();
    report->add_option("--hw", repa.hw, "Hardware config JSON");
    report->add_option("--csv", repa.csv, "CSV output path (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(workdir, sim);
        if (verify->parsed()) return cmd_verify(vseed, vcases);
        if (calibrate->parsed()) return cmd_calibrate(workdir, cal);
        if (report->parsed()) return cmd_report(workdir, repa);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace evitsim
