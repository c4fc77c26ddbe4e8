#include "evitsim/calibrate.hpp"

#include <algorithm>

#include "evitsim/kernels.hpp"
#include "evitsim/quant.hpp"
#include "json.hpp"

namespace evitsim {

using nlohmann::json;

static double to_scale(double max_abs) { return max_abs == 0.0 ? 1.0 : max_abs / 127.0; }

ScaleSet calibrate_scales(const NetworkGraph& g, const NetWeightsF& w,
                          const std::vector<FloatTensor>& samples) {
    if (samples.empty()) throw ConfigError("calibration needs at least one sample");

    double in_max = 0;
    std::vector<double> act_max(g.layers.size(), 0.0);
    std::vector<MsaTrace> peak(g.layers.size());
    for (const auto& sample : samples) {
        in_max = std::max(in_max, tensor_max_abs(sample));
        std::vector<MsaTrace> traces;
        auto acts = run_float_network(g, w, sample, &traces);
        for (size_t i = 0; i < acts.size(); ++i) {
            act_max[i] = std::max(act_max[i], tensor_max_abs(acts[i]));
            MsaTrace& p = peak[i];
            const MsaTrace& t = traces[i];
            p.qkv = std::max(p.qkv, t.qkv);
            p.attn = std::max(p.attn, t.attn);
            if (p.tok.size() < t.tok.size()) {
                p.tok.resize(t.tok.size(), 0.0);
                p.z.resize(t.z.size(), 0.0);
                p.ks.resize(t.ks.size(), 0.0);
            }
            for (size_t s = 0; s < t.tok.size(); ++s) {
                p.tok[s] = std::max(p.tok[s], t.tok[s]);
                p.z[s] = std::max(p.z[s], t.z[s]);
                p.ks[s] = std::max(p.ks[s], t.ks[s]);
            }
        }
    }

    ScaleSet s;
    s.input = to_scale(in_max);
    s.act.resize(g.layers.size(), 1.0);
    s.msa.resize(g.layers.size());
    for (size_t i = 0; i < g.layers.size(); ++i) {
        s.act[i] = to_scale(act_max[i]);
        if (g.layers[i].desc.kind != LayerKind::MsaBlock) continue;
        MsaScaleSet& m = s.msa[i];
        m.qkv = to_scale(peak[i].qkv);
        m.attn = to_scale(peak[i].attn);
        const auto& scales = g.layers[i].desc.msa_scales;
        m.tok.resize(scales.size());
        m.z.resize(scales.size());
        m.ks.resize(scales.size());
        for (size_t si = 0; si < scales.size(); ++si) {
            // scale-1 tokens are the qkv tensor itself; keep the same scale
            m.tok[si] = scales[si] == 1 ? m.qkv : to_scale(peak[i].tok[si]);
            m.z[si] = to_scale(peak[i].z[si]);
            m.ks[si] = to_scale(peak[i].ks[si]);
        }
    }
    return s;
}

std::string scales_to_json(const ScaleSet& s) {
    json j;
    j["input"] = s.input;
    j["act"] = s.act;
    json msa = json::array();
    for (const auto& m : s.msa) {
        json e;
        e["qkv"] = m.qkv;
        e["tok"] = m.tok;
        e["z"] = m.z;
        e["ks"] = m.ks;
        e["attn"] = m.attn;
        msa.push_back(std::move(e));
    }
    j["msa"] = std::move(msa);
    return j.dump(2) + "\n";
}

ScaleSet scales_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("scales parse error: ") + e.what());
    }
    ScaleSet s;
    s.input = j.at("input").get<double>();
    s.act = j.at("act").get<std::vector<double>>();
    for (const auto& e : j.at("msa")) {
        MsaScaleSet m;
        m.qkv = e.at("qkv").get<double>();
        m.tok = e.at("tok").get<std::vector<double>>();
        m.z = e.at("z").get<std::vector<double>>();
        m.ks = e.at("ks").get<std::vector<double>>();
        m.attn = e.at("attn").get<double>();
        s.msa.push_back(std::move(m));
    }
    return s;
}

}  // namespace evitsim
