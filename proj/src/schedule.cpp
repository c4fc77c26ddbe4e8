#include "evitsim/schedule.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace evitsim {

const char* to_string(GroupKind k) {
    switch (k) {
        case GroupKind::Standalone: return "standalone";
        case GroupKind::DwPwFused: return "dw_pw_fused";
        case GroupKind::MsaFused: return "msa_fused";
    }
    return "?";
}

namespace {

inline int64_t ceil_div(int64_t a, int64_t b) { return (a + b - 1) / b; }

// Greedy in-order dealing: each job starts on the engine with the earliest
// possible start time; ties go to the MAT side, then the lower index.
struct EnginePool {
    std::vector<int64_t> mat_free;
    std::vector<int64_t> rpe_free;

    explicit EnginePool(const HardwareConfig& hw)
        : mat_free(static_cast<size_t>(hw.l), 0), rpe_free(static_cast<size_t>(hw.l), 0) {}

    int64_t assign(int64_t gate, int64_t cost_mat, int64_t cost_rpe, bool allow_mat,
                   bool allow_rpe) {
        int64_t best_start = std::numeric_limits<int64_t>::max();
        bool best_is_mat = true;
        size_t best_i = 0;
        if (allow_mat)
            for (size_t i = 0; i < mat_free.size(); ++i) {
                int64_t start = std::max(mat_free[i], gate);
                if (start < best_start) {
                    best_start = start;
                    best_is_mat = true;
                    best_i = i;
                }
            }
        if (allow_rpe)
            for (size_t i = 0; i < rpe_free.size(); ++i) {
                int64_t start = std::max(rpe_free[i], gate);
                if (start < best_start) {
                    best_start = start;
                    best_is_mat = false;
                    best_i = i;
                }
            }
        int64_t finish = best_start + (best_is_mat ? cost_mat : cost_rpe);
        (best_is_mat ? mat_free : rpe_free)[best_i] = finish;
        return finish;
    }

    int64_t makespan() const {
        int64_t m = 0;
        for (int64_t f : mat_free) m = std::max(m, f);
        for (int64_t f : rpe_free) m = std::max(m, f);
        return m;
    }
};

// Work quantum for PW-type layers: one output pixel of one min(M,S)-wide
// output-channel tile. Cost on an engine with in_par input lanes.
int64_t pw_unit_cost(const LayerDesc& l, int64_t in_par) {
    return static_cast<int64_t>(l.kernel) * l.kernel * ceil_div(l.in_channels, in_par);
}

int64_t standalone_pw_cycles(const LayerDesc& l, const TensorShape& in,
                             const HardwareConfig& hw) {
    TensorShape out = infer_output_shape(l, in);
    const int64_t g = std::min(hw.rpe.m, hw.mat.s);
    const int64_t tiles = ceil_div(l.out_channels, g);
    const int64_t cost_mat = pw_unit_cost(l, hw.mat.t);
    const int64_t cost_rpe = pw_unit_cost(l, hw.rpe.n);
    EnginePool pool(hw);
    for (int64_t p = 0; p < out.pixels(); ++p)
        for (int64_t t = 0; t < tiles; ++t) pool.assign(0, cost_mat, cost_rpe, true, true);
    return pool.makespan();
}

// DW work quantum: one M-pixel strip of one N-channel tile, k*k taps.
int64_t standalone_dw_cycles(const LayerDesc& l, const TensorShape& in,
                             const HardwareConfig& hw) {
    TensorShape out = infer_output_shape(l, in);
    const int64_t cost = static_cast<int64_t>(l.kernel) * l.kernel;
    const int64_t jobs = out.height * ceil_div(out.width, hw.rpe.m) *
                         ceil_div(l.in_channels, hw.rpe.n);
    EnginePool pool(hw);
    for (int64_t j = 0; j < jobs; ++j) pool.assign(0, 0, cost, false, true);
    return pool.makespan();
}

LayerDesc msa_qkv_desc(const LayerDesc& l, const MsaDims& md) {
    return LayerDesc{.name = l.name + ".qkv", .kind = LayerKind::PWConv,
                     .in_channels = l.in_channels, .out_channels = md.qkv_ch};
}

LayerDesc msa_agg_desc(const LayerDesc& l, const MsaDims& md, int s) {
    return LayerDesc{.name = l.name + ".agg", .kind = LayerKind::DWConv, .kernel = s,
                     .stride = 1, .padding = (s - 1) / 2, .in_channels = md.qkv_ch,
                     .out_channels = md.qkv_ch, .groups = md.qkv_ch};
}

LayerDesc msa_proj_desc(const LayerDesc& l, const MsaDims& md) {
    return LayerDesc{.name = l.name + ".proj", .kind = LayerKind::PWConv,
                     .in_channels = md.concat_ch, .out_channels = l.out_channels};
}

// Attention core costs. Z = ReLU(K)^T V is one job per (scale, head); the
// dividend/divisor MatMuls Q*Z and Q*k_rowsum deal per token.
struct MsaCosts {
    int64_t z_rpe, z_mat;
    int64_t qzd_rpe, qzd_mat;  // per token
};

MsaCosts msa_costs(const MsaDims& md, const HardwareConfig& hw) {
    const int64_t n = md.tokens, d = md.d;
    MsaCosts c;
    c.z_rpe = ceil_div(n, hw.rpe.n) * ceil_div(d, hw.rpe.m) * d;
    c.z_mat = ceil_div(n, hw.mat.t) * ceil_div(d, hw.mat.s) * d;
    c.qzd_rpe = ceil_div(d, hw.rpe.n) * ceil_div(d, hw.rpe.m) + ceil_div(d, hw.rpe.n);
    c.qzd_mat = ceil_div(d, hw.mat.t) * ceil_div(d, hw.mat.s) + ceil_div(d, hw.mat.t);
    return c;
}

// Phase-sequential attention: every stage drains before the next starts.
int64_t standalone_msa_cycles(const LayerDesc& l, const TensorShape& in,
                              const HardwareConfig& hw) {
    MsaDims md = msa_dims(l, in);
    const int64_t n = md.tokens, d = md.d;
    const int64_t instances = static_cast<int64_t>(l.msa_scales.size()) * md.heads;
    const MsaCosts costs = msa_costs(md, hw);
    int64_t total = standalone_pw_cycles(msa_qkv_desc(l, md), in, hw);

    TensorShape qkv_shape{1, md.qkv_ch, in.height, in.width};
    for (int s : l.msa_scales)
        if (s > 1) total += standalone_dw_cycles(msa_agg_desc(l, md, s), qkv_shape, hw);

    {
        EnginePool pool(hw);
        for (int64_t i = 0; i < instances; ++i)
            pool.assign(0, costs.z_mat, costs.z_rpe, true, true);
        total += pool.makespan();
    }
    total += static_cast<int64_t>(l.msa_scales.size()) * n;  // K-adder standalone passes

    {
        EnginePool pool(hw);
        for (int64_t i = 0; i < instances; ++i)
            for (int64_t t = 0; t < n; ++t)
                pool.assign(0, costs.qzd_mat, costs.qzd_rpe, true, true);
        total += pool.makespan();
    }
    total += ceil_div(instances * n * d, hw.divider_count);  // dividers standalone

    TensorShape concat_shape{1, md.concat_ch, in.height, in.width};
    total += standalone_pw_cycles(msa_proj_desc(l, md), concat_shape, hw);
    return total;
}

}  // namespace

int64_t standalone_compute_cycles(const LayerDesc& l, const TensorShape& in,
                                  const HardwareConfig& hw) {
    switch (l.kind) {
        case LayerKind::DWConv:
            return standalone_dw_cycles(l, in, hw);
        case LayerKind::GenericConv:
            if (l.groups != 1)
                throw ScheduleError("layer '" + l.name +
                                    "': grouped GenericConv is not supported by the engines");
            [[fallthrough]];
        case LayerKind::PWConv:
        case LayerKind::MatMul:
            return standalone_pw_cycles(l, in, hw);
        case LayerKind::MsaBlock:
            return standalone_msa_cycles(l, in, hw);
        case LayerKind::ResidualAdd:
            return 0;  // folded into the producing drain
    }
    return 0;
}

int64_t dw_row_ready_cycle(const LayerDesc& dw, const TensorShape& dw_in,
                           const HardwareConfig& hw, int64_t row) {
    TensorShape out = infer_output_shape(dw, dw_in);
    const int64_t per_row = ceil_div(out.width, hw.rpe.m) * ceil_div(dw.in_channels, hw.rpe.n);
    const int64_t c_dw = static_cast<int64_t>(dw.kernel) * dw.kernel;
    const int64_t last_job = (row + 1) * per_row - 1;  // strips deal row-major
    return c_dw * (last_job / hw.l + 1);
}

int64_t fused_dw_pw_compute_cycles(const LayerDesc& dw, const LayerDesc& pw,
                                   const TensorShape& dw_in, const HardwareConfig& hw,
                                   bool rpe_joins) {
    TensorShape mid = infer_output_shape(dw, dw_in);
    const int64_t c_dw = static_cast<int64_t>(dw.kernel) * dw.kernel;
    const int64_t dw_jobs = mid.height * ceil_div(mid.width, hw.rpe.m) *
                            ceil_div(dw.in_channels, hw.rpe.n);

    EnginePool pool(hw);
    // DW strips deal round-robin: RPE (j mod L) takes its strips back to back.
    for (int64_t i = 0; i < hw.l; ++i) {
        const int64_t share = i < dw_jobs ? (dw_jobs - 1 - i) / hw.l + 1 : 0;
        pool.rpe_free[static_cast<size_t>(i)] = c_dw * share;
    }
    const int64_t dw_finish = pool.makespan();

    TensorShape pw_out = infer_output_shape(pw, mid);
    const int64_t g = std::min(hw.rpe.m, hw.mat.s);
    const int64_t tiles = ceil_div(pw.out_channels, g);
    const int64_t cost_mat = pw_unit_cost(pw, hw.mat.t);
    const int64_t cost_rpe = pw_unit_cost(pw, hw.rpe.n);
    for (int64_t r = 0; r < pw_out.height; ++r) {
        const int64_t gate = dw_row_ready_cycle(dw, dw_in, hw, r);
        for (int64_t x = 0; x < pw_out.width; ++x)
            for (int64_t t = 0; t < tiles; ++t)
                pool.assign(gate, cost_mat, cost_rpe, true, rpe_joins);
    }
    return std::max(pool.makespan(), dw_finish);
}

int64_t msa_core_compute_cycles(const LayerDesc& msa, const TensorShape& in,
                                const HardwareConfig& hw) {
    MsaDims md = msa_dims(msa, in);
    MsaCosts costs = msa_costs(md, hw);

    EnginePool pool(hw);
    // Aggregation strips first (they gate the later scales), RPE only.
    std::vector<int64_t> agg_done(msa.msa_scales.size(), 0);
    for (size_t si = 0; si < msa.msa_scales.size(); ++si) {
        const int s = msa.msa_scales[si];
        if (s == 1) continue;
        const int64_t cost = static_cast<int64_t>(s) * s;
        const int64_t jobs = in.height * ceil_div(in.width, hw.rpe.m) *
                             ceil_div(md.qkv_ch, hw.rpe.n);
        for (int64_t j = 0; j < jobs; ++j)
            agg_done[si] = std::max(agg_done[si], pool.assign(0, 0, cost, false, true));
    }
    // One Z per (scale, head), gated on that scale's tokens; either engine
    // type runs a MatMul.
    std::vector<int64_t> z_done;
    z_done.reserve(msa.msa_scales.size() * static_cast<size_t>(md.heads));
    for (size_t si = 0; si < msa.msa_scales.size(); ++si)
        for (int64_t h = 0; h < md.heads; ++h)
            z_done.push_back(pool.assign(agg_done[si], costs.z_mat, costs.z_rpe, true, true));
    // Dividend/divisor MatMuls per token, gated on that instance's Z. The
    // K-adder shadows the Z stream and the divider bank shadows this drain,
    // so neither adds cycles here.
    for (int64_t zi : z_done)
        for (int64_t t = 0; t < md.tokens; ++t)
            pool.assign(zi, costs.qzd_mat, costs.qzd_rpe, true, true);
    return pool.makespan();
}

LayerTiming fused_dw_pw_timing(const LayerDesc& dw, const LayerDesc& pw,
                               const TensorShape& dw_in, const HardwareConfig& hw) {
    LayerTiming t;
    t.kind = GroupKind::DwPwFused;
    t.name = dw.name + "+" + pw.name;
    TensorShape mid = infer_output_shape(dw, dw_in);
    t.macs = layer_macs(dw, dw_in) + layer_macs(pw, mid);
    t.active_mac_cycles = t.macs;
    t.compute_cycles = fused_dw_pw_compute_cycles(dw, pw, dw_in, hw, true);
    t.dram_bytes = layer_dram_bytes(dw, dw_in, false, true) +
                   layer_dram_bytes(pw, mid, true, false);
    t.memory_cycles = ceil_div(t.dram_bytes, hw.dram_bytes_per_cycle);
    t.latency_cycles = std::max(t.compute_cycles, t.memory_cycles);
    return t;
}

LayerTiming fused_msa_timing(const LayerDesc& msa, const TensorShape& in,
                             const HardwareConfig& hw) {
    LayerTiming t;
    t.kind = GroupKind::MsaFused;
    t.name = msa.name;
    t.macs = layer_macs(msa, in);
    t.active_mac_cycles = t.macs;
    MsaDims md = msa_dims(msa, in);
    TensorShape concat_shape{1, md.concat_ch, in.height, in.width};
    t.compute_cycles = standalone_pw_cycles(msa_qkv_desc(msa, md), in, hw) +
                       msa_core_compute_cycles(msa, in, hw) +
                       standalone_pw_cycles(msa_proj_desc(msa, md), concat_shape, hw);
    t.dram_bytes = layer_dram_bytes(msa, in, false, false);
    t.memory_cycles = ceil_div(t.dram_bytes, hw.dram_bytes_per_cycle);
    t.latency_cycles = std::max(t.compute_cycles, t.memory_cycles);
    return t;
}

int64_t roofline_latency(int64_t compute_cycles, int64_t dram_bytes, const HardwareConfig& hw) {
    return std::max(compute_cycles, ceil_div(dram_bytes, hw.dram_bytes_per_cycle));
}

namespace {

void check_buffers(const NetworkGraph& g, const Schedule& s, const HardwareConfig& hw) {
    auto fail = [](const std::string& name, const std::string& what) {
        throw ScheduleError("buffer capacity: layer '" + name + "': " + what);
    };
    for (size_t i = 0; i < g.layers.size(); ++i) {
        const LayerInfo& li = g.layers[i];
        const LayerDesc& d = li.desc;
        if (d.kind == LayerKind::ResidualAdd) continue;
        // weights: one output-channel tile must fit buffer B
        const int64_t cig = d.kind == LayerKind::DWConv ? 1 : d.in_channels / d.groups;
        const int64_t tile_w = std::min<int64_t>(d.out_channels, std::min(hw.rpe.m, hw.mat.s)) *
                               cig * d.kernel * d.kernel;
        if (tile_w > hw.buffer_bytes.b)
            fail(d.name, "minimum weight tile of " + std::to_string(tile_w) +
                             " bytes exceeds buffer B");
        // double-buffered input/output rows in A and C
        if (2 * li.in_shape.width * li.in_shape.channels > hw.buffer_bytes.a)
            fail(d.name, "two input rows exceed buffer A");
        if (2 * li.out_shape.width * li.out_shape.channels > hw.buffer_bytes.c)
            fail(d.name, "two output rows exceed buffer C");
        if (d.kind == LayerKind::MsaBlock) {
            // divisor buffer holds one instance's 32-bit column; retile to a row
            if (4 * li.in_shape.pixels() > hw.buffer_bytes.divisor &&
                4 * li.in_shape.width > hw.buffer_bytes.divisor)
                fail(d.name, "divisor column exceeds the divisor buffer even row-tiled");
        }
    }
    for (const auto& grp : s.groups) {
        if (grp.kind != GroupKind::DwPwFused) continue;
        const LayerInfo& dw = g.layers[grp.members[0]];
        // fused intermediate rows ping-pong through aux; retile to M-pixel segments
        const int64_t row = dw.out_shape.width * dw.out_shape.channels;
        const int64_t seg = std::min<int64_t>(dw.out_shape.width, hw.rpe.m) *
                            dw.out_shape.channels;
        if (2 * row > hw.buffer_bytes.aux && 2 * seg > hw.buffer_bytes.aux)
            fail(dw.desc.name, "fused intermediate rows exceed the aux buffer even segmented");
    }
}

}  // namespace

Schedule plan_schedule(const NetworkGraph& g, const HardwareConfig& hw, bool enable_fusion) {
    validate_or_throw(g);
    Schedule s;
    s.fusion_enabled = enable_fusion;
    const int n = static_cast<int>(g.layers.size());
    for (int i = 0; i < n;) {
        const LayerKind kind = g.layers[i].desc.kind;
        if (!enable_fusion) {
            s.groups.push_back({GroupKind::Standalone, {i}});
            ++i;
            continue;
        }
        if (kind == LayerKind::ResidualAdd && !s.groups.empty()) {
            s.groups.back().members.push_back(i);
            ++i;
            continue;
        }
        if (kind == LayerKind::DWConv && i + 1 < n &&
            g.layers[i + 1].desc.kind == LayerKind::PWConv) {
            s.groups.push_back({GroupKind::DwPwFused, {i, i + 1}});
            i += 2;
            continue;
        }
        if (kind == LayerKind::MsaBlock) {
            s.groups.push_back({GroupKind::MsaFused, {i}});
            ++i;
            continue;
        }
        s.groups.push_back({GroupKind::Standalone, {i}});
        ++i;
    }
    check_buffers(g, s, hw);
    return s;
}

RunReport timing_report(const NetworkGraph& g, const Schedule& s, const HardwareConfig& hw) {
    RunReport rep;
    for (const auto& grp : s.groups) {
        LayerTiming t;
        t.kind = grp.kind;
        t.members = grp.members;
        t.stage = g.stage_tags[grp.members[0]];
        for (size_t m = 0; m < grp.members.size(); ++m) {
            const LayerInfo& li = g.layers[grp.members[m]];
            t.name += (m ? "+" : "") + li.desc.name;
            t.macs += layer_macs(li.desc, li.in_shape);
        }
        t.active_mac_cycles = t.macs;

        switch (grp.kind) {
            case GroupKind::DwPwFused: {
                const LayerInfo& dw = g.layers[grp.members[0]];
                const LayerInfo& pw = g.layers[grp.members[1]];
                t.compute_cycles = fused_dw_pw_compute_cycles(dw.desc, pw.desc, dw.in_shape, hw,
                                                              true);
                break;
            }
            case GroupKind::MsaFused: {
                const LayerInfo& li = g.layers[grp.members[0]];
                MsaDims md = msa_dims(li.desc, li.in_shape);
                TensorShape concat_shape{1, md.concat_ch, li.in_shape.height,
                                         li.in_shape.width};
                t.compute_cycles =
                    standalone_pw_cycles(msa_qkv_desc(li.desc, md), li.in_shape, hw) +
                    msa_core_compute_cycles(li.desc, li.in_shape, hw) +
                    standalone_pw_cycles(msa_proj_desc(li.desc, md), concat_shape, hw);
                break;
            }
            case GroupKind::Standalone:
                for (int m : grp.members)
                    t.compute_cycles +=
                        standalone_compute_cycles(g.layers[m].desc, g.layers[m].in_shape, hw);
                break;
        }

        for (size_t m = 0; m < grp.members.size(); ++m) {
            const LayerInfo& li = g.layers[grp.members[m]];
            const bool resadd_follows = m + 1 < grp.members.size() &&
                                        g.layers[grp.members[m + 1]].desc.kind ==
                                            LayerKind::ResidualAdd;
            bool fused_in = false, fused_out = resadd_follows;
            if (grp.kind == GroupKind::DwPwFused) {
                if (m == 0) fused_out = true;          // DW intermediate stays on chip
                if (m == 1) fused_in = true;           // PW reads it from aux
            }
            if (li.desc.kind == LayerKind::ResidualAdd) fused_in = true;  // main path on chip
            t.dram_bytes += layer_dram_bytes(li.desc, li.in_shape, fused_in, fused_out);
        }
        for (auto [src, dst] : g.residual_edges)
            for (int m : grp.members)
                if (dst == m) t.dram_bytes += g.layers[src].out_shape.numel();

        t.memory_cycles = ceil_div(t.dram_bytes, hw.dram_bytes_per_cycle);
        t.latency_cycles = std::max(t.compute_cycles, t.memory_cycles);

        rep.total_latency_cycles += t.latency_cycles;
        rep.total_active_mac_cycles += t.active_mac_cycles;
        rep.total_dram_bytes += t.dram_bytes;
        rep.total_macs += t.macs;
        rep.groups.push_back(std::move(t));
    }
    if (rep.total_latency_cycles > 0) {
        rep.utilization = static_cast<double>(rep.total_active_mac_cycles) /
                          (static_cast<double>(rep.total_latency_cycles) *
                           static_cast<double>(hw.total_multipliers()));
        rep.gops = 2.0 * static_cast<double>(rep.total_macs) * hw.clock_hz /
                   static_cast<double>(rep.total_latency_cycles) / 1e9;
        rep.seconds = static_cast<double>(rep.total_latency_cycles) / hw.clock_hz;
    }
    return rep;
}

SimResult simulate_schedule(const NetworkGraph& g, const Schedule& s, const QuantTensor& input,
                            const QNetWeights& w, const ScaleSet& scales,
                            const HardwareConfig& hw) {
    SimResult r;
    r.activations = run_quant_network(g, w, scales, input);
    r.report = timing_report(g, s, hw);
    return r;
}

}  // namespace evitsim
