#include "evitsim/qkernels.hpp"

#include <atomic>
#include <cmath>

namespace evitsim {

namespace {

QConvWeights quantize_conv(const ConvWeightsF& w, double in_scale, const std::string& what) {
    QConvWeights q;
    q.scale = choose_scale(w.w.data(), w.w.size());
    q.w.resize(w.w.size());
    for (size_t i = 0; i < w.w.size(); ++i) q.w[i] = quantize_value(w.w[i], q.scale);
    q.bias32.resize(w.bias.size());
    for (size_t i = 0; i < w.bias.size(); ++i) {
        double v = w.bias[i] / (in_scale * q.scale);
        if (std::fabs(v) > 2147483647.0)
            throw OverflowError("bias32 overflow in " + what);
        q.bias32[i] = static_cast<int32_t>(round_half_even(v));
    }
    return q;
}

}  // namespace

QNetWeights quantize_weights(const NetworkGraph& g, const NetWeightsF& w, const ScaleSet& scales) {
    QNetWeights qn;
    qn.layers.resize(g.layers.size());
    for (size_t i = 0; i < g.layers.size(); ++i) {
        const LayerDesc& d = g.layers[i].desc;
        const double in_scale = i == 0 ? scales.input : scales.act[i - 1];
        switch (d.kind) {
            case LayerKind::GenericConv:
            case LayerKind::DWConv:
            case LayerKind::PWConv:
            case LayerKind::MatMul:
                qn.layers[i].main = quantize_conv(w.layers[i].main, in_scale, d.name);
                break;
            case LayerKind::MsaBlock: {
                const MsaScaleSet& ms = scales.msa[i];
                QMsaWeights& qm = qn.layers[i].msa;
                qm.qkv = quantize_conv(w.layers[i].qkv, in_scale, d.name + ".qkv");
                qm.agg.resize(d.msa_scales.size());
                for (size_t si = 0; si < d.msa_scales.size(); ++si)
                    if (d.msa_scales[si] > 1)
                        qm.agg[si] = quantize_conv(w.layers[i].agg[si], ms.qkv,
                                                   d.name + ".agg" + std::to_string(si));
                qm.proj = quantize_conv(w.layers[i].proj, ms.attn, d.name + ".proj");
                break;
            }
            case LayerKind::ResidualAdd:
                break;
        }
    }
    return qn;
}

QuantTensor qlinear(const QuantTensor& x, const QConvWeights& w, const LayerDesc& desc,
                    const DrainSpec& drain) {
    if (x.shape.channels != desc.in_channels)
        throw ShapeError("qlinear: input " + x.shape.str() + " vs desc in_channels " +
                         std::to_string(desc.in_channels));
    const int64_t cig = desc.in_channels / desc.groups;
    const int64_t cog = desc.out_channels / desc.groups;
    const int64_t k = desc.kernel;
    const int64_t H = x.shape.height, W = x.shape.width;
    TensorShape os = infer_output_shape(desc, x.shape);
    QuantTensor out(os, QuantParams{drain.out_scale});
    const double acc_scale = x.params.scale * w.scale;
    std::atomic<bool> overflow{false};

#pragma omp parallel for collapse(2) schedule(static)
    for (int64_t co = 0; co < os.channels; ++co) {
        for (int64_t oy = 0; oy < os.height; ++oy) {
            const int64_t g = co / cog;
            for (int64_t ox = 0; ox < os.width; ++ox) {
                int64_t acc = 0;
                for (int64_t ci = 0; ci < cig; ++ci) {
                    const int64_t c = g * cig + ci;
                    for (int64_t ky = 0; ky < k; ++ky) {
                        const int64_t iy = oy * desc.stride + ky - desc.padding;
                        if (iy < 0 || iy >= H) continue;
                        for (int64_t kx = 0; kx < k; ++kx) {
                            const int64_t ix = ox * desc.stride + kx - desc.padding;
                            if (ix < 0 || ix >= W) continue;
                            acc += static_cast<int64_t>(x.at(c, iy, ix)) *
                                   w.w[((co * cig + ci) * k + ky) * k + kx];
                        }
                    }
                }
                acc += w.bias32[co];
                if (acc > INT32_MAX || acc < INT32_MIN) {
                    overflow.store(true, std::memory_order_relaxed);
                    continue;
                }
                const size_t flat = static_cast<size_t>((co * os.height + oy) * os.width + ox);
                out.data[flat] = drain_acc(static_cast<int32_t>(acc), acc_scale, drain,
                                           residual_sum_at(drain, flat));
            }
        }
    }
    if (overflow.load())
        throw OverflowError("int32 accumulator overflow in layer '" + desc.name + "'");
    return out;
}

namespace {

inline int8_t relu8(int8_t v) { return v > 0 ? v : 0; }

// token value for channel c, pixel p
inline int8_t tok_at(const QuantTensor& t, int64_t c, int64_t p) {
    return t.data[static_cast<size_t>(c * t.shape.pixels() + p)];
}

}  // namespace

QuantTensor qmsa(const QuantTensor& x, const LayerDesc& desc, const QMsaWeights& w,
                 const MsaScaleSet& ms, const DrainSpec& drain) {
    MsaDims md = msa_dims(desc, x.shape);
    const int64_t n = md.tokens, d = md.d;

    LayerDesc qkv_desc{.name = desc.name + ".qkv", .kind = LayerKind::PWConv,
                       .in_channels = desc.in_channels, .out_channels = md.qkv_ch};
    QuantTensor qkv = qlinear(x, w.qkv, qkv_desc, DrainSpec{Activation::None, ms.qkv});

    QuantTensor concat({1, md.concat_ch, x.shape.height, x.shape.width}, QuantParams{ms.attn});
    for (size_t si = 0; si < desc.msa_scales.size(); ++si) {
        const int s = desc.msa_scales[si];
        QuantTensor tokens;
        if (s == 1) {
            tokens = qkv;
        } else {
            LayerDesc agg{.name = desc.name + ".agg", .kind = LayerKind::DWConv, .kernel = s,
                          .stride = 1, .padding = (s - 1) / 2, .in_channels = md.qkv_ch,
                          .out_channels = md.qkv_ch, .groups = md.qkv_ch};
            tokens = qlinear(qkv, w.agg[si], agg, DrainSpec{Activation::None, ms.tok[si]});
        }
        const double tok_scale = tokens.params.scale;
        const double div_scale = attn_divider_scale(ms, si);

        for (int64_t h = 0; h < md.heads; ++h) {
            const int64_t q0 = h * d, k0 = md.t + h * d, v0 = 2 * md.t + h * d;

            // Z = ReLU(K)^T V and k_rowsum, requantized for the 8-bit datapath
            std::vector<int8_t> z8(static_cast<size_t>(d) * d);
            std::vector<int8_t> ks8(static_cast<size_t>(d));
            for (int64_t i = 0; i < d; ++i) {
                int64_t kssum = 0;
                for (int64_t t = 0; t < n; ++t) kssum += relu8(tok_at(tokens, k0 + i, t));
                ks8[i] = requantize(check_acc32(kssum, "k_rowsum"), tok_scale, ms.ks[si]);
                for (int64_t j = 0; j < d; ++j) {
                    int64_t acc = 0;
                    for (int64_t t = 0; t < n; ++t)
                        acc += static_cast<int64_t>(relu8(tok_at(tokens, k0 + i, t))) *
                               tok_at(tokens, v0 + j, t);
                    z8[i * d + j] = requantize(check_acc32(acc, "attention Z"),
                                               tok_scale * tok_scale, ms.z[si]);
                }
            }

#pragma omp parallel for schedule(static)
            for (int64_t t = 0; t < n; ++t) {
                int64_t dsr = 0;
                for (int64_t i = 0; i < d; ++i)
                    dsr += static_cast<int64_t>(relu8(tok_at(tokens, q0 + i, t))) * ks8[i];
                const int32_t dsr32 = check_acc32(dsr, "divisor");
                for (int64_t j = 0; j < d; ++j) {
                    int64_t dvd = 0;
                    for (int64_t i = 0; i < d; ++i)
                        dvd += static_cast<int64_t>(relu8(tok_at(tokens, q0 + i, t))) *
                               z8[i * d + j];
                    const int32_t r = fixed_divide(check_acc32(dvd, "dividend"), dsr32);
                    const int64_t ch = static_cast<int64_t>(si) * md.t + h * d + j;
                    concat.data[static_cast<size_t>(ch * n + t)] =
                        requantize(r, div_scale, ms.attn);
                }
            }
        }
    }

    LayerDesc proj{.name = desc.name + ".proj", .kind = LayerKind::PWConv,
                   .in_channels = md.concat_ch, .out_channels = desc.out_channels};
    return qlinear(concat, w.proj, proj, drain);
}

std::vector<QuantTensor> run_quant_network(const NetworkGraph& g, const QNetWeights& w,
                                           const ScaleSet& scales, const QuantTensor& input) {
    std::vector<QuantTensor> acts;
    acts.reserve(g.layers.size());
    for (size_t i = 0; i < g.layers.size(); ++i) {
        const LayerInfo& li = g.layers[i];
        const QuantTensor& in = i == 0 ? input : acts[i - 1];
        DrainSpec drain{li.desc.activation, scales.act[i]};
        for (auto [src, dst] : g.residual_edges)
            if (dst == static_cast<int>(i)) drain.residuals.push_back(&acts[src]);

        QuantTensor out;
        switch (li.desc.kind) {
            case LayerKind::MsaBlock:
                out = qmsa(in, li.desc, w.layers[i].msa, scales.msa[i], drain);
                break;
            case LayerKind::ResidualAdd: {
                out = QuantTensor(li.out_shape, QuantParams{drain.out_scale});
                const QuantTensor& src = acts[li.desc.residual_src];
                for (size_t e = 0; e < out.data.size(); ++e) {
                    double v = in.data[e] * in.params.scale + src.data[e] * src.params.scale +
                               residual_sum_at(drain, e);
                    out.data[e] = clamp_i8(round_half_even(v / drain.out_scale));
                }
                break;
            }
            default:
                out = qlinear(in, w.layers[i].main, li.desc, drain);
        }
        acts.push_back(std::move(out));
    }
    return acts;
}

}  // namespace evitsim
