#include "evitsim/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace evitsim {

FloatTensor conv2d_ref(const FloatTensor& x, const std::vector<double>& w,
                       const std::vector<double>& bias, const LayerDesc& desc) {
    if (x.shape.channels != desc.in_channels)
        throw ShapeError("conv2d_ref: input " + x.shape.str() + " vs desc in_channels " +
                         std::to_string(desc.in_channels));
    const int64_t cig = desc.in_channels / desc.groups;   // input channels per group
    const int64_t cog = desc.out_channels / desc.groups;  // output channels per group
    const int64_t k = desc.kernel;
    if (static_cast<int64_t>(w.size()) != desc.out_channels * cig * k * k)
        throw ShapeError("conv2d_ref: weight size " + std::to_string(w.size()) +
                         " does not match descriptor");
    if (static_cast<int64_t>(bias.size()) != desc.out_channels)
        throw ShapeError("conv2d_ref: bias size mismatch");

    TensorShape os = infer_output_shape(desc, x.shape);
    FloatTensor out(os);
    const int64_t H = x.shape.height, W = x.shape.width;

#pragma omp parallel for collapse(2) schedule(static)
    for (int64_t co = 0; co < os.channels; ++co) {
        for (int64_t oy = 0; oy < os.height; ++oy) {
            const int64_t g = co / cog;
            for (int64_t ox = 0; ox < os.width; ++ox) {
                double acc = bias[co];
                for (int64_t ci = 0; ci < cig; ++ci) {
                    const int64_t c = g * cig + ci;
                    for (int64_t ky = 0; ky < k; ++ky) {
                        const int64_t iy = oy * desc.stride + ky - desc.padding;
                        if (iy < 0 || iy >= H) continue;
                        for (int64_t kx = 0; kx < k; ++kx) {
                            const int64_t ix = ox * desc.stride + kx - desc.padding;
                            if (ix < 0 || ix >= W) continue;
                            acc += x.at(c, iy, ix) * w[((co * cig + ci) * k + ky) * k + kx];
                        }
                    }
                }
                out.at(co, oy, ox) = acc;
            }
        }
    }
    return out;
}

double apply_activation(double v, Activation a) {
    switch (a) {
        case Activation::None: return v;
        case Activation::ReLU: return v > 0 ? v : 0;
        case Activation::Hardswish: return v * std::min(std::max(v + 3.0, 0.0), 6.0) / 6.0;
    }
    return v;
}

FloatTensor activation_ref(const FloatTensor& x, Activation kind) {
    FloatTensor out(x.shape);
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < static_cast<int64_t>(x.data.size()); ++i)
        out.data[i] = apply_activation(x.data[i], kind);
    return out;
}

void fold_batchnorm(std::vector<double>& w, std::vector<double>& bias,
                    const std::vector<double>& gamma, const std::vector<double>& beta,
                    const std::vector<double>& mean, const std::vector<double>& var, double eps,
                    int64_t out_channels) {
    const int64_t per_ch = static_cast<int64_t>(w.size()) / out_channels;
    for (int64_t co = 0; co < out_channels; ++co) {
        const double s = gamma[co] / std::sqrt(var[co] + eps);
        for (int64_t i = 0; i < per_ch; ++i) w[co * per_ch + i] *= s;
        bias[co] = (bias[co] - mean[co]) * s + beta[co];
    }
}

FloatTensor relu_linear_attention_ref(const FloatTensor& q, const FloatTensor& k,
                                      const FloatTensor& v) {
    const int64_t n = q.shape.height, d = q.shape.width;
    if (!(k.shape == q.shape) || !(v.shape == q.shape))
        throw ShapeError("attention operands must share an n x d shape");
    auto relu = [](double x) { return x > 0 ? x : 0.0; };

    // Z = ReLU(K)^T V  (d x d), k_rowsum_j = sum_t ReLU(K)_tj
    std::vector<double> z(static_cast<size_t>(d) * d, 0.0), ks(static_cast<size_t>(d), 0.0);
    for (int64_t t = 0; t < n; ++t) {
        for (int64_t i = 0; i < d; ++i) {
            const double kv = relu(k.at(0, t, i));
            ks[i] += kv;
            if (kv == 0.0) continue;
            for (int64_t j = 0; j < d; ++j) z[i * d + j] += kv * v.at(0, t, j);
        }
    }

    FloatTensor out(q.shape);
#pragma omp parallel for schedule(static)
    for (int64_t t = 0; t < n; ++t) {
        double den = 0;
        for (int64_t i = 0; i < d; ++i) den += relu(q.at(0, t, i)) * ks[i];
        for (int64_t j = 0; j < d; ++j) {
            if (den == 0.0) {
                out.at(0, t, j) = 0.0;
                continue;
            }
            double num = 0;
            for (int64_t i = 0; i < d; ++i) num += relu(q.at(0, t, i)) * z[i * d + j];
            out.at(0, t, j) = num / den;
        }
    }
    return out;
}

double tensor_max_abs(const FloatTensor& t) {
    double m = 0;
    for (double v : t.data) m = std::max(m, std::fabs(v));
    return m;
}

// Copies an n x d head slice out of a (1, C, H, W) token tensor.
static FloatTensor head_slice(const FloatTensor& t, int64_t ch0, int64_t d) {
    const int64_t n = t.shape.pixels();
    FloatTensor m({1, 1, n, d});
    for (int64_t c = 0; c < d; ++c)
        for (int64_t p = 0; p < n; ++p)
            m.at(0, p, c) = t.data[(ch0 + c) * n + p];
    return m;
}

FloatTensor multi_scale_msa_ref(const FloatTensor& x, const LayerDesc& desc,
                                const LayerWeightsF& w, MsaTrace* trace) {
    MsaDims md = msa_dims(desc, x.shape);
    const int64_t n = md.tokens;

    LayerDesc qkv_desc{.name = desc.name + ".qkv", .kind = LayerKind::PWConv,
                       .in_channels = desc.in_channels, .out_channels = md.qkv_ch};
    FloatTensor qkv = conv2d_ref(x, w.qkv.w, w.qkv.bias, qkv_desc);
    if (trace) {
        trace->qkv = tensor_max_abs(qkv);
        trace->tok.assign(desc.msa_scales.size(), 0.0);
        trace->z.assign(desc.msa_scales.size(), 0.0);
        trace->ks.assign(desc.msa_scales.size(), 0.0);
    }

    FloatTensor concat({1, md.concat_ch, x.shape.height, x.shape.width});
    for (size_t si = 0; si < desc.msa_scales.size(); ++si) {
        const int s = desc.msa_scales[si];
        FloatTensor tokens;
        if (s == 1) {
            tokens = qkv;
        } else {
            LayerDesc agg{.name = desc.name + ".agg", .kind = LayerKind::DWConv, .kernel = s,
                          .stride = 1, .padding = (s - 1) / 2, .in_channels = md.qkv_ch,
                          .out_channels = md.qkv_ch, .groups = md.qkv_ch};
            tokens = conv2d_ref(qkv, w.agg[si].w, w.agg[si].bias, agg);
        }
        if (trace) trace->tok[si] = tensor_max_abs(tokens);

        for (int64_t h = 0; h < md.heads; ++h) {
            FloatTensor qm = head_slice(tokens, h * md.d, md.d);
            FloatTensor km = head_slice(tokens, md.t + h * md.d, md.d);
            FloatTensor vm = head_slice(tokens, 2 * md.t + h * md.d, md.d);
            if (trace) {
                auto relu = [](double v) { return v > 0 ? v : 0.0; };
                for (int64_t i = 0; i < md.d; ++i) {
                    double kssum = 0;
                    for (int64_t t = 0; t < n; ++t) kssum += relu(km.at(0, t, i));
                    trace->ks[si] = std::max(trace->ks[si], kssum);
                    for (int64_t j = 0; j < md.d; ++j) {
                        double zv = 0;
                        for (int64_t t = 0; t < n; ++t) zv += relu(km.at(0, t, i)) * vm.at(0, t, j);
                        trace->z[si] = std::max(trace->z[si], std::fabs(zv));
                    }
                }
            }
            FloatTensor o = relu_linear_attention_ref(qm, km, vm);
            const int64_t ch0 = static_cast<int64_t>(si) * md.t + h * md.d;
            for (int64_t c = 0; c < md.d; ++c)
                for (int64_t p = 0; p < n; ++p) concat.data[(ch0 + c) * n + p] = o.at(0, p, c);
        }
    }
    if (trace) trace->attn = tensor_max_abs(concat);

    LayerDesc proj{.name = desc.name + ".proj", .kind = LayerKind::PWConv,
                   .in_channels = md.concat_ch, .out_channels = desc.out_channels};
    FloatTensor out = conv2d_ref(concat, w.proj.w, w.proj.bias, proj);
    return activation_ref(out, desc.activation);
}

std::vector<FloatTensor> run_float_network(const NetworkGraph& g, const NetWeightsF& w,
                                           const FloatTensor& input,
                                           std::vector<MsaTrace>* traces) {
    if (!(input.shape == g.input_shape))
        throw ShapeError("network input " + input.shape.str() + " vs expected " +
                         g.input_shape.str());
    if (traces) traces->assign(g.layers.size(), MsaTrace{});

    std::vector<FloatTensor> acts;
    acts.reserve(g.layers.size());
    for (size_t i = 0; i < g.layers.size(); ++i) {
        const LayerInfo& li = g.layers[i];
        const FloatTensor& in = i == 0 ? input : acts[i - 1];
        FloatTensor out;
        switch (li.desc.kind) {
            case LayerKind::MsaBlock:
                out = multi_scale_msa_ref(in, li.desc, w.layers[i],
                                          traces ? &(*traces)[i] : nullptr);
                break;
            case LayerKind::ResidualAdd: {
                out = in;
                const FloatTensor& src = acts[li.desc.residual_src];
                for (size_t e = 0; e < out.data.size(); ++e) out.data[e] += src.data[e];
                break;
            }
            default:
                out = activation_ref(conv2d_ref(in, w.layers[i].main.w, w.layers[i].main.bias,
                                                li.desc),
                                     li.desc.activation);
        }
        for (auto [src, dst] : g.residual_edges) {
            if (dst != static_cast<int>(i)) continue;
            const FloatTensor& s = acts[src];
            for (size_t e = 0; e < out.data.size(); ++e) out.data[e] += s.data[e];
        }
        acts.push_back(std::move(out));
    }
    return acts;
}

}  // namespace evitsim
