#include "evitsim/weights.hpp"

#include <cmath>

#include "evitsim/kernels.hpp"

namespace evitsim {

namespace {

uint64_t mix(uint64_t seed, uint64_t idx, uint64_t tag) {
    uint64_t h = seed ^ (0x9e3779b97f4a7c15ull + idx * 0xff51afd7ed558ccdull + tag);
    h ^= h >> 33;
    h *= 0xc4ceb9fe1a85ec53ull;
    h ^= h >> 33;
    return h;
}

ConvWeightsF gen_conv(Rng& rng, int64_t out_ch, int64_t fan_in, int64_t elems, bool bn) {
    ConvWeightsF cw;
    cw.w.resize(static_cast<size_t>(elems));
    cw.bias.resize(static_cast<size_t>(out_ch));
    const double std = std::sqrt(2.0 / static_cast<double>(fan_in));
    for (auto& v : cw.w) v = rng.gaussian(0.0, std);
    for (auto& v : cw.bias) v = rng.uniform(-0.05, 0.05);
    if (bn) {
        std::vector<double> gamma(out_ch), beta(out_ch), mean(out_ch), var(out_ch);
        for (int64_t c = 0; c < out_ch; ++c) {
            gamma[c] = rng.uniform(0.7, 1.3);
            beta[c] = rng.uniform(-0.1, 0.1);
            mean[c] = rng.uniform(-0.1, 0.1);
            var[c] = rng.uniform(0.5, 1.5);
        }
        fold_batchnorm(cw.w, cw.bias, gamma, beta, mean, var, 1e-5, out_ch);
    }
    return cw;
}

}  // namespace

NetWeightsF generate_weights(const NetworkGraph& g, uint64_t seed) {
    NetWeightsF nw;
    nw.layers.resize(g.layers.size());
    for (size_t i = 0; i < g.layers.size(); ++i) {
        const LayerDesc& d = g.layers[i].desc;
        LayerWeightsF& lw = nw.layers[i];
        Rng rng(mix(seed, i, 0));
        const int64_t k2 = static_cast<int64_t>(d.kernel) * d.kernel;
        switch (d.kind) {
            case LayerKind::GenericConv:
            case LayerKind::DWConv:
            case LayerKind::PWConv:
            case LayerKind::MatMul: {
                const int64_t cig = d.in_channels / d.groups;
                lw.main = gen_conv(rng, d.out_channels, cig * k2, d.out_channels * cig * k2,
                                   d.bn_folded);
                break;
            }
            case LayerKind::MsaBlock: {
                MsaDims m = msa_dims(d, g.layers[i].in_shape);
                lw.qkv = gen_conv(rng, m.qkv_ch, d.in_channels, m.qkv_ch * d.in_channels, false);
                lw.agg.resize(d.msa_scales.size());
                for (size_t si = 0; si < d.msa_scales.size(); ++si) {
                    const int s = d.msa_scales[si];
                    if (s == 1) continue;
                    Rng arng(mix(seed, i, 1 + si));
                    lw.agg[si] = gen_conv(arng, m.qkv_ch, static_cast<int64_t>(s) * s,
                                          m.qkv_ch * s * s, false);
                }
                Rng prng(mix(seed, i, 100));
                lw.proj = gen_conv(prng, d.out_channels, m.concat_ch,
                                   d.out_channels * m.concat_ch, d.bn_folded);
                break;
            }
            case LayerKind::ResidualAdd:
                break;
        }
    }
    return nw;
}

}  // namespace evitsim
