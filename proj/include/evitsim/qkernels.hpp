#pragma once

#include <cstdint>
#include <vector>

#include "evitsim/calibrate.hpp"
#include "evitsim/graph.hpp"
#include "evitsim/kernels.hpp"
#include "evitsim/quant.hpp"
#include "evitsim/tensor.hpp"
#include "evitsim/weights.hpp"

namespace evitsim {

// int8 weights plus 32-bit bias already rescaled into the accumulator domain:
// bias32 = round_half_even(bias / (input_scale * weight_scale)).
struct QConvWeights {
    std::vector<int8_t> w;
    double scale = 1.0;
    std::vector<int32_t> bias32;
};

struct QMsaWeights {
    QConvWeights qkv;
    std::vector<QConvWeights> agg;  // parallel to msa_scales
    QConvWeights proj;
};

struct QLayerWeights {
    QConvWeights main;
    QMsaWeights msa;
};

struct QNetWeights {
    std::vector<QLayerWeights> layers;
};

QNetWeights quantize_weights(const NetworkGraph& g, const NetWeightsF& w, const ScaleSet& scales);

// Accumulator drain: dequantize, activation, residual adds, single
// requantization to the output scale. Residual tensors carry their own scale.
struct DrainSpec {
    Activation act = Activation::None;
    double out_scale = 1.0;
    std::vector<const QuantTensor*> residuals;
};

inline int8_t drain_acc(int32_t acc, double acc_scale, const DrainSpec& d, double residual_sum) {
    double v = apply_activation(static_cast<double>(acc) * acc_scale, d.act);
    v += residual_sum;
    return clamp_i8(round_half_even(v / d.out_scale));
}

inline double residual_sum_at(const DrainSpec& d, size_t flat_index) {
    double r = 0;
    for (const QuantTensor* t : d.residuals)
        r += static_cast<double>(t->data[flat_index]) * t->params.scale;
    return r;
}

// Requantization factor applied to divider outputs before they re-enter the
// 8-bit domain: value = r * z_scale / (256 * ks_scale).
inline double attn_divider_scale(const MsaScaleSet& ms, size_t si) {
    return ms.z[si] / (256.0 * ms.ks[si]);
}

// Integer conv/matmul with 32-bit accumulation and drain requantization;
// bit-exact ground truth for the engine simulators.
QuantTensor qlinear(const QuantTensor& x, const QConvWeights& w, const LayerDesc& desc,
                    const DrainSpec& drain);

// Fixed-point multi-scale attention pipeline. Tokens, Z, and k_rowsum are
// requantized to int8; dividends/divisors stay int32 through the dividers.
QuantTensor qmsa(const QuantTensor& x, const LayerDesc& desc, const QMsaWeights& w,
                 const MsaScaleSet& ms, const DrainSpec& drain);

// Quantized forward pass over the whole graph; the timing simulator reuses
// these values since fusion never changes them.
std::vector<QuantTensor> run_quant_network(const NetworkGraph& g, const QNetWeights& w,
                                           const ScaleSet& scales, const QuantTensor& input);

}  // namespace evitsim
