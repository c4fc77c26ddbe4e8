#pragma once

#include <string>
#include <vector>

#include "evitsim/graph.hpp"
#include "evitsim/tensor.hpp"
#include "evitsim/weights.hpp"

namespace evitsim {

// Per-scale-branch quantization scales for one MsaBlock. Dividends and
// divisors stay in 32-bit accumulators; only tokens, Z, and k_rowsum are
// requantized to 8 bits for re-entry into the 8-bit multipliers.
struct MsaScaleSet {
    double qkv = 1.0;
    std::vector<double> tok;  // per scale; equals qkv for scale 1
    std::vector<double> z;    // per scale
    std::vector<double> ks;   // per scale
    double attn = 1.0;        // concatenated attention output
};

struct ScaleSet {
    double input = 1.0;
    std::vector<double> act;       // per layer, post-activation post-residual
    std::vector<MsaScaleSet> msa;  // per layer; default-initialized unless MsaBlock
};

// Symmetric per-tensor scales: max |value| / 127 over the samples, 1.0 for
// all-zero tensors.
ScaleSet calibrate_scales(const NetworkGraph& g, const NetWeightsF& w,
                          const std::vector<FloatTensor>& samples);

std::string scales_to_json(const ScaleSet& s);
ScaleSet scales_from_json(const std::string& text);

}  // namespace evitsim
