#pragma once

#include <cstdint>
#include <vector>

#include "evitsim/graph.hpp"
#include "evitsim/tensor.hpp"

namespace evitsim {

// Conv/MatMul weights, row-major [out][in/groups][k][k].
struct ConvWeightsF {
    std::vector<double> w;
    std::vector<double> bias;
};

// MsaBlock bundle: qkv projection, per-scale depthwise aggregation
// (empty entry for scale 1), output projection.
struct LayerWeightsF {
    ConvWeightsF main;
    ConvWeightsF qkv;
    std::vector<ConvWeightsF> agg;  // parallel to msa_scales
    ConvWeightsF proj;
};

struct NetWeightsF {
    std::vector<LayerWeightsF> layers;
};

// Deterministic weights from a seed; independent of simulator internals.
// Layers declaring batch_norm get random BN parameters folded in.
NetWeightsF generate_weights(const NetworkGraph& g, uint64_t seed);

}  // namespace evitsim
