#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "evitsim/tensor.hpp"

namespace evitsim {

struct ConfigError : SimError {
    using SimError::SimError;
};

enum class LayerKind { GenericConv, DWConv, PWConv, MatMul, MsaBlock, ResidualAdd };
enum class Activation { None, ReLU, Hardswish };
enum class Stage { Conv, DSConv, S1, S2, S3, S4 };

const char* to_string(LayerKind k);
const char* to_string(Activation a);
const char* to_string(Stage s);
LayerKind layer_kind_from_string(const std::string& s);
Activation activation_from_string(const std::string& s);
Stage stage_from_string(const std::string& s);

struct LayerDesc {
    std::string name;
    LayerKind kind = LayerKind::GenericConv;
    int kernel = 1;
    int stride = 1;
    int padding = 0;
    int64_t in_channels = 1;
    int64_t out_channels = 1;
    int64_t groups = 1;
    Activation activation = Activation::None;
    bool bn_folded = false;       // config declared a BN; folded into weights at materialization
    int64_t msa_dim = 0;          // attention head dimension d
    std::vector<int> msa_scales;  // aggregation kernel sizes; 1 = unaggregated tokens
    int residual_src = -1;        // ResidualAdd: index of the layer whose output is added
};

struct LayerInfo {
    LayerDesc desc;
    TensorShape in_shape;
    TensorShape out_shape;
};

// Layers form a chain; residual_edges (src, dst) add layer src's output into
// layer dst's output during dst's drain (single requantization).
struct NetworkGraph {
    TensorShape input_shape;
    std::vector<LayerInfo> layers;
    std::vector<Stage> stage_tags;  // one per layer
    std::vector<std::pair<int, int>> residual_edges;
};

// Derived MSA dimensions. heads = C/d; per-head Q/K/V width d; the qkv
// projection emits 3*T channels with T = heads*d.
struct MsaDims {
    int64_t heads = 0;
    int64_t d = 0;
    int64_t t = 0;          // heads * d
    int64_t tokens = 0;     // H * W
    int64_t qkv_ch = 0;     // 3 * t
    int64_t concat_ch = 0;  // t * scale count
};
MsaDims msa_dims(const LayerDesc& l, const TensorShape& in);

TensorShape infer_output_shape(const LayerDesc& l, const TensorShape& in);

// Full invariant sweep; returns every violation, never stops at the first.
std::vector<std::string> validate_graph(const NetworkGraph& g);
void validate_or_throw(const NetworkGraph& g);

int64_t layer_weight_elems(const LayerDesc& l);
int64_t layer_macs(const LayerDesc& l, const TensorShape& in);
int64_t layer_dram_bytes(const LayerDesc& l, const TensorShape& in, bool fused_input,
                         bool fused_output);

int64_t graph_macs(const NetworkGraph& g);

}  // namespace evitsim
