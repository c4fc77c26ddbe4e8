#include "evitsim/graph.hpp"

#include <sstream>

namespace evitsim {

const char* to_string(LayerKind k) {
    switch (k) {
        case LayerKind::GenericConv: return "GenericConv";
        case LayerKind::DWConv: return "DWConv";
        case LayerKind::PWConv: return "PWConv";
        case LayerKind::MatMul: return "MatMul";
        case LayerKind::MsaBlock: return "MsaBlock";
        case LayerKind::ResidualAdd: return "ResidualAdd";
    }
    return "?";
}

const char* to_string(Activation a) {
    switch (a) {
        case Activation::None: return "none";
        case Activation::ReLU: return "relu";
        case Activation::Hardswish: return "hardswish";
    }
    return "?";
}

const char* to_string(Stage s) {
    switch (s) {
        case Stage::Conv: return "Conv";
        case Stage::DSConv: return "DSConv";
        case Stage::S1: return "S1";
        case Stage::S2: return "S2";
        case Stage::S3: return "S3";
        case Stage::S4: return "S4";
    }
    return "?";
}

LayerKind layer_kind_from_string(const std::string& s) {
    if (s == "GenericConv") return LayerKind::GenericConv;
    if (s == "DWConv") return LayerKind::DWConv;
    if (s == "PWConv") return LayerKind::PWConv;
    if (s == "MatMul") return LayerKind::MatMul;
    if (s == "MsaBlock") return LayerKind::MsaBlock;
    if (s == "ResidualAdd") return LayerKind::ResidualAdd;
    throw ConfigError("unknown layer kind '" + s + "'");
}

Activation activation_from_string(const std::string& s) {
    if (s == "none") return Activation::None;
    if (s == "relu") return Activation::ReLU;
    if (s == "hardswish") return Activation::Hardswish;
    throw ConfigError("unknown activation '" + s + "'");
}

Stage stage_from_string(const std::string& s) {
    if (s == "Conv") return Stage::Conv;
    if (s == "DSConv") return Stage::DSConv;
    if (s == "S1") return Stage::S1;
    if (s == "S2") return Stage::S2;
    if (s == "S3") return Stage::S3;
    if (s == "S4") return Stage::S4;
    throw ConfigError("unknown stage tag '" + s + "'");
}

MsaDims msa_dims(const LayerDesc& l, const TensorShape& in) {
    MsaDims d;
    d.d = l.msa_dim;
    d.heads = l.msa_dim > 0 ? in.channels / l.msa_dim : 0;
    d.t = d.heads * d.d;
    d.tokens = in.pixels();
    d.qkv_ch = 3 * d.t;
    d.concat_ch = d.t * static_cast<int64_t>(l.msa_scales.size());
    return d;
}

TensorShape infer_output_shape(const LayerDesc& l, const TensorShape& in) {
    TensorShape out = in;
    switch (l.kind) {
        case LayerKind::GenericConv:
        case LayerKind::DWConv: {
            int64_t h = (in.height + 2 * l.padding - l.kernel) / l.stride + 1;
            int64_t w = (in.width + 2 * l.padding - l.kernel) / l.stride + 1;
            if (h < 1 || w < 1)
                throw ShapeError("layer '" + l.name + "': kernel " + std::to_string(l.kernel) +
                                 " does not fit input " + in.str());
            out.channels = l.out_channels;
            out.height = h;
            out.width = w;
            break;
        }
        case LayerKind::PWConv:
        case LayerKind::MatMul:
            out.channels = l.out_channels;
            break;
        case LayerKind::MsaBlock:
            out.channels = l.out_channels;
            break;
        case LayerKind::ResidualAdd:
            break;
    }
    return out;
}

static void check_layer(const LayerDesc& l, const TensorShape& in, int idx,
                        std::vector<std::string>& errs) {
    auto err = [&](const std::string& m) {
        errs.push_back("layer " + std::to_string(idx) + " '" + l.name + "': " + m);
    };
    if (l.kernel < 1) err("kernel must be >= 1");
    if (l.stride != 1 && l.stride != 2) err("stride must be 1 or 2");
    if (l.padding < 0) err("padding must be >= 0");
    if (l.in_channels < 1 || l.out_channels < 1) err("channel counts must be >= 1");
    if (l.in_channels != in.channels)
        err("in_channels " + std::to_string(l.in_channels) + " does not match incoming tensor " +
            in.str());
    switch (l.kind) {
        case LayerKind::GenericConv:
            if (l.groups < 1 || l.in_channels % l.groups || l.out_channels % l.groups)
                err("groups must divide in_channels and out_channels");
            break;
        case LayerKind::DWConv:
            if (!(l.groups == l.in_channels && l.in_channels == l.out_channels))
                err("DWConv requires groups = in_channels = out_channels");
            break;
        case LayerKind::PWConv:
            if (l.kernel != 1) err("PWConv requires kernel=1");
            if (l.stride != 1) err("PWConv requires stride=1");
            if (l.padding != 0) err("PWConv requires padding=0");
            if (l.groups != 1) err("PWConv requires groups=1");
            break;
        case LayerKind::MatMul:
            if (l.kernel != 1 || l.stride != 1 || l.padding != 0)
                err("MatMul requires kernel=1, stride=1, padding=0");
            break;
        case LayerKind::MsaBlock: {
            if (l.in_channels != l.out_channels) err("MsaBlock requires in_channels = out_channels");
            if (l.msa_dim < 1)
                err("MsaBlock requires msa_dim >= 1");
            else if (l.in_channels % l.msa_dim)
                err("msa_dim must divide in_channels");
            if (l.msa_scales.empty()) err("MsaBlock requires at least one scale");
            for (int s : l.msa_scales)
                if (s < 1 || s % 2 == 0) err("msa scale kernels must be odd and >= 1");
            break;
        }
        case LayerKind::ResidualAdd:
            break;
    }
}

std::vector<std::string> validate_graph(const NetworkGraph& g) {
    std::vector<std::string> errs;
    if (g.input_shape.batch != 1) errs.push_back("input batch must be 1");
    if (g.input_shape.channels < 1 || g.input_shape.height < 1 || g.input_shape.width < 1)
        errs.push_back("input dims must be >= 1");
    if (g.stage_tags.size() != g.layers.size())
        errs.push_back("stage_tags must cover every layer exactly once");

    TensorShape cur = g.input_shape;
    for (size_t i = 0; i < g.layers.size(); ++i) {
        const LayerInfo& li = g.layers[i];
        if (!(li.in_shape == cur))
            errs.push_back("layer " + std::to_string(i) + " '" + li.desc.name +
                           "': input shape " + li.in_shape.str() +
                           " does not match upstream tensor " + cur.str());
        check_layer(li.desc, li.in_shape, static_cast<int>(i), errs);
        if (li.desc.kind == LayerKind::ResidualAdd) {
            int src = li.desc.residual_src;
            if (src < 0 || src >= static_cast<int>(i))
                errs.push_back("layer " + std::to_string(i) + " '" + li.desc.name +
                               "': residual source must name an earlier layer");
            else if (!(g.layers[src].out_shape == li.in_shape))
                errs.push_back("residual add '" + li.desc.name + "' input " + li.in_shape.str() +
                               " does not match source '" + g.layers[src].desc.name + "' output " +
                               g.layers[src].out_shape.str());
        }
        try {
            TensorShape want = infer_output_shape(li.desc, li.in_shape);
            if (!(li.out_shape == want))
                errs.push_back("layer " + std::to_string(i) + " '" + li.desc.name +
                               "': output shape " + li.out_shape.str() + " should be " + want.str());
            cur = li.out_shape;
        } catch (const ShapeError& e) {
            errs.push_back(e.what());
            cur = li.out_shape;
        }
    }
    for (auto [src, dst] : g.residual_edges) {
        if (src < 0 || dst < 0 || src >= static_cast<int>(g.layers.size()) ||
            dst >= static_cast<int>(g.layers.size()) || src >= dst) {
            errs.push_back("residual edge (" + std::to_string(src) + ", " + std::to_string(dst) +
                           ") out of range");
            continue;
        }
        if (!(g.layers[src].out_shape == g.layers[dst].out_shape))
            errs.push_back("residual edge connects unequal shapes: '" + g.layers[src].desc.name +
                           "' " + g.layers[src].out_shape.str() + " vs '" +
                           g.layers[dst].desc.name + "' " + g.layers[dst].out_shape.str());
    }
    return errs;
}

void validate_or_throw(const NetworkGraph& g) {
    auto errs = validate_graph(g);
    if (errs.empty()) return;
    std::ostringstream os;
    os << "invalid network (" << errs.size() << " errors):";
    for (const auto& e : errs) os << "\n  " << e;
    throw ConfigError(os.str());
}

int64_t layer_weight_elems(const LayerDesc& l) {
    int64_t k2 = static_cast<int64_t>(l.kernel) * l.kernel;
    switch (l.kind) {
        case LayerKind::GenericConv:
            return l.out_channels * (l.in_channels / l.groups) * k2;
        case LayerKind::DWConv:
            return l.in_channels * k2;
        case LayerKind::PWConv:
        case LayerKind::MatMul:
            return l.out_channels * l.in_channels;
        case LayerKind::MsaBlock: {
            // qkv + per-scale depthwise aggregation + output projection
            int64_t t = l.in_channels;  // heads*d with heads = C/d
            int64_t elems = 3 * t * l.in_channels;
            for (int s : l.msa_scales)
                if (s > 1) elems += 3 * t * static_cast<int64_t>(s) * s;
            elems += t * static_cast<int64_t>(l.msa_scales.size()) * l.out_channels;
            return elems;
        }
        case LayerKind::ResidualAdd:
            return 0;
    }
    return 0;
}

int64_t layer_macs(const LayerDesc& l, const TensorShape& in) {
    TensorShape out = infer_output_shape(l, in);
    int64_t k2 = static_cast<int64_t>(l.kernel) * l.kernel;
    switch (l.kind) {
        case LayerKind::GenericConv:
            return out.pixels() * l.out_channels * (l.in_channels / l.groups) * k2;
        case LayerKind::DWConv:
            return out.pixels() * l.in_channels * k2;
        case LayerKind::PWConv:
        case LayerKind::MatMul:
            return out.pixels() * l.in_channels * l.out_channels;
        case LayerKind::MsaBlock: {
            MsaDims m = msa_dims(l, in);
            int64_t n = m.tokens;
            int64_t macs = n * l.in_channels * m.qkv_ch;  // qkv projection
            for (int s : l.msa_scales) {
                if (s > 1) macs += n * m.qkv_ch * static_cast<int64_t>(s) * s;  // aggregation
                // per head: Z (n*d*d), Q*Z (n*d*d), Q*k_rowsum (n*d)
                macs += m.heads * (2 * n * m.d * m.d + n * m.d);
            }
            macs += n * m.concat_ch * l.out_channels;  // projection
            return macs;
        }
        case LayerKind::ResidualAdd:
            return 0;
    }
    return 0;
}

int64_t layer_dram_bytes(const LayerDesc& l, const TensorShape& in, bool fused_input,
                         bool fused_output) {
    TensorShape out = infer_output_shape(l, in);
    int64_t bytes = layer_weight_elems(l);  // 1 byte per element
    if (!fused_input) bytes += in.numel();
    if (l.kind == LayerKind::ResidualAdd) bytes += in.numel();  // source branch always read
    if (!fused_output) bytes += out.numel();
    return bytes;
}

int64_t graph_macs(const NetworkGraph& g) {
    int64_t total = 0;
    for (const auto& li : g.layers) total += layer_macs(li.desc, li.in_shape);
    return total;
}

}  // namespace evitsim
