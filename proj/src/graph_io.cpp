#include "evitsim/graph_io.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace evitsim {

using nlohmann::json;

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << text;
}

static TensorShape parse_shape(const json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 4)
        throw ConfigError(what + " must be an array [batch, channels, height, width]");
    TensorShape s;
    s.batch = j[0].get<int64_t>();
    s.channels = j[1].get<int64_t>();
    s.height = j[2].get<int64_t>();
    s.width = j[3].get<int64_t>();
    return s;
}

static int resolve_layer_ref(const json& v, const std::map<std::string, int>& by_name,
                             const std::string& what) {
    if (v.is_number_integer()) return v.get<int>();
    if (v.is_string()) {
        auto it = by_name.find(v.get<std::string>());
        if (it == by_name.end())
            throw ConfigError(what + ": no layer named '" + v.get<std::string>() + "'");
        return it->second;
    }
    throw ConfigError(what + ": expected layer index or name");
}

NetworkGraph load_network(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("network config parse error: ") + e.what());
    }
    if (!j.is_object() || !j.contains("layers") || !j.contains("input_shape"))
        throw ConfigError("network config needs top-level 'layers' and 'input_shape'");

    NetworkGraph g;
    g.input_shape = parse_shape(j["input_shape"], "input_shape");

    static const std::set<std::string> known = {
        "name", "kind",        "kernel",       "stride",  "padding",
        "in_channels", "out_channels", "groups", "activation", "batch_norm",
        "msa_dim", "msa_scales", "src"};

    const json& jl = j["layers"];
    if (!jl.is_array()) throw ConfigError("'layers' must be an array");
    std::map<std::string, int> by_name;
    TensorShape cur = g.input_shape;
    for (size_t i = 0; i < jl.size(); ++i) {
        const json& r = jl[i];
        std::string where = "layer " + std::to_string(i);
        if (!r.is_object()) throw ConfigError(where + ": expected an object");
        for (auto it = r.begin(); it != r.end(); ++it)
            if (!known.count(it.key()))
                throw ConfigError(where + ": unknown field '" + it.key() + "'");
        LayerDesc d;
        d.name = r.value("name", "layer" + std::to_string(i));
        if (by_name.count(d.name)) throw ConfigError(where + ": duplicate layer name '" + d.name + "'");
        if (!r.contains("kind")) throw ConfigError(where + ": missing 'kind'");
        d.kind = layer_kind_from_string(r["kind"].get<std::string>());
        d.kernel = r.value("kernel", 1);
        d.stride = r.value("stride", 1);
        d.padding = r.value("padding", 0);
        d.in_channels = r.value("in_channels", cur.channels);
        d.out_channels = r.value("out_channels", d.in_channels);
        d.groups = r.value("groups", d.kind == LayerKind::DWConv ? d.in_channels : int64_t{1});
        if (r.contains("activation"))
            d.activation = activation_from_string(r["activation"].get<std::string>());
        d.bn_folded = r.value("batch_norm", false);
        d.msa_dim = r.value("msa_dim", int64_t{0});
        if (r.contains("msa_scales")) d.msa_scales = r["msa_scales"].get<std::vector<int>>();
        if (r.contains("src"))
            d.residual_src = resolve_layer_ref(r["src"], by_name, where + " src");
        else if (d.kind == LayerKind::ResidualAdd)
            throw ConfigError(where + ": ResidualAdd needs 'src'");

        LayerInfo li;
        li.desc = d;
        li.in_shape = cur;
        try {
            li.out_shape = infer_output_shape(d, cur);
        } catch (const ShapeError&) {
            li.out_shape = cur;  // validate_graph reports it with context
        }
        by_name[d.name] = static_cast<int>(i);
        cur = li.out_shape;
        g.layers.push_back(std::move(li));
    }

    if (j.contains("stage_tags")) {
        for (const auto& t : j["stage_tags"]) g.stage_tags.push_back(stage_from_string(t.get<std::string>()));
    } else {
        g.stage_tags.assign(g.layers.size(), Stage::Conv);
    }
    if (j.contains("residual_edges")) {
        for (const auto& e : j["residual_edges"]) {
            if (!e.is_array() || e.size() != 2)
                throw ConfigError("residual_edges entries must be [src, dst]");
            g.residual_edges.emplace_back(resolve_layer_ref(e[0], by_name, "residual edge src"),
                                          resolve_layer_ref(e[1], by_name, "residual edge dst"));
        }
    }
    validate_or_throw(g);
    return g;
}

NetworkGraph load_network_file(const std::string& path) {
    return load_network(read_text_file(path));
}

std::string save_network(const NetworkGraph& g) {
    json j;
    j["input_shape"] = {g.input_shape.batch, g.input_shape.channels, g.input_shape.height,
                        g.input_shape.width};
    json layers = json::array();
    for (const auto& li : g.layers) {
        const LayerDesc& d = li.desc;
        json r;
        r["name"] = d.name;
        r["kind"] = to_string(d.kind);
        if (d.kind == LayerKind::GenericConv || d.kind == LayerKind::DWConv) {
            r["kernel"] = d.kernel;
            r["stride"] = d.stride;
            r["padding"] = d.padding;
        }
        r["in_channels"] = d.in_channels;
        r["out_channels"] = d.out_channels;
        if (d.kind == LayerKind::GenericConv && d.groups != 1) r["groups"] = d.groups;
        if (d.activation != Activation::None) r["activation"] = to_string(d.activation);
        if (d.bn_folded) r["batch_norm"] = true;
        if (d.kind == LayerKind::MsaBlock) {
            r["msa_dim"] = d.msa_dim;
            r["msa_scales"] = d.msa_scales;
        }
        if (d.kind == LayerKind::ResidualAdd) r["src"] = d.residual_src;
        layers.push_back(std::move(r));
    }
    j["layers"] = std::move(layers);
    json tags = json::array();
    for (Stage s : g.stage_tags) tags.push_back(to_string(s));
    j["stage_tags"] = std::move(tags);
    if (!g.residual_edges.empty()) {
        json edges = json::array();
        for (auto [s, d] : g.residual_edges) edges.push_back({s, d});
        j["residual_edges"] = std::move(edges);
    }
    return j.dump(2) + "\n";
}

NetworkGraph reshape_network(const NetworkGraph& g, TensorShape input) {
    NetworkGraph out = g;
    out.input_shape = input;
    TensorShape cur = input;
    for (auto& li : out.layers) {
        li.in_shape = cur;
        li.out_shape = infer_output_shape(li.desc, cur);
        cur = li.out_shape;
    }
    validate_or_throw(out);
    return out;
}

NetworkGraph build_efficientvit_b1(TensorShape input, const std::string& topology_json) {
    if (input.batch != 1 || input.channels != 3)
        throw ConfigError("EfficientViT-B1 input must be (1, 3, H, W), got " + input.str());
    if (input.height % 32 || input.width % 32)
        throw ConfigError("EfficientViT-B1 input resolution must be divisible by 32, got " +
                          input.str());
    NetworkGraph g = load_network(topology_json);
    return reshape_network(g, input);
}

NetworkGraph build_efficientvit_b1(TensorShape input) {
    return build_efficientvit_b1(input, default_b1_topology_json());
}

namespace {

struct B1Builder {
    NetworkGraph g;

    int add(LayerDesc d, Stage tag) {
        LayerInfo li;
        li.desc = std::move(d);
        li.in_shape = g.layers.empty() ? g.input_shape : g.layers.back().out_shape;
        li.out_shape = infer_output_shape(li.desc, li.in_shape);
        g.layers.push_back(std::move(li));
        g.stage_tags.push_back(tag);
        return static_cast<int>(g.layers.size()) - 1;
    }

    // PW expand -> DW -> PW project; residual when the block preserves shape.
    void mbconv(const std::string& name, int64_t cin, int64_t cout, int64_t hidden, int stride,
                Stage tag) {
        int before = static_cast<int>(g.layers.size()) - 1;
        LayerDesc pw1{.name = name + "_pw1", .kind = LayerKind::PWConv, .in_channels = cin,
                      .out_channels = hidden, .activation = Activation::Hardswish,
                      .bn_folded = true};
        add(pw1, tag);
        LayerDesc dw{.name = name + "_dw", .kind = LayerKind::DWConv, .kernel = 3,
                     .stride = stride, .padding = 1, .in_channels = hidden,
                     .out_channels = hidden, .groups = hidden,
                     .activation = Activation::Hardswish, .bn_folded = true};
        add(dw, tag);
        LayerDesc pw2{.name = name + "_pw2", .kind = LayerKind::PWConv, .in_channels = hidden,
                      .out_channels = cout, .bn_folded = true};
        int last = add(pw2, tag);
        if (stride == 1 && cin == cout && before >= 0) g.residual_edges.emplace_back(before, last);
    }

    void msa(const std::string& name, int64_t c, Stage tag) {
        int before = static_cast<int>(g.layers.size()) - 1;
        LayerDesc m{.name = name, .kind = LayerKind::MsaBlock, .in_channels = c, .out_channels = c,
                    .bn_folded = true, .msa_dim = 16, .msa_scales = {1, 5}};
        int idx = add(m, tag);
        g.residual_edges.emplace_back(before, idx);
    }
};

}  // namespace

// Widths/depths assumed from the published EfficientViT-B1 configuration:
// widths (16,32,64,128,256), depths (1,2,3,3,4), MBConv expansion 4
// (16 on the S3/S4 downsampling blocks), head dim 16, scales (1,5).
std::string default_b1_topology_json() {
    B1Builder b;
    b.g.input_shape = {1, 3, 224, 224};

    LayerDesc stem{.name = "stem", .kind = LayerKind::GenericConv, .kernel = 3, .stride = 2,
                   .padding = 1, .in_channels = 3, .out_channels = 16,
                   .activation = Activation::Hardswish, .bn_folded = true};
    int stem_idx = b.add(stem, Stage::Conv);

    LayerDesc ds_dw{.name = "ds_dw", .kind = LayerKind::DWConv, .kernel = 3, .stride = 1,
                    .padding = 1, .in_channels = 16, .out_channels = 16, .groups = 16,
                    .activation = Activation::Hardswish, .bn_folded = true};
    b.add(ds_dw, Stage::DSConv);
    LayerDesc ds_pw{.name = "ds_pw", .kind = LayerKind::PWConv, .in_channels = 16,
                    .out_channels = 16, .bn_folded = true};
    int ds_idx = b.add(ds_pw, Stage::DSConv);
    b.g.residual_edges.emplace_back(stem_idx, ds_idx);

    b.mbconv("s1_mb1", 16, 32, 64, 2, Stage::S1);
    b.mbconv("s1_mb2", 32, 32, 128, 1, Stage::S1);

    b.mbconv("s2_mb1", 32, 64, 128, 2, Stage::S2);
    b.mbconv("s2_mb2", 64, 64, 256, 1, Stage::S2);
    b.mbconv("s2_mb3", 64, 64, 256, 1, Stage::S2);

    b.mbconv("s3_mb1", 64, 128, 1024, 2, Stage::S3);
    for (int i = 1; i <= 3; ++i) {
        b.msa("s3_att" + std::to_string(i), 128, Stage::S3);
        b.mbconv("s3_mb" + std::to_string(i + 1), 128, 128, 512, 1, Stage::S3);
    }

    b.mbconv("s4_mb1", 128, 256, 2048, 2, Stage::S4);
    for (int i = 1; i <= 4; ++i) {
        b.msa("s4_att" + std::to_string(i), 256, Stage::S4);
        b.mbconv("s4_mb" + std::to_string(i + 1), 256, 256, 1024, 1, Stage::S4);
    }

    validate_or_throw(b.g);
    return save_network(b.g);
}

}  // namespace evitsim
