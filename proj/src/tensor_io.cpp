#include "evitsim/tensor_io.hpp"

#include <fstream>
#include <sstream>

namespace evitsim {

std::string dump_quant_tensor(const QuantTensor& t, const std::string& path) {
    std::ofstream bin(path, std::ios::binary);
    if (!bin) throw SimError("cannot open '" + path + "' for writing");
    bin.write(reinterpret_cast<const char*>(t.data.data()),
              static_cast<std::streamsize>(t.data.size()));
    if (!bin) throw SimError("short write to '" + path + "'");

    std::ostringstream hdr;
    hdr << "dtype int8\n"
        << "shape " << t.shape.batch << ' ' << t.shape.channels << ' ' << t.shape.height
        << ' ' << t.shape.width << '\n'
        << "scale " << t.params.scale << '\n'
        << "zero_point " << t.params.zero_point << '\n'
        << "layout chw\n";
    std::ofstream side(path + ".txt");
    if (!side) throw SimError("cannot open '" + path + ".txt' for writing");
    side << hdr.str();
    return hdr.str();
}

QuantTensor load_quant_tensor(const std::string& path) {
    std::ifstream side(path + ".txt");
    if (!side) throw SimError("missing sidecar header '" + path + ".txt'");
    TensorShape shape;
    QuantParams params;
    std::string line;
    while (std::getline(side, line)) {
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "dtype") {
            std::string v;
            ls >> v;
            if (v != "int8") throw SimError("unsupported dtype '" + v + "' in " + path);
        } else if (key == "shape") {
            ls >> shape.batch >> shape.channels >> shape.height >> shape.width;
        } else if (key == "scale") {
            ls >> params.scale;
        } else if (key == "zero_point") {
            ls >> params.zero_point;
        }
    }
    std::ifstream bin(path, std::ios::binary);
    if (!bin) throw SimError("cannot open '" + path + "'");
    QuantTensor t(shape, params);
    bin.read(reinterpret_cast<char*>(t.data.data()),
             static_cast<std::streamsize>(t.data.size()));
    if (bin.gcount() != static_cast<std::streamsize>(t.data.size()))
        throw SimError("payload of '" + path + "' is shorter than its header claims");
    return t;
}

}  // namespace evitsim
