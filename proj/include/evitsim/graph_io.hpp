#pragma once

#include <string>

#include "evitsim/graph.hpp"

namespace evitsim {

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

NetworkGraph load_network(const std::string& json_text);
NetworkGraph load_network_file(const std::string& path);
std::string save_network(const NetworkGraph& g);

// Rebuilds the shape chain of an existing layer list for a new input resolution.
NetworkGraph reshape_network(const NetworkGraph& g, TensorShape input);

// Builds EfficientViT-B1 from a topology config (full network schema). The
// bundled file lives at configs/efficientvit-b1.json; widths and depths come
// from the file, never from code. Input must be (1,3,H,W) with H,W % 32 == 0.
NetworkGraph build_efficientvit_b1(TensorShape input, const std::string& topology_json);
NetworkGraph build_efficientvit_b1(TensorShape input);  // built-in default topology

// Default B1 topology (source of the bundled config; regenerate via tools/gen_b1).
std::string default_b1_topology_json();

}  // namespace evitsim
