#pragma once

#include <string>

#include "evitsim/tensor.hpp"

namespace evitsim {

// Writes the int8 payload as flat little-endian bytes in (c, y, x) order and a
// sidecar "<path>.txt" header with shape, scale, and dtype. Returns the header.
std::string dump_quant_tensor(const QuantTensor& t, const std::string& path);

QuantTensor load_quant_tensor(const std::string& path);

}  // namespace evitsim
