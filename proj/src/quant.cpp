#include "evitsim/quant.hpp"

namespace evitsim {

double choose_scale(const double* data, size_t n) {
    double max_abs = 0.0;
    for (size_t i = 0; i < n; ++i) max_abs = std::max(max_abs, std::fabs(data[i]));
    if (max_abs == 0.0) return 1.0;
    return max_abs / 127.0;
}

QuantTensor quantize(const FloatTensor& t, double scale) {
    QuantTensor q(t.shape, QuantParams{scale});
    for (size_t i = 0; i < t.data.size(); ++i) q.data[i] = quantize_value(t.data[i], scale);
    return q;
}

QuantTensor quantize(const FloatTensor& t) {
    return quantize(t, choose_scale(t.data.data(), t.data.size()));
}

FloatTensor dequantize(const QuantTensor& t) {
    FloatTensor f(t.shape);
    for (size_t i = 0; i < t.data.size(); ++i) f.data[i] = dequantize_value(t.data[i], t.params.scale);
    return f;
}

}  // namespace evitsim
