#pragma once

#include <vector>

#include "evitsim/graph.hpp"
#include "evitsim/tensor.hpp"

// Serial second implementations, kept deliberately independent of the OpenMP
// kernels: scatter-style convolution and left-associated attention. Used as
// test oracles and as the baseline in tools/bench_kernels.

namespace evitsim::serial_ref {

// Input-stationary: walks input pixels and scatters tap contributions.
inline FloatTensor conv2d(const FloatTensor& x, const std::vector<double>& w,
                          const std::vector<double>& bias, const LayerDesc& desc) {
    TensorShape os = infer_output_shape(desc, x.shape);
    FloatTensor out(os);
    const int64_t cig = desc.in_channels / desc.groups;
    const int64_t cog = desc.out_channels / desc.groups;
    const int64_t k = desc.kernel;

    for (int64_t co = 0; co < os.channels; ++co)
        for (int64_t p = 0; p < os.pixels(); ++p)
            out.data[co * os.pixels() + p] = bias[co];

    for (int64_t c = 0; c < x.shape.channels; ++c) {
        const int64_t g = c / cig;
        for (int64_t iy = 0; iy < x.shape.height; ++iy) {
            for (int64_t ix = 0; ix < x.shape.width; ++ix) {
                const double xv = x.at(c, iy, ix);
                for (int64_t ky = 0; ky < k; ++ky) {
                    const int64_t num_y = iy + desc.padding - ky;
                    if (num_y < 0 || num_y % desc.stride) continue;
                    const int64_t oy = num_y / desc.stride;
                    if (oy >= os.height) continue;
                    for (int64_t kx = 0; kx < k; ++kx) {
                        const int64_t num_x = ix + desc.padding - kx;
                        if (num_x < 0 || num_x % desc.stride) continue;
                        const int64_t ox = num_x / desc.stride;
                        if (ox >= os.width) continue;
                        for (int64_t og = 0; og < cog; ++og) {
                            const int64_t co = g * cog + og;
                            out.at(co, oy, ox) +=
                                xv * w[((co * cig + (c - g * cig)) * k + ky) * k + kx];
                        }
                    }
                }
            }
        }
    }
    return out;
}

// Left association: builds the full n x n similarity matrix
// ReLU(Q) ReLU(K)^T, normalizes rows, then multiplies by V.
inline FloatTensor attention_left(const FloatTensor& q, const FloatTensor& k,
                                  const FloatTensor& v) {
    const int64_t n = q.shape.height, d = q.shape.width;
    auto relu = [](double x) { return x > 0 ? x : 0.0; };
    std::vector<double> sim(static_cast<size_t>(n) * n, 0.0);
    for (int64_t t = 0; t < n; ++t)
        for (int64_t s = 0; s < n; ++s) {
            double a = 0;
            for (int64_t i = 0; i < d; ++i) a += relu(q.at(0, t, i)) * relu(k.at(0, s, i));
            sim[t * n + s] = a;
        }
    FloatTensor out(q.shape);
    for (int64_t t = 0; t < n; ++t) {
        double den = 0;
        for (int64_t s = 0; s < n; ++s) den += sim[t * n + s];
        for (int64_t j = 0; j < d; ++j) {
            if (den == 0.0) {
                out.at(0, t, j) = 0.0;
                continue;
            }
            double num = 0;
            for (int64_t s = 0; s < n; ++s) num += sim[t * n + s] * v.at(0, s, j);
            out.at(0, t, j) = num / den;
        }
    }
    return out;
}

}  // namespace evitsim::serial_ref
