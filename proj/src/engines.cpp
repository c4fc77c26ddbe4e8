#include "evitsim/engines.hpp"

#include <algorithm>

namespace evitsim {

namespace {

std::vector<std::pair<int, int>> tap_sequence(const LayerDesc& desc, TapOrder order) {
    const int k = desc.kernel;
    bool odd_even = order == TapOrder::OddEven ||
                    (order == TapOrder::Auto && desc.stride == 2);
    std::vector<std::pair<int, int>> taps;
    taps.reserve(static_cast<size_t>(k) * k);
    for (int ky = 0; ky < k; ++ky) {
        if (!odd_even) {
            for (int kx = 0; kx < k; ++kx) taps.emplace_back(ky, kx);
            continue;
        }
        for (int parity : {1, 0})
            for (int kx = 0; kx < k; ++kx)
                if (((kx - desc.padding) % 2 + 2) % 2 == parity) taps.emplace_back(ky, kx);
    }
    return taps;
}

}  // namespace

EngineResult rpe_dw_execute(const QuantTensor& x, const QConvWeights& w, const LayerDesc& desc,
                            const DrainSpec& drain, const RpeConfig& cfg, TapOrder order) {
    if (desc.kind != LayerKind::DWConv)
        throw EngineError("RPE DW mode given a " + std::string(to_string(desc.kind)) + " layer");
    if (desc.kernel != 3 && desc.kernel != 5 && desc.kernel != 7)
        throw EngineError("RPE DW mode supports kernels {3,5,7}, got " +
                          std::to_string(desc.kernel));
    if (desc.stride != 1 && desc.stride != 2)
        throw EngineError("RPE DW mode supports strides {1,2}");

    const int64_t C = desc.in_channels;
    const int64_t H = x.shape.height, W = x.shape.width;
    TensorShape os = infer_output_shape(desc, x.shape);
    QuantTensor out(os, QuantParams{drain.out_scale});
    const double acc_scale = x.params.scale * w.scale;
    const auto taps = tap_sequence(desc, order);
    const int64_t k = desc.kernel;

    EngineResult r;
    bool overflow = false;
    std::vector<int64_t> acc(static_cast<size_t>(cfg.n) * cfg.m);
    for (int64_t c0 = 0; c0 < C; c0 += cfg.n) {
        const int64_t nc = std::min<int64_t>(cfg.n, C - c0);
        for (int64_t oy = 0; oy < os.height; ++oy) {
            for (int64_t x0 = 0; x0 < os.width; x0 += cfg.m) {
                const int64_t np = std::min<int64_t>(cfg.m, os.width - x0);
                std::fill(acc.begin(), acc.end(), 0);
                for (auto [ky, kx] : taps) {
                    ++r.cycles;
                    r.active_mac_cycles += nc * np;
                    const int64_t iy = oy * desc.stride + ky - desc.padding;
                    if (iy < 0 || iy >= H) continue;  // zero tap, MACs still fire
                    for (int64_t ci = 0; ci < nc; ++ci) {
                        const int64_t c = c0 + ci;
                        const int8_t wv = w.w[(c * k + ky) * k + kx];
                        for (int64_t m = 0; m < np; ++m) {
                            const int64_t ix = (x0 + m) * desc.stride + kx - desc.padding;
                            if (ix < 0 || ix >= W) continue;
                            acc[ci * cfg.m + m] +=
                                static_cast<int64_t>(x.at(c, iy, ix)) * wv;
                        }
                    }
                }
                for (int64_t ci = 0; ci < nc; ++ci) {
                    for (int64_t m = 0; m < np; ++m) {
                        int64_t a = acc[ci * cfg.m + m] + w.bias32[c0 + ci];
                        if (a > INT32_MAX || a < INT32_MIN) {
                            overflow = true;
                            continue;
                        }
                        const size_t flat = static_cast<size_t>(
                            ((c0 + ci) * os.height + oy) * os.width + x0 + m);
                        out.data[flat] = drain_acc(static_cast<int32_t>(a), acc_scale, drain,
                                                   residual_sum_at(drain, flat));
                    }
                }
            }
        }
    }
    if (overflow)
        throw OverflowError("int32 accumulator overflow in layer '" + desc.name + "'");
    r.outputs = std::move(out);
    r.peak_mac_cycles = r.cycles * cfg.multipliers();
    return r;
}

namespace {

// Shared PW-type schedule: outer output-channel tiles (lines/trees), raster
// pixels, kernel taps, inner input-channel tiles. One cycle per
// (pixel, tap, input tile, output tile).
EngineResult pw_type_execute(const QuantTensor& x, const QConvWeights& w, const LayerDesc& desc,
                             const DrainSpec& drain, int64_t out_par, int64_t in_par,
                             bool keep_acc32, const char* engine) {
    if (desc.kind == LayerKind::DWConv)
        throw EngineError(std::string(engine) + " cannot execute DWConv");
    if (desc.kind == LayerKind::MsaBlock || desc.kind == LayerKind::ResidualAdd)
        throw EngineError(std::string(engine) + " cannot execute " + to_string(desc.kind));
    if (desc.groups != 1)
        throw EngineError(std::string(engine) + " does not support grouped layers");

    const int64_t Cin = desc.in_channels, Cout = desc.out_channels;
    const int64_t H = x.shape.height, W = x.shape.width;
    const int64_t k = desc.kernel;
    TensorShape os = infer_output_shape(desc, x.shape);
    QuantTensor out(os, QuantParams{drain.out_scale});
    const double acc_scale = x.params.scale * w.scale;

    EngineResult r;
    if (keep_acc32) r.acc32.resize(static_cast<size_t>(os.numel()));
    bool overflow = false;
    std::vector<int64_t> acc(static_cast<size_t>(out_par));
    for (int64_t co0 = 0; co0 < Cout; co0 += out_par) {
        const int64_t nco = std::min(out_par, Cout - co0);
        for (int64_t oy = 0; oy < os.height; ++oy) {
            for (int64_t ox = 0; ox < os.width; ++ox) {
                std::fill(acc.begin(), acc.end(), 0);
                for (int64_t ky = 0; ky < k; ++ky) {
                    for (int64_t kx = 0; kx < k; ++kx) {
                        for (int64_t ci0 = 0; ci0 < Cin; ci0 += in_par) {
                            const int64_t nci = std::min(in_par, Cin - ci0);
                            ++r.cycles;
                            r.active_mac_cycles += nco * nci;
                            const int64_t iy = oy * desc.stride + ky - desc.padding;
                            const int64_t ix = ox * desc.stride + kx - desc.padding;
                            if (iy < 0 || iy >= H || ix < 0 || ix >= W) continue;
                            for (int64_t co = 0; co < nco; ++co) {
                                const int64_t wbase = ((co0 + co) * Cin) * k * k;
                                int64_t a = 0;
                                for (int64_t ci = 0; ci < nci; ++ci)
                                    a += static_cast<int64_t>(x.at(ci0 + ci, iy, ix)) *
                                         w.w[wbase + (ci0 + ci) * k * k + ky * k + kx];
                                acc[co] += a;
                            }
                        }
                    }
                }
                for (int64_t co = 0; co < nco; ++co) {
                    int64_t a = acc[co] + w.bias32[co0 + co];
                    if (a > INT32_MAX || a < INT32_MIN) {
                        overflow = true;
                        continue;
                    }
                    const size_t flat =
                        static_cast<size_t>(((co0 + co) * os.height + oy) * os.width + ox);
                    if (keep_acc32) r.acc32[flat] = static_cast<int32_t>(a);
                    out.data[flat] = drain_acc(static_cast<int32_t>(a), acc_scale, drain,
                                               residual_sum_at(drain, flat));
                }
            }
        }
    }
    if (overflow)
        throw OverflowError("int32 accumulator overflow in layer '" + desc.name + "'");
    r.outputs = std::move(out);
    r.peak_mac_cycles = r.cycles * out_par * in_par;
    return r;
}

}  // namespace

EngineResult rpe_pw_execute(const QuantTensor& x, const QConvWeights& w, const LayerDesc& desc,
                            const DrainSpec& drain, const RpeConfig& cfg, bool keep_acc32) {
    return pw_type_execute(x, w, desc, drain, cfg.m, cfg.n, keep_acc32, "RPE PW mode");
}

EngineResult mat_execute(const QuantTensor& x, const QConvWeights& w, const LayerDesc& desc,
                         const DrainSpec& drain, const MatConfig& cfg, bool keep_acc32) {
    return pw_type_execute(x, w, desc, drain, cfg.s, cfg.t, keep_acc32, "MAT");
}

std::pair<std::vector<int32_t>, int64_t> kadder_execute(const QuantTensor& k_relu,
                                                        bool overlapped) {
    const int64_t n = k_relu.shape.height, d = k_relu.shape.width;
    std::vector<int32_t> rowsum(static_cast<size_t>(d), 0);
    for (int64_t j = 0; j < d; ++j) {
        int64_t s = 0;
        for (int64_t t = 0; t < n; ++t) s += k_relu.at(0, t, j);
        rowsum[j] = check_acc32(s, "k_rowsum");
    }
    return {std::move(rowsum), overlapped ? 0 : n};
}

std::pair<std::vector<int32_t>, int64_t> divider_execute(const std::vector<int32_t>& dividends,
                                                         const std::vector<int32_t>& divisors,
                                                         int64_t n, int64_t d,
                                                         int64_t divider_count, bool overlapped) {
    if (static_cast<int64_t>(dividends.size()) != n * d ||
        static_cast<int64_t>(divisors.size()) != n)
        throw EngineError("divider bank: operand sizes must be n*d and n");
    std::vector<int32_t> out(dividends.size());
    for (int64_t t = 0; t < n; ++t)
        for (int64_t j = 0; j < d; ++j)
            out[t * d + j] = fixed_divide(dividends[t * d + j], divisors[t]);
    const int64_t cycles = overlapped ? 0 : (n * d + divider_count - 1) / divider_count;
    return {std::move(out), cycles};
}

}  // namespace evitsim
