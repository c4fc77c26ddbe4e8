#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "evitsim/tensor.hpp"

namespace evitsim {

struct OverflowError : SimError {
    using SimError::SimError;
};

// Banker's rounding, independent of the FPU rounding mode.
inline int64_t round_half_even(double v) {
    double f = std::floor(v);
    double frac = v - f;
    int64_t base = static_cast<int64_t>(f);
    if (frac > 0.5) return base + 1;
    if (frac < 0.5) return base;
    return (base % 2 == 0) ? base : base + 1;
}

inline int8_t clamp_i8(int64_t v) {
    return static_cast<int8_t>(std::clamp<int64_t>(v, -128, 127));
}

inline int8_t quantize_value(double v, double scale) {
    return clamp_i8(round_half_even(v / scale));
}

inline double dequantize_value(int8_t q, double scale) {
    return static_cast<double>(q) * scale;
}

// scale = max_abs / 127, with a 1.0 fallback so all-zero tensors stay representable
double choose_scale(const double* data, size_t n);

QuantTensor quantize(const FloatTensor& t, double scale);
QuantTensor quantize(const FloatTensor& t);  // picks scale via choose_scale
FloatTensor dequantize(const QuantTensor& t);

// Requantize a 32-bit accumulator value to int8: q_out = rhe(acc * in_scale / out_scale).
inline int8_t requantize(int32_t acc, double in_scale, double out_scale) {
    return clamp_i8(round_half_even(static_cast<double>(acc) * in_scale / out_scale));
}

// Accumulation guard. Sums are kept in int64 and checked against int32 range;
// a trip means the tiling or calibration produced unrepresentable partials.
inline int32_t check_acc32(int64_t acc, const char* what) {
    if (acc > std::numeric_limits<int32_t>::max() || acc < std::numeric_limits<int32_t>::min())
        throw OverflowError(std::string("int32 accumulator overflow in ") + what);
    return static_cast<int32_t>(acc);
}

// Integer division used by the attention normalizer: (dividend << 8) / divisor,
// rounded half to even. divisor == 0 yields 0. Exact: |dividend|*256 < 2^39 is
// below the 2^53 double mantissa, so the quotient and its ties are computed
// without representation error.
inline int32_t fixed_divide(int32_t dividend, int32_t divisor) {
    if (divisor == 0) return 0;
    double q = static_cast<double>(dividend) * 256.0 / static_cast<double>(divisor);
    int64_t r = round_half_even(q);
    if (r > std::numeric_limits<int32_t>::max() || r < std::numeric_limits<int32_t>::min())
        throw OverflowError("divider output exceeds 32-bit range");
    return static_cast<int32_t>(r);
}

}  // namespace evitsim
