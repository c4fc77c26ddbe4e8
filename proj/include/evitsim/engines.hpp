#pragma once

#include <utility>
#include <vector>

#include "evitsim/hwconfig.hpp"
#include "evitsim/qkernels.hpp"

namespace evitsim {

struct EngineError : SimError {
    using SimError::SimError;
};

// DW stride-2 input columns stream odd positions first, then even. InOrder is
// the hypothetical sequential schedule kept for the reordering-invariance check.
enum class TapOrder { Auto, InOrder, OddEven };

struct EngineResult {
    QuantTensor outputs;
    std::vector<int32_t> acc32;  // post-bias accumulators, filled when requested
    int64_t cycles = 0;
    int64_t active_mac_cycles = 0;
    int64_t peak_mac_cycles = 0;  // cycles * engine multiplier count
};

// Depthwise mode: self-accumulation, one kernel tap per cycle across a strip
// of M output pixels and a tile of N channels.
EngineResult rpe_dw_execute(const QuantTensor& x, const QConvWeights& w, const LayerDesc& desc,
                            const DrainSpec& drain, const RpeConfig& cfg,
                            TapOrder order = TapOrder::Auto);

// Pointwise/generic/matmul mode: down-forward accumulation, M output channels
// by N input channels per cycle, one output pixel at a time.
EngineResult rpe_pw_execute(const QuantTensor& x, const QConvWeights& w, const LayerDesc& desc,
                            const DrainSpec& drain, const RpeConfig& cfg,
                            bool keep_acc32 = false);

// S adder trees by T input channels; rejects depthwise work.
EngineResult mat_execute(const QuantTensor& x, const QConvWeights& w, const LayerDesc& desc,
                         const DrainSpec& drain, const MatConfig& cfg, bool keep_acc32 = false);

// Row sums of an already-rectified K stream (n x d), 32-bit. Shadowing the Z
// MatMul costs nothing; standalone it takes one cycle per token.
std::pair<std::vector<int32_t>, int64_t> kadder_execute(const QuantTensor& k_relu,
                                                        bool overlapped);

// Fixed-point division bank; zero added cycles when overlapped with MAT drain.
std::pair<std::vector<int32_t>, int64_t> divider_execute(const std::vector<int32_t>& dividends,
                                                         const std::vector<int32_t>& divisors,
                                                         int64_t n, int64_t d,
                                                         int64_t divider_count, bool overlapped);

}  // namespace evitsim
