#pragma once

#include <string>
#include <vector>

#include "evitsim/engines.hpp"
#include "evitsim/graph.hpp"
#include "evitsim/hwconfig.hpp"
#include "evitsim/qkernels.hpp"

namespace evitsim {

struct ScheduleError : SimError {
    using SimError::SimError;
};

enum class GroupKind { Standalone, DwPwFused, MsaFused };
const char* to_string(GroupKind k);

struct FusionGroup {
    GroupKind kind = GroupKind::Standalone;
    std::vector<int> members;  // ascending layer indices; ResidualAdds ride along
};

struct Schedule {
    std::vector<FusionGroup> groups;
    bool fusion_enabled = true;
};

// Per-group timing row. latency_cycles = max(compute_cycles, memory_cycles).
struct LayerTiming {
    std::string name;
    GroupKind kind = GroupKind::Standalone;
    Stage stage = Stage::Conv;
    std::vector<int> members;
    int64_t macs = 0;
    int64_t compute_cycles = 0;
    int64_t memory_cycles = 0;
    int64_t latency_cycles = 0;
    int64_t active_mac_cycles = 0;
    int64_t dram_bytes = 0;
};

struct RunReport {
    std::vector<LayerTiming> groups;
    int64_t total_latency_cycles = 0;
    int64_t total_active_mac_cycles = 0;
    int64_t total_dram_bytes = 0;
    int64_t total_macs = 0;
    double utilization = 0;  // active mac-cycles / (latency * total multipliers)
    double gops = 0;
    double seconds = 0;
};

// DW->PW pairs fuse; MsaBlocks fuse internally; ResidualAdds fold into the
// preceding group (zero cycles, drain-side add). With fusion disabled every
// layer is its own group. Checks buffer capacities, naming the first layer
// that cannot be tiled to fit.
Schedule plan_schedule(const NetworkGraph& g, const HardwareConfig& hw,
                       bool enable_fusion = true);

int64_t roofline_latency(int64_t compute_cycles, int64_t dram_bytes, const HardwareConfig& hw);

// Compute-side cycle models (DRAM handled by the roofline rule on top).
// Standalone layers deal (row, channel-tile) work units over all engines;
// depthwise work runs on the RPEs alone.
int64_t standalone_compute_cycles(const LayerDesc& l, const TensorShape& in,
                                  const HardwareConfig& hw);

// Event model of the two-phase fused pair: RPEs run the DW jobs while MATs
// consume finished rows; each RPE joins the PW pool when its DW share ends.
// rpe_joins=false keeps the RPEs out of phase 2 (degenerate bound).
int64_t fused_dw_pw_compute_cycles(const LayerDesc& dw, const LayerDesc& pw,
                                   const TensorShape& dw_in, const HardwareConfig& hw,
                                   bool rpe_joins = true);

// DW output row availability under round-robin dealing; row 0 gives the MAT
// start delay k^2 * ceil(W_out/M) * ceil(C/N) at L=1.
int64_t dw_row_ready_cycle(const LayerDesc& dw, const TensorShape& dw_in,
                           const HardwareConfig& hw, int64_t row);

// Attention core (post-qkv, pre-projection). Aggregation strips run on the
// RPEs alone; the per-(scale, head) Z MatMuls and the per-token Q*Z / Q*ks
// jobs are PW-type work and go to whichever engine frees first, gated on
// their scale's aggregation and their instance's Z respectively. The K-adder
// shadows Z and the dividers shadow the drain, both at zero added cycles.
int64_t msa_core_compute_cycles(const LayerDesc& msa, const TensorShape& in,
                                const HardwareConfig& hw);

LayerTiming fused_dw_pw_timing(const LayerDesc& dw, const LayerDesc& pw,
                               const TensorShape& dw_in, const HardwareConfig& hw);
LayerTiming fused_msa_timing(const LayerDesc& msa, const TensorShape& in,
                             const HardwareConfig& hw);

// Timing-only pass over a planned schedule.
RunReport timing_report(const NetworkGraph& g, const Schedule& s, const HardwareConfig& hw);

struct SimResult {
    std::vector<QuantTensor> activations;  // one per layer
    RunReport report;
};

// Functional outputs are fusion-invariant: values come from the quantized
// reference executor, cycles from the schedule timing model.
SimResult simulate_schedule(const NetworkGraph& g, const Schedule& s, const QuantTensor& input,
                            const QNetWeights& w, const ScaleSet& scales,
                            const HardwareConfig& hw);

}  // namespace evitsim
