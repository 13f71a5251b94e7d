#pragma once

#include "enaudit/attribution.hpp"
#include "enaudit/counters.hpp"

#include <string>
#include <utility>
#include <vector>

namespace enaudit {

// Two-channel split of externally metered board power: GPU vs everything else.
struct BridgeDecomposition {
    std::uint64_t t0_ns = 0;
    std::uint64_t t1_ns = 0;
    double e_total_j = 0.0;
    double e_gpu_j = 0.0;
    double e_cpu_sys_j = 0.0;  // e_total - e_gpu, by construction
    double meter_rate_hz = 0.0;
    double gpu_rate_hz = 0.0;
    std::vector<std::string> warnings;
};

// Meter trace in the shared CSV format; attaches an under-sampling warning
// when the estimated rate falls below 1 kHz.
struct MeterTraceLoad {
    PowerTrace trace;
    std::vector<std::string> warnings;
};

MeterTraceLoad load_meter_trace(const std::string& file_path);
MeterTraceLoad meter_trace_from_csv(const std::string& csv_text);

// Shifts gpu timestamps by offset seconds, then trims both traces to their
// overlapping interval. Alignment offset is caller-supplied.
std::pair<PowerTrace, PowerTrace> align_traces(const PowerTrace& meter,
                                               const PowerTrace& gpu,
                                               double offset_s);

// e_cpu_sys may come out negative when meter and GPU traces are misaligned or
// miscalibrated; the value is reported with a warning, never clamped.
BridgeDecomposition bridge_decompose(const PowerTrace& meter, const PowerTrace& gpu,
                                     std::uint64_t t0_ns, std::uint64_t t1_ns);

// Layers 2-3 applied to the cpu+sys channel. Refuses a negative decomposition.
AttributionResult bridge_attribute(const BridgeDecomposition& decomp,
                                   const IdleBaseline& baseline,
                                   const std::vector<ProcessShare>& shares);

}  // namespace enaudit
