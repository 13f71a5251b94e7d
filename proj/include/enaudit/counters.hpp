#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace enaudit {

enum class EnergyDomain { CpuPackage, CpuCluster, Gpu, Dram, Io, SocTotal };

const char* domain_name(EnergyDomain d);

// A cumulative energy counter with declared width and wrap range. Raw readings
// live in [0, max_range); microjoules_per_count converts raw deltas to energy.
struct EnergyCounter {
    EnergyDomain domain = EnergyDomain::CpuPackage;
    std::string cluster_name;  // set when domain == CpuCluster
    int width_bits = 32;       // [16, 64]
    // 0 = full 2^width_bits range; a platform may publish a smaller range
    std::uint64_t max_range = 0;
    double microjoules_per_count = 1.0;

    // Effective wrap range as a 128-bit value (2^64 does not fit in u64).
    unsigned __int128 range() const;
};

struct RawSample {
    std::uint64_t t_ns = 0;  // monotonic clock
    std::uint64_t raw = 0;
};

struct PowerTrace {
    struct Sample {
        std::uint64_t t_ns = 0;
        double watts = 0.0;
    };
    std::vector<Sample> samples;
    double nominal_rate_hz = 0.0;
};

// Delta between two consecutive readings. A raw decrease is interpreted as
// exactly one wrap; this is only valid when the sampling period is below the
// counter's worst-case wrap time (see wrap_time_seconds).
std::uint64_t counter_delta_raw(const RawSample& prev, const RawSample& curr,
                                const EnergyCounter& counter);
double counter_delta_uj(const RawSample& prev, const RawSample& curr,
                        const EnergyCounter& counter);

std::uint64_t accumulate_raw(const std::vector<RawSample>& series,
                             const EnergyCounter& counter);
double accumulate_uj(const std::vector<RawSample>& series, const EnergyCounter& counter);

// Trapezoidal integral of the trace over [t0, t1], linear interpolation at the
// window edges. The trace must cover the window with at least two samples.
double integrate_power_j(const PowerTrace& trace, std::uint64_t t0_ns,
                         std::uint64_t t1_ns);

// Worst-case time to wrap the counter at the given sustained power.
double wrap_time_seconds(const EnergyCounter& counter, double max_plausible_watts);

struct LatencyStats {
    double min_ms = 0.0;
    double median_ms = 0.0;
    double max_ms = 0.0;
    std::size_t reads = 0;
};

struct SampleSeries {
    std::vector<RawSample> samples;
    LatencyStats latency;
    std::vector<std::string> warnings;  // wrap-risk, read failures
};

// Reads the current raw counter value; nullopt on failure.
using CounterReader = std::function<std::optional<std::uint64_t>()>;

// Samples at the given cadence for the given duration, timing each read.
// A wrap-risk warning is attached when period exceeds half the worst-case
// wrap time at max_plausible_watts.
SampleSeries sample_counter(const CounterReader& reader, const EnergyCounter& counter,
                            std::uint64_t period_ns, std::uint64_t duration_ns,
                            double max_plausible_watts);

// CSV trace format: header "t_ns,power_mw", strictly increasing t_ns,
// non-negative milliwatts.
PowerTrace parse_power_trace_csv(const std::string& text);
PowerTrace load_power_trace_csv(const std::string& file_path);
std::string power_trace_to_csv(const PowerTrace& trace);

}  // namespace enaudit
