#include "enaudit/bridge.hpp"

#include "enaudit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace enaudit {

namespace {
constexpr double kMinMeterRateHz = 1000.0;
}

MeterTraceLoad meter_trace_from_csv(const std::string& csv_text) {
    MeterTraceLoad out;
    out.trace = parse_power_trace_csv(csv_text);
    if (out.trace.samples.size() >= 2 && out.trace.nominal_rate_hz < kMinMeterRateHz) {
        char buf[128];
        std::snprintf(buf, sizeof(buf),
                      "under-sampling: estimated rate %.1f Hz below 1 kHz",
                      out.trace.nominal_rate_hz);
        out.warnings.push_back(buf);
    }
    return out;
}

MeterTraceLoad load_meter_trace(const std::string& file_path) {
    std::ifstream in(file_path, std::ios::binary);
    if (!in) throw LoadError("cannot open meter trace: " + file_path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return meter_trace_from_csv(ss.str());
}

namespace {

PowerTrace trim_trace(const PowerTrace& t, std::uint64_t lo, std::uint64_t hi) {
    PowerTrace out;
    out.nominal_rate_hz = t.nominal_rate_hz;
    for (const auto& s : t.samples)
        if (s.t_ns >= lo && s.t_ns <= hi) out.samples.push_back(s);
    return out;
}

}  // namespace

std::pair<PowerTrace, PowerTrace> align_traces(const PowerTrace& meter,
                                               const PowerTrace& gpu,
                                               double offset_s) {
    if (meter.samples.empty() || gpu.samples.empty())
        throw InsufficientDataError("align_traces requires non-empty traces");

    PowerTrace shifted;
    shifted.nominal_rate_hz = gpu.nominal_rate_hz;
    double offset_ns = offset_s * 1e9;
    for (const auto& s : gpu.samples) {
        double t = static_cast<double>(s.t_ns) + offset_ns;
        if (t < 0) continue;  // samples shifted before the epoch are dropped
        shifted.samples.push_back({static_cast<std::uint64_t>(std::llround(t)), s.watts});
    }
    if (shifted.samples.empty())
        throw CoverageError("gpu trace entirely before epoch after shift");

    std::uint64_t lo = std::max(meter.samples.front().t_ns, shifted.samples.front().t_ns);
    std::uint64_t hi = std::min(meter.samples.back().t_ns, shifted.samples.back().t_ns);
    if (lo >= hi)
        throw CoverageError("meter and gpu traces do not overlap after shift");

    return {trim_trace(meter, lo, hi), trim_trace(shifted, lo, hi)};
}

BridgeDecomposition bridge_decompose(const PowerTrace& meter, const PowerTrace& gpu,
                                     std::uint64_t t0_ns, std::uint64_t t1_ns) {
    BridgeDecomposition d;
    d.t0_ns = t0_ns;
    d.t1_ns = t1_ns;
    d.meter_rate_hz = meter.nominal_rate_hz;
    d.gpu_rate_hz = gpu.nominal_rate_hz;
    d.e_total_j = integrate_power_j(meter, t0_ns, t1_ns);
    d.e_gpu_j = integrate_power_j(gpu, t0_ns, t1_ns);
    d.e_cpu_sys_j = d.e_total_j - d.e_gpu_j;
    if (d.e_cpu_sys_j < 0.0) {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "negative cpu+sys energy (%.6g J): meter/GPU misalignment or "
                      "miscalibration",
                      d.e_cpu_sys_j);
        d.warnings.push_back(buf);
    }
    return d;
}

AttributionResult bridge_attribute(const BridgeDecomposition& decomp,
                                   const IdleBaseline& baseline,
                                   const std::vector<ProcessShare>& shares) {
    if (decomp.e_cpu_sys_j < 0.0)
        throw InputError("refusing to attribute a negative cpu+sys decomposition");

    AttributionWindow window;
    window.t0_ns = decomp.t0_ns;
    window.t1_ns = decomp.t1_ns;
    window.e_pkg_j = decomp.e_cpu_sys_j;
    TaskEnergy te = task_energy(window, baseline);

    AttributionResult res = attribute(te.joules, shares);
    if (!te.warning.empty()) res.warnings.push_back(te.warning);
    // the cpu+sys channel is coarser than per-domain counters; tag the output
    res.warnings.push_back("channel=cpu+sys");
    return res;
}

}  // namespace enaudit
