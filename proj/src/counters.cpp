#include "enaudit/counters.hpp"

#include "enaudit/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

namespace enaudit {

const char* domain_name(EnergyDomain d) {
    switch (d) {
        case EnergyDomain::CpuPackage: return "cpu_package";
        case EnergyDomain::CpuCluster: return "cpu_cluster";
        case EnergyDomain::Gpu:        return "gpu";
        case EnergyDomain::Dram:       return "dram";
        case EnergyDomain::Io:         return "io";
        case EnergyDomain::SocTotal:   return "soc_total";
    }
    return "?";
}

unsigned __int128 EnergyCounter::range() const {
    if (max_range != 0) return max_range;
    if (width_bits >= 64) return (unsigned __int128)1 << 64;
    return (unsigned __int128)1 << width_bits;
}

std::uint64_t counter_delta_raw(const RawSample& prev, const RawSample& curr,
                                const EnergyCounter& counter) {
    if (curr.t_ns <= prev.t_ns)
        throw OrderingError("counter samples out of order: t " +
                            std::to_string(prev.t_ns) + " -> " +
                            std::to_string(curr.t_ns));
    unsigned __int128 range = counter.range();
    if (prev.raw >= range || curr.raw >= range)
        throw InputError("raw counter value exceeds declared range");
    if (curr.raw >= prev.raw) return curr.raw - prev.raw;
    // raw decreased: exactly one wrap assumed
    return static_cast<std::uint64_t>(range - prev.raw + curr.raw);
}

double counter_delta_uj(const RawSample& prev, const RawSample& curr,
                        const EnergyCounter& counter) {
    return static_cast<double>(counter_delta_raw(prev, curr, counter)) *
           counter.microjoules_per_count;
}

std::uint64_t accumulate_raw(const std::vector<RawSample>& series,
                             const EnergyCounter& counter) {
    if (series.empty()) throw InsufficientDataError("empty sample series");
    std::uint64_t total = 0;
    for (std::size_t i = 1; i < series.size(); ++i)
        total += counter_delta_raw(series[i - 1], series[i], counter);
    return total;
}

double accumulate_uj(const std::vector<RawSample>& series, const EnergyCounter& counter) {
    return static_cast<double>(accumulate_raw(series, counter)) *
           counter.microjoules_per_count;
}

namespace {

double interp_watts(const PowerTrace& trace, std::uint64_t t_ns) {
    const auto& s = trace.samples;
    auto it = std::lower_bound(s.begin(), s.end(), t_ns,
                               [](const PowerTrace::Sample& a, std::uint64_t t) {
                                   return a.t_ns < t;
                               });
    if (it != s.end() && it->t_ns == t_ns) return it->watts;
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    double f = static_cast<double>(t_ns - lo.t_ns) /
               static_cast<double>(hi.t_ns - lo.t_ns);
    return lo.watts + f * (hi.watts - lo.watts);
}

}  // namespace

double integrate_power_j(const PowerTrace& trace, std::uint64_t t0_ns,
                         std::uint64_t t1_ns) {
    if (t0_ns >= t1_ns) throw InputError("integration window requires t0 < t1");
    const auto& s = trace.samples;
    if (s.size() < 2) throw InsufficientDataError("power trace needs >= 2 samples");
    if (s.front().t_ns > t0_ns || s.back().t_ns < t1_ns)
        throw CoverageError("integration window [" + std::to_string(t0_ns) + ", " +
                            std::to_string(t1_ns) + "] ns outside trace coverage [" +
                            std::to_string(s.front().t_ns) + ", " +
                            std::to_string(s.back().t_ns) + "] ns");

    double p_prev = interp_watts(trace, t0_ns);
    std::uint64_t t_prev = t0_ns;
    double joules = 0.0;
    auto it = std::upper_bound(s.begin(), s.end(), t0_ns,
                               [](std::uint64_t t, const PowerTrace::Sample& a) {
                                   return t < a.t_ns;
                               });
    for (; it != s.end() && it->t_ns < t1_ns; ++it) {
        double dt = static_cast<double>(it->t_ns - t_prev) * 1e-9;
        joules += 0.5 * (p_prev + it->watts) * dt;
        t_prev = it->t_ns;
        p_prev = it->watts;
    }
    double p_end = interp_watts(trace, t1_ns);
    joules += 0.5 * (p_prev + p_end) * static_cast<double>(t1_ns - t_prev) * 1e-9;
    return joules;
}

double wrap_time_seconds(const EnergyCounter& counter, double max_plausible_watts) {
    if (max_plausible_watts <= 0.0) throw InputError("max plausible power must be > 0");
    double range_uj = static_cast<double>(counter.range()) * counter.microjoules_per_count;
    return range_uj * 1e-6 / max_plausible_watts;
}

SampleSeries sample_counter(const CounterReader& reader, const EnergyCounter& counter,
                            std::uint64_t period_ns, std::uint64_t duration_ns,
                            double max_plausible_watts) {
    if (period_ns == 0) throw InputError("sampling period must be > 0");
    SampleSeries out;

    double wrap_s = wrap_time_seconds(counter, max_plausible_watts);
    if (static_cast<double>(period_ns) * 1e-9 >= wrap_s) {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "wrap-risk: period %.3f s >= worst-case wrap time %.3f s at %.1f W",
                      static_cast<double>(period_ns) * 1e-9, wrap_s, max_plausible_watts);
        out.warnings.push_back(buf);
    }

    using clock = std::chrono::steady_clock;
    auto start = clock::now();
    std::vector<double> latencies_ms;
    for (std::uint64_t offset = 0;; offset += period_ns) {
        auto target = start + std::chrono::nanoseconds(offset);
        std::this_thread::sleep_until(target);
        auto before = clock::now();
        auto value = reader();
        auto after = clock::now();
        if (!value) {
            out.warnings.push_back("read failure at sample " +
                                   std::to_string(out.samples.size()) +
                                   "; series truncated");
            break;
        }
        std::uint64_t t_ns = static_cast<std::uint64_t>(
            std::chrono::duration_cast<std::chrono::nanoseconds>(before - start).count());
        // guard against identical timestamps on very fast loops
        if (!out.samples.empty() && t_ns <= out.samples.back().t_ns)
            t_ns = out.samples.back().t_ns + 1;
        out.samples.push_back(RawSample{t_ns, *value});
        latencies_ms.push_back(
            std::chrono::duration<double, std::milli>(after - before).count());
        if (offset >= duration_ns) break;
    }

    if (!latencies_ms.empty()) {
        std::sort(latencies_ms.begin(), latencies_ms.end());
        out.latency.reads = latencies_ms.size();
        out.latency.min_ms = latencies_ms.front();
        out.latency.max_ms = latencies_ms.back();
        std::size_t n = latencies_ms.size();
        out.latency.median_ms = (n % 2) ? latencies_ms[n / 2]
                                        : 0.5 * (latencies_ms[n / 2 - 1] + latencies_ms[n / 2]);
    }
    return out;
}

PowerTrace parse_power_trace_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    if (!std::getline(in, line)) throw ParseError("empty power trace");
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "t_ns,power_mw")
        throw ParseError("line 1: expected header 't_ns,power_mw', got '" + line + "'");

    PowerTrace trace;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ParseError("line " + std::to_string(lineno) + ": expected 't_ns,power_mw'");
        char* end = nullptr;
        std::string ts = line.substr(0, comma);
        std::string ps = line.substr(comma + 1);
        if (ts.empty() || ts.find_first_not_of("0123456789") != std::string::npos)
            throw ParseError("line " + std::to_string(lineno) +
                             ": t_ns must be an unsigned integer");
        std::uint64_t t_ns = std::strtoull(ts.c_str(), &end, 10);
        double mw = std::strtod(ps.c_str(), &end);
        if (end == ps.c_str())
            throw ParseError("line " + std::to_string(lineno) + ": bad power value '" + ps + "'");
        if (mw < 0.0)
            throw ParseError("line " + std::to_string(lineno) + ": negative power");
        if (!trace.samples.empty() && t_ns <= trace.samples.back().t_ns)
            throw OrderingError("line " + std::to_string(lineno) +
                                ": non-increasing timestamp");
        trace.samples.push_back({t_ns, mw * 1e-3});
    }

    if (trace.samples.size() >= 2) {
        std::vector<std::uint64_t> gaps;
        for (std::size_t i = 1; i < trace.samples.size(); ++i)
            gaps.push_back(trace.samples[i].t_ns - trace.samples[i - 1].t_ns);
        std::sort(gaps.begin(), gaps.end());
        std::size_t n = gaps.size();
        double median_ns = (n % 2) ? static_cast<double>(gaps[n / 2])
                                   : 0.5 * (static_cast<double>(gaps[n / 2 - 1]) +
                                            static_cast<double>(gaps[n / 2]));
        if (median_ns > 0) trace.nominal_rate_hz = 1e9 / median_ns;
    }
    return trace;
}

PowerTrace load_power_trace_csv(const std::string& file_path) {
    std::ifstream in(file_path, std::ios::binary);
    if (!in) throw LoadError("cannot open power trace: " + file_path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_power_trace_csv(ss.str());
}

std::string power_trace_to_csv(const PowerTrace& trace) {
    std::ostringstream out;
    out << "t_ns,power_mw\n";
    char buf[64];
    for (const auto& s : trace.samples) {
        std::snprintf(buf, sizeof(buf), "%llu,%.6f\n",
                      static_cast<unsigned long long>(s.t_ns), s.watts * 1e3);
        out << buf;
    }
    return out.str();
}

}  // namespace enaudit
