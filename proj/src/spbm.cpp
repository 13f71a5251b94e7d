#include "enaudit/spbm.hpp"

#include "enaudit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

namespace enaudit {

const char* spbm_domain_name(SpbmDomain d) {
    switch (d) {
        case SpbmDomain::PCoreCluster: return "p_core_cluster";
        case SpbmDomain::ECoreCluster: return "e_core_cluster";
        case SpbmDomain::Gpu:          return "gpu";
        case SpbmDomain::SocTotal:     return "soc_total";
    }
    return "?";
}

namespace {

std::uint64_t read_uint(const std::uint8_t* p, int bytes, bool little_endian) {
    std::uint64_t v = 0;
    if (little_endian) {
        for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | p[i];
    } else {
        for (int i = 0; i < bytes; ++i) v = (v << 8) | p[i];
    }
    return v;
}

void write_uint(std::uint8_t* p, int bytes, bool little_endian, std::uint64_t v) {
    for (int i = 0; i < bytes; ++i) {
        int shift = little_endian ? i * 8 : (bytes - 1 - i) * 8;
        p[i] = static_cast<std::uint8_t>((v >> shift) & 0xFF);
    }
}

}  // namespace

SpbmLayout parse_spbm_layout(const std::string& text) {
    SpbmLayout l;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key == "record_size") l.record_size = std::strtoull(val.c_str(), nullptr, 0);
        else if (key == "endianness") l.little_endian = (val != "big");
        else if (key == "timestamp_offset") l.timestamp_offset = std::strtoull(val.c_str(), nullptr, 0);
        else if (key == "rail_count") l.rail_count = std::atoi(val.c_str());
        else if (key == "rails_offset") l.rails_offset = std::strtoull(val.c_str(), nullptr, 0);
        else if (key == "accumulators_offset") l.accumulators_offset = std::strtoull(val.c_str(), nullptr, 0);
        else if (key == "accumulator_width_bits") l.accumulator_width_bits = std::atoi(val.c_str());
        else if (key == "temp_count") l.temp_count = std::atoi(val.c_str());
        else if (key == "temps_offset") l.temps_offset = std::strtoull(val.c_str(), nullptr, 0);
        else if (key == "max_rail_mw") l.max_rail_mw = static_cast<std::uint32_t>(std::strtoul(val.c_str(), nullptr, 0));
        else if (key == "min_temp_c") l.min_temp_c = std::strtod(val.c_str(), nullptr);
        else if (key == "max_temp_c") l.max_temp_c = std::strtod(val.c_str(), nullptr);
    }
    std::size_t acc_bytes = 4ull * (l.accumulator_width_bits / 8);
    std::size_t needed = std::max({l.timestamp_offset + 8,
                                   l.rails_offset + std::size_t{4} * l.rail_count,
                                   l.accumulators_offset + acc_bytes,
                                   l.temps_offset + std::size_t{2} * l.temp_count});
    if (l.record_size < needed)
        throw ParseError("spbm layout: record_size " + std::to_string(l.record_size) +
                         " smaller than declared fields (" + std::to_string(needed) + ")");
    if (l.accumulator_width_bits != 32 && l.accumulator_width_bits != 64)
        throw ParseError("spbm layout: accumulator width must be 32 or 64 bits");
    return l;
}

SpbmLayout load_spbm_layout(const std::string& file_path) {
    std::ifstream in(file_path);
    if (!in) throw LoadError("cannot open spbm layout: " + file_path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_spbm_layout(ss.str());
}

std::vector<SpbmRecord> decode_spbm_stream(const std::vector<std::uint8_t>& blob,
                                           const SpbmLayout& layout) {
    if (blob.size() % layout.record_size != 0)
        throw ParseError("spbm blob length " + std::to_string(blob.size()) +
                         " is not a multiple of record size " +
                         std::to_string(layout.record_size));
    int acc_bytes = layout.accumulator_width_bits / 8;
    std::vector<SpbmRecord> records;
    records.reserve(blob.size() / layout.record_size);
    for (std::size_t off = 0; off < blob.size(); off += layout.record_size) {
        const std::uint8_t* base = blob.data() + off;
        SpbmRecord r;
        r.t_ns = read_uint(base + layout.timestamp_offset, 8, layout.little_endian);
        r.rail_power_mw.resize(layout.rail_count);
        for (int i = 0; i < layout.rail_count; ++i) {
            r.rail_power_mw[i] = static_cast<std::uint32_t>(
                read_uint(base + layout.rails_offset + 4ull * i, 4, layout.little_endian));
            if (r.rail_power_mw[i] > layout.max_rail_mw)
                r.decode_warnings.push_back("rail " + std::to_string(i) + " power " +
                                            std::to_string(r.rail_power_mw[i]) +
                                            " mW above plausibility bound");
        }
        for (int i = 0; i < 4; ++i)
            r.energy_acc_mj[i] = read_uint(base + layout.accumulators_offset + acc_bytes * i,
                                           acc_bytes, layout.little_endian);
        r.temps_c.resize(layout.temp_count);
        for (int i = 0; i < layout.temp_count; ++i) {
            auto raw = static_cast<std::int16_t>(static_cast<std::uint16_t>(
                read_uint(base + layout.temps_offset + 2ull * i, 2, layout.little_endian)));
            r.temps_c[i] = raw / 100.0;
            if (r.temps_c[i] < layout.min_temp_c || r.temps_c[i] > layout.max_temp_c)
                r.decode_warnings.push_back("temp " + std::to_string(i) +
                                            " outside plausibility bounds");
        }
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<std::uint8_t> encode_spbm_stream(const std::vector<SpbmRecord>& records,
                                             const SpbmLayout& layout) {
    int acc_bytes = layout.accumulator_width_bits / 8;
    std::vector<std::uint8_t> blob(records.size() * layout.record_size, 0);
    for (std::size_t n = 0; n < records.size(); ++n) {
        const SpbmRecord& r = records[n];
        std::uint8_t* base = blob.data() + n * layout.record_size;
        write_uint(base + layout.timestamp_offset, 8, layout.little_endian, r.t_ns);
        for (int i = 0; i < layout.rail_count; ++i) {
            std::uint32_t mw = i < static_cast<int>(r.rail_power_mw.size())
                                   ? r.rail_power_mw[i] : 0;
            write_uint(base + layout.rails_offset + 4ull * i, 4, layout.little_endian, mw);
        }
        for (int i = 0; i < 4; ++i)
            write_uint(base + layout.accumulators_offset + acc_bytes * i, acc_bytes,
                       layout.little_endian, r.energy_acc_mj[i]);
        for (int i = 0; i < layout.temp_count; ++i) {
            double c = i < static_cast<int>(r.temps_c.size()) ? r.temps_c[i] : 0.0;
            auto raw = static_cast<std::int16_t>(std::lround(c * 100.0));
            write_uint(base + layout.temps_offset + 2ull * i, 2, layout.little_endian,
                       static_cast<std::uint16_t>(raw));
        }
    }
    return blob;
}

std::vector<std::uint8_t> load_blob(const std::string& file_path) {
    std::ifstream in(file_path, std::ios::binary);
    if (!in) throw LoadError("cannot open blob: " + file_path);
    std::vector<std::uint8_t> blob((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
    return blob;
}

SpbmCadence spbm_cadence(const std::vector<SpbmRecord>& records) {
    if (records.size() < 3)
        throw InsufficientDataError("cadence estimation needs >= 3 records");

    SpbmCadence out;
    std::vector<double> gaps_ms;
    for (std::size_t i = 1; i < records.size(); ++i) {
        gaps_ms.push_back(static_cast<double>(records[i].t_ns - records[i - 1].t_ns) * 1e-6);
        // a stale read repeats the previous record's powers and accumulators
        if (records[i].rail_power_mw == records[i - 1].rail_power_mw &&
            records[i].energy_acc_mj == records[i - 1].energy_acc_mj)
            ++out.stale_reads;
    }
    std::sort(gaps_ms.begin(), gaps_ms.end());
    auto quantile = [&](double q) {
        double idx = q * (gaps_ms.size() - 1);
        std::size_t lo = static_cast<std::size_t>(idx);
        std::size_t hi = std::min(lo + 1, gaps_ms.size() - 1);
        double f = idx - lo;
        return gaps_ms[lo] * (1 - f) + gaps_ms[hi] * f;
    };
    out.median_interval_ms = quantile(0.5);
    out.iqr_ms = quantile(0.75) - quantile(0.25);
    return out;
}

SpbmCounterSeries spbm_as_counters(const std::vector<SpbmRecord>& records,
                                   SpbmDomain domain, const SpbmLayout& layout) {
    if (records.empty()) throw InsufficientDataError("no spbm records");
    SpbmCounterSeries out;
    out.counter.domain = domain == SpbmDomain::Gpu        ? EnergyDomain::Gpu
                         : domain == SpbmDomain::SocTotal ? EnergyDomain::SocTotal
                                                          : EnergyDomain::CpuCluster;
    if (domain == SpbmDomain::PCoreCluster) out.counter.cluster_name = "p_core";
    if (domain == SpbmDomain::ECoreCluster) out.counter.cluster_name = "e_core";
    out.counter.width_bits = layout.accumulator_width_bits;
    out.counter.microjoules_per_count = 1000.0;  // accumulators count millijoules
    int idx = static_cast<int>(domain);
    for (const auto& r : records)
        out.samples.push_back(RawSample{r.t_ns, r.energy_acc_mj[idx]});
    return out;
}

SpbmAccumulatorStats spbm_accumulator_stats(const std::vector<SpbmRecord>& records) {
    SpbmAccumulatorStats out;
    if (records.empty()) return out;
    double sum = 0.0;
    for (const auto& r : records) {
        double parts = static_cast<double>(r.energy_acc_mj[0]) +
                       static_cast<double>(r.energy_acc_mj[1]) +
                       static_cast<double>(r.energy_acc_mj[2]);
        double diff = static_cast<double>(r.energy_acc_mj[3]) - parts;
        sum += diff;
        out.max_abs_soc_minus_parts_mj =
            std::max(out.max_abs_soc_minus_parts_mj, std::abs(diff));
    }
    out.mean_soc_minus_parts_mj = sum / static_cast<double>(records.size());
    return out;
}

}  // namespace enaudit
