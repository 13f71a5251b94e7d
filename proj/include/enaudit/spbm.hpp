#pragma once

#include "enaudit/counters.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace enaudit {

enum class SpbmDomain { PCoreCluster, ECoreCluster, Gpu, SocTotal };

const char* spbm_domain_name(SpbmDomain d);

// Record layout descriptor. The on-device byte layout is undocumented, so the
// fixture format is defined here and fully parameterized: a reverse-engineered
// real layout drops in as a different descriptor, no code changes.
//
// Default layout (little-endian, fixed width):
//   u64 t_ns | rail_count x u32 mW | 4 x u64 accumulator mJ | temp_count x i16 centi-degC
struct SpbmLayout {
    std::size_t record_size = 112;
    bool little_endian = true;
    std::size_t timestamp_offset = 0;
    int rail_count = 14;
    std::size_t rails_offset = 8;
    std::size_t accumulators_offset = 64;
    int accumulator_width_bits = 64;
    int temp_count = 8;
    std::size_t temps_offset = 96;
    // plausibility bounds; violations yield per-record decode warnings
    std::uint32_t max_rail_mw = 1'000'000;       // 1 kW per rail
    double min_temp_c = -40.0, max_temp_c = 150.0;
};

SpbmLayout load_spbm_layout(const std::string& file_path);
SpbmLayout parse_spbm_layout(const std::string& text);

struct SpbmRecord {
    std::uint64_t t_ns = 0;
    std::vector<std::uint32_t> rail_power_mw;
    std::array<std::uint64_t, 4> energy_acc_mj{};  // indexed by SpbmDomain
    std::vector<double> temps_c;
    std::vector<std::string> decode_warnings;
};

std::vector<SpbmRecord> decode_spbm_stream(const std::vector<std::uint8_t>& blob,
                                           const SpbmLayout& layout);
std::vector<std::uint8_t> encode_spbm_stream(const std::vector<SpbmRecord>& records,
                                             const SpbmLayout& layout);

std::vector<std::uint8_t> load_blob(const std::string& file_path);

struct SpbmCadence {
    double median_interval_ms = 0.0;
    double iqr_ms = 0.0;
    int stale_reads = 0;  // consecutive records with unchanged powers and accumulators
};

SpbmCadence spbm_cadence(const std::vector<SpbmRecord>& records);

struct SpbmCounterSeries {
    std::vector<RawSample> samples;
    EnergyCounter counter;
};

// Adapts one accumulator stream into raw counter samples (millijoule counts,
// layout-declared width) consumable by the counters pipeline.
SpbmCounterSeries spbm_as_counters(const std::vector<SpbmRecord>& records,
                                   SpbmDomain domain, const SpbmLayout& layout);

// Observational only: how SocTotal compares to the cluster+GPU sum per record.
// The coverage of SocTotal is not defined by the source; nothing is asserted.
struct SpbmAccumulatorStats {
    double mean_soc_minus_parts_mj = 0.0;
    double max_abs_soc_minus_parts_mj = 0.0;
};

SpbmAccumulatorStats spbm_accumulator_stats(const std::vector<SpbmRecord>& records);

}  // namespace enaudit
