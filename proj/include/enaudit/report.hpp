#pragma once

#include "enaudit/attribution.hpp"
#include "enaudit/bridge.hpp"
#include "enaudit/grading.hpp"
#include "enaudit/probe.hpp"

#include <optional>
#include <string>
#include <vector>

namespace enaudit {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

struct ReportBundle {
    AuditReport audit;
    std::optional<CapabilityProfile> capabilities;
    std::optional<RequirementReport> grade;
    std::vector<AttributionRecord> attribution;     // key absent when empty
    std::vector<BridgeDecomposition> bridge;        // key absent when empty
    std::string tool_version = kToolVersion;
    int schema_version = kSchemaVersion;
};

// Deterministic JSON: stable key order, energies rounded to 9 significant
// digits, UTF-8. Same bundle in, identical bytes out.
std::string emit_json(const ReportBundle& bundle);

ReportBundle parse_report_bundle(const std::string& json_text);

// One row per interface: Interface | Probe Method | Result.
std::string emit_markdown_audit(const AuditReport& audit);

std::string emit_markdown_grade(const RequirementReport& grade,
                                const CapabilityProfile& profile);

// Stable-field-order text records.
std::string emit_text_attribution(const AttributionRecord& rec);
std::string emit_text_decomposition(const BridgeDecomposition& d);

// Zeroes the wall-clock timestamp so fixture outputs compare byte-identical.
void normalize_timestamps(ReportBundle& bundle);

}  // namespace enaudit
