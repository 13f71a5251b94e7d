#pragma once

#include "enaudit/probe.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace enaudit {

enum class CapabilityDomain { Cpu, Gpu, Dram, Io, System };

inline constexpr CapabilityDomain kAllCapabilityDomains[] = {
    CapabilityDomain::Cpu, CapabilityDomain::Gpu, CapabilityDomain::Dram,
    CapabilityDomain::Io, CapabilityDomain::System,
};

const char* capability_domain_name(CapabilityDomain d);

struct DomainCapability {
    bool cumulative_energy = false;
    bool instantaneous_power = false;
};

// Measured counter characterization; only meaningful when some domain has a
// cumulative counter. Fixture audits cannot measure latency.
struct CounterCharacterization {
    double resolution_mj = 0.0;
    double read_latency_ms = 0.0;  // median of timed reads
    bool monotonic_with_wrap = false;
};

struct CapabilityProfile {
    std::array<DomainCapability, 5> domains{};  // indexed by CapabilityDomain
    std::optional<CounterCharacterization> characterization;

    DomainCapability& at(CapabilityDomain d) { return domains[static_cast<int>(d)]; }
    const DomainCapability& at(CapabilityDomain d) const {
        return domains[static_cast<int>(d)];
    }
};

enum class CheckOutcome { Pass, Fail, NotMeasurable };

const char* check_outcome_name(CheckOutcome o);

struct RequirementCheck {
    std::string id;  // R1..R5, stable identifiers in the JSON schema
    CheckOutcome outcome = CheckOutcome::Fail;
    std::string evidence;
};

enum class Grade { Measured, Limited };

const char* grade_name(Grade g);

struct RequirementReport {
    std::vector<RequirementCheck> checks;
    Grade grade = Grade::Limited;
};

// Maps audit findings to per-domain capability bits.
CapabilityProfile derive_capabilities(
    const AuditReport& audit,
    const std::optional<CounterCharacterization>& counter_chars = std::nullopt);

// R1: per-domain cumulative counters (CPU mandatory) - gates the grade.
// R2: read latency < 1 ms. R3: resolution <= 1 mJ. R4: CPU/GPU/DRAM/I-O
// granularity. R5: monotonic counters with defined overflow semantics.
// R2-R5 annotate the grade; MEASURED iff R1 passes for the CPU domain.
RequirementReport check_requirements(const CapabilityProfile& profile);

}  // namespace enaudit
