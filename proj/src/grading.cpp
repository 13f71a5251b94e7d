#include "enaudit/grading.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <optional>

namespace enaudit {

const char* capability_domain_name(CapabilityDomain d) {
    switch (d) {
        case CapabilityDomain::Cpu:    return "cpu";
        case CapabilityDomain::Gpu:    return "gpu";
        case CapabilityDomain::Dram:   return "dram";
        case CapabilityDomain::Io:     return "io";
        case CapabilityDomain::System: return "system";
    }
    return "?";
}

const char* check_outcome_name(CheckOutcome o) {
    switch (o) {
        case CheckOutcome::Pass:          return "pass";
        case CheckOutcome::Fail:          return "fail";
        case CheckOutcome::NotMeasurable: return "not-measurable";
    }
    return "?";
}

const char* grade_name(Grade g) {
    return g == Grade::Measured ? "MEASURED" : "LIMITED";
}

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::optional<CapabilityDomain> rail_label_domain(const std::string& label) {
    std::string l = lower(label);
    if (l.find("cpu") != std::string::npos) return CapabilityDomain::Cpu;
    if (l.find("gpu") != std::string::npos || l.find("gfx") != std::string::npos)
        return CapabilityDomain::Gpu;
    if (l.find("ddr") != std::string::npos || l.find("dram") != std::string::npos)
        return CapabilityDomain::Dram;
    if (l.find("soc") != std::string::npos || l.find("sys") != std::string::npos ||
        l.find("in") == 0 || l.find("vdd_total") != std::string::npos)
        return CapabilityDomain::System;
    return std::nullopt;
}

}  // namespace

CapabilityProfile derive_capabilities(
    const AuditReport& audit,
    const std::optional<CounterCharacterization>& counter_chars) {
    CapabilityProfile p;

    // powercap energy_uj domains: cumulative energy counters
    for (const auto& d : audit.rapl_domains) {
        std::string name = lower(d.name);
        if (name.find("dram") != std::string::npos)
            p.at(CapabilityDomain::Dram).cumulative_energy = true;
        else if (name.find("psys") != std::string::npos ||
                 name.find("platform") != std::string::npos)
            p.at(CapabilityDomain::System).cumulative_energy = true;
        else  // package-N, core, uncore all live in the CPU package domain
            p.at(CapabilityDomain::Cpu).cumulative_energy = true;
    }

    // SCMI powercap protocol exposed: CPU-domain measurement capability
    if (audit.scmi.powercap_present)
        p.at(CapabilityDomain::Cpu).cumulative_energy = true;

    bool ina_present = audit.result_for(Interface::InaI2c).status == ProbeStatus::Present;

    for (const auto& dev : audit.hwmon_devices) {
        if (dev.has_energy && dev.rail_labels.empty())
            p.at(CapabilityDomain::Cpu).cumulative_energy = true;
        for (const auto& label : dev.rail_labels) {
            auto domain = rail_label_domain(label);
            if (!domain) continue;
            if (dev.has_energy) p.at(*domain).cumulative_energy = true;
            if (dev.has_power) {
                p.at(*domain).instantaneous_power = true;
                // Per-rail board monitors (INA-backed, Jetson pattern) integrate
                // continuously; their rails count as measured energy capability.
                if (ina_present) p.at(*domain).cumulative_energy = true;
            }
        }
    }

    if (audit.gpu && audit.gpu->instantaneous_available) {
        p.at(CapabilityDomain::Gpu).instantaneous_power = true;
        if (audit.gpu->cumulative_available)
            p.at(CapabilityDomain::Gpu).cumulative_energy = true;
    }

    if (ina_present || audit.ipmi_present)
        p.at(CapabilityDomain::System).instantaneous_power = true;
    if (ina_present) p.at(CapabilityDomain::System).cumulative_energy = true;

    p.characterization = counter_chars;
    return p;
}

RequirementReport check_requirements(const CapabilityProfile& profile) {
    RequirementReport rep;

    bool any_cumulative = false;
    std::string cumulative_domains;
    for (auto d : kAllCapabilityDomains) {
        if (profile.at(d).cumulative_energy) {
            any_cumulative = true;
            if (!cumulative_domains.empty()) cumulative_domains += ", ";
            cumulative_domains += capability_domain_name(d);
        }
    }

    bool cpu_ok = profile.at(CapabilityDomain::Cpu).cumulative_energy;
    rep.checks.push_back(
        {"R1", cpu_ok ? CheckOutcome::Pass : CheckOutcome::Fail,
         cpu_ok ? "cumulative energy counters: " + cumulative_domains
                : "no CPU-domain cumulative energy counter" +
                      (any_cumulative ? " (counters found: " + cumulative_domains + ")"
                                      : std::string{})});

    char buf[160];
    if (!any_cumulative) {
        rep.checks.push_back({"R2", CheckOutcome::NotMeasurable, "no counters to time"});
        rep.checks.push_back({"R3", CheckOutcome::NotMeasurable, "no counters to characterize"});
    } else if (profile.characterization) {
        const auto& c = *profile.characterization;
        std::snprintf(buf, sizeof(buf), "median read latency %.4f ms", c.read_latency_ms);
        rep.checks.push_back({"R2",
                              c.read_latency_ms < 1.0 ? CheckOutcome::Pass : CheckOutcome::Fail,
                              buf});
        std::snprintf(buf, sizeof(buf), "resolution %.4f mJ", c.resolution_mj);
        rep.checks.push_back(
            {"R3", c.resolution_mj <= 1.0 ? CheckOutcome::Pass : CheckOutcome::Fail, buf});
    } else {
        rep.checks.push_back(
            {"R2", CheckOutcome::NotMeasurable, "latency not measured (fixture audit)"});
        rep.checks.push_back(
            {"R3", CheckOutcome::NotMeasurable, "resolution not measured (fixture audit)"});
    }

    const CapabilityDomain granularity[] = {CapabilityDomain::Cpu, CapabilityDomain::Gpu,
                                            CapabilityDomain::Dram, CapabilityDomain::Io};
    std::string covered, missing;
    for (auto d : granularity) {
        const auto& cap = profile.at(d);
        std::string& dest = (cap.cumulative_energy || cap.instantaneous_power) ? covered
                                                                               : missing;
        if (!dest.empty()) dest += ", ";
        dest += capability_domain_name(d);
    }
    rep.checks.push_back({"R4", missing.empty() ? CheckOutcome::Pass : CheckOutcome::Fail,
                          missing.empty() ? "domains separated: " + covered
                                          : "domains without measurement: " + missing});

    if (!any_cumulative) {
        rep.checks.push_back({"R5", CheckOutcome::NotMeasurable, "no counters to observe"});
    } else if (profile.characterization) {
        rep.checks.push_back({"R5",
                              profile.characterization->monotonic_with_wrap
                                  ? CheckOutcome::Pass
                                  : CheckOutcome::Fail,
                              profile.characterization->monotonic_with_wrap
                                  ? "monotonic with defined overflow semantics"
                                  : "counter not monotonic or wrap undefined"});
    } else {
        rep.checks.push_back(
            {"R5", CheckOutcome::NotMeasurable, "wrap behavior not observed (fixture audit)"});
    }

    rep.grade = cpu_ok ? Grade::Measured : Grade::Limited;
    return rep;
}

}  // namespace enaudit
