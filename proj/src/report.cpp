#include "enaudit/report.hpp"

#include "enaudit/errors.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace enaudit {

using ojson = nlohmann::ordered_json;

namespace {

// Energies carry 9 significant digits; re-parsing the fixed-format string
// pins the double to one deterministic value before serialization.
double sig9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return std::strtod(buf, nullptr);
}

Interface interface_from_name(const std::string& name) {
    for (auto i : kAllInterfaces)
        if (name == interface_name(i)) return i;
    throw ParseError("unknown interface name: " + name);
}

ProbeStatus status_from_name(const std::string& name) {
    if (name == "Present") return ProbeStatus::Present;
    if (name == "Absent") return ProbeStatus::Absent;
    if (name == "PartiallyPresent") return ProbeStatus::PartiallyPresent;
    throw ParseError("unknown probe status: " + name);
}

CheckOutcome outcome_from_name(const std::string& name) {
    if (name == "pass") return CheckOutcome::Pass;
    if (name == "fail") return CheckOutcome::Fail;
    if (name == "not-measurable") return CheckOutcome::NotMeasurable;
    throw ParseError("unknown check outcome: " + name);
}

ojson audit_to_json(const AuditReport& a) {
    ojson j;
    j["platform"] = a.platform;
    j["timestamp_unix_s"] = a.timestamp_unix_s;
    ojson results = ojson::array();
    for (const auto& r : a.results) {
        ojson row;
        row["interface"] = interface_name(r.interface);
        row["probe_method"] = interface_probe_method(r.interface);
        row["status"] = status_name(r.status);
        row["detail"] = r.detail;
        results.push_back(std::move(row));
    }
    j["results"] = std::move(results);
    if (!a.notes.empty()) j["notes"] = a.notes;

    ojson scmi;
    scmi["bus_registered"] = a.scmi.bus_registered;
    scmi["loaded_drivers"] = a.scmi.loaded_drivers;
    scmi["powercap_present"] = a.scmi.powercap_present;
    scmi["sensor_present"] = a.scmi.sensor_present;
    scmi["device_count"] = a.scmi.device_count;
    j["scmi"] = std::move(scmi);

    ojson hwmon = ojson::array();
    for (const auto& d : a.hwmon_devices) {
        ojson dev;
        dev["name"] = d.name;
        dev["chip"] = d.chip;
        dev["has_energy"] = d.has_energy;
        dev["has_power"] = d.has_power;
        dev["has_temp"] = d.has_temp;
        dev["has_other"] = d.has_other;
        dev["rail_labels"] = d.rail_labels;
        hwmon.push_back(std::move(dev));
    }
    j["hwmon_devices"] = std::move(hwmon);

    ojson rapl = ojson::array();
    for (const auto& d : a.rapl_domains) {
        ojson dom;
        dom["name"] = d.name;
        dom["energy_uj"] = d.energy_uj;
        dom["max_energy_range_uj"] = d.max_energy_range_uj;
        rapl.push_back(std::move(dom));
    }
    j["rapl_domains"] = std::move(rapl);

    if (a.gpu) {
        ojson gpu;
        gpu["instantaneous_available"] = a.gpu->instantaneous_available;
        gpu["cumulative_available"] = a.gpu->cumulative_available;
        gpu["watts"] = sig9(a.gpu->watts);
        if (!a.gpu->note.empty()) gpu["note"] = a.gpu->note;
        j["gpu"] = std::move(gpu);
    }

    ojson i2c;
    for (const auto& [bus, addrs] : a.i2c) i2c[std::to_string(bus)] = addrs;
    j["i2c_scan"] = std::move(i2c);
    j["i2c_bus_count"] = a.i2c_bus_count;
    j["ipmi_present"] = a.ipmi_present;
    return j;
}

AuditReport audit_from_json(const ojson& j) {
    AuditReport a;
    a.platform = j.at("platform").get<std::string>();
    a.timestamp_unix_s = j.at("timestamp_unix_s").get<std::int64_t>();
    for (const auto& row : j.at("results")) {
        ProbeResult r{interface_from_name(row.at("interface").get<std::string>())};
        r.status = status_from_name(row.at("status").get<std::string>());
        r.detail = row.at("detail").get<std::vector<std::string>>();
        a.results.push_back(std::move(r));
    }
    if (j.contains("notes")) a.notes = j.at("notes").get<std::string>();

    const auto& scmi = j.at("scmi");
    a.scmi.bus_registered = scmi.at("bus_registered").get<bool>();
    a.scmi.loaded_drivers = scmi.at("loaded_drivers").get<std::vector<std::string>>();
    a.scmi.powercap_present = scmi.at("powercap_present").get<bool>();
    a.scmi.sensor_present = scmi.at("sensor_present").get<bool>();
    a.scmi.device_count = scmi.at("device_count").get<int>();

    for (const auto& dev : j.at("hwmon_devices")) {
        HwmonDevice d;
        d.name = dev.at("name").get<std::string>();
        d.chip = dev.at("chip").get<std::string>();
        d.has_energy = dev.at("has_energy").get<bool>();
        d.has_power = dev.at("has_power").get<bool>();
        d.has_temp = dev.at("has_temp").get<bool>();
        d.has_other = dev.at("has_other").get<bool>();
        d.rail_labels = dev.at("rail_labels").get<std::vector<std::string>>();
        a.hwmon_devices.push_back(std::move(d));
    }
    for (const auto& dom : j.at("rapl_domains")) {
        RaplDomain d;
        d.name = dom.at("name").get<std::string>();
        d.energy_uj = dom.at("energy_uj").get<std::uint64_t>();
        d.max_energy_range_uj = dom.at("max_energy_range_uj").get<std::uint64_t>();
        a.rapl_domains.push_back(std::move(d));
    }
    if (j.contains("gpu")) {
        GpuPowerReading g;
        g.instantaneous_available = j["gpu"].at("instantaneous_available").get<bool>();
        g.cumulative_available = j["gpu"].at("cumulative_available").get<bool>();
        g.watts = j["gpu"].at("watts").get<double>();
        if (j["gpu"].contains("note")) g.note = j["gpu"]["note"].get<std::string>();
        a.gpu = g;
    }
    for (const auto& [key, addrs] : j.at("i2c_scan").items())
        a.i2c[std::atoi(key.c_str())] = addrs.get<std::vector<int>>();
    a.i2c_bus_count = j.at("i2c_bus_count").get<int>();
    a.ipmi_present = j.at("ipmi_present").get<bool>();
    return a;
}

ojson capabilities_to_json(const CapabilityProfile& p) {
    ojson j;
    for (auto d : kAllCapabilityDomains) {
        ojson dom;
        dom["cumulative_energy"] = p.at(d).cumulative_energy;
        dom["instantaneous_power"] = p.at(d).instantaneous_power;
        j[capability_domain_name(d)] = std::move(dom);
    }
    if (p.characterization) {
        ojson c;
        c["resolution_mj"] = sig9(p.characterization->resolution_mj);
        c["read_latency_ms"] = sig9(p.characterization->read_latency_ms);
        c["monotonic_with_wrap"] = p.characterization->monotonic_with_wrap;
        j["characterization"] = std::move(c);
    }
    return j;
}

CapabilityProfile capabilities_from_json(const ojson& j) {
    CapabilityProfile p;
    for (auto d : kAllCapabilityDomains) {
        const auto& dom = j.at(capability_domain_name(d));
        p.at(d).cumulative_energy = dom.at("cumulative_energy").get<bool>();
        p.at(d).instantaneous_power = dom.at("instantaneous_power").get<bool>();
    }
    if (j.contains("characterization")) {
        CounterCharacterization c;
        c.resolution_mj = j["characterization"].at("resolution_mj").get<double>();
        c.read_latency_ms = j["characterization"].at("read_latency_ms").get<double>();
        c.monotonic_with_wrap = j["characterization"].at("monotonic_with_wrap").get<bool>();
        p.characterization = c;
    }
    return p;
}

ojson grade_to_json(const RequirementReport& g) {
    ojson j;
    ojson checks = ojson::array();
    for (const auto& c : g.checks) {
        ojson row;
        row["id"] = c.id;
        row["outcome"] = check_outcome_name(c.outcome);
        row["evidence"] = c.evidence;
        checks.push_back(std::move(row));
    }
    j["checks"] = std::move(checks);
    j["grade"] = grade_name(g.grade);
    return j;
}

RequirementReport grade_from_json(const ojson& j) {
    RequirementReport g;
    for (const auto& row : j.at("checks")) {
        RequirementCheck c;
        c.id = row.at("id").get<std::string>();
        c.outcome = outcome_from_name(row.at("outcome").get<std::string>());
        c.evidence = row.at("evidence").get<std::string>();
        g.checks.push_back(std::move(c));
    }
    std::string grade = j.at("grade").get<std::string>();
    g.grade = grade == "MEASURED" ? Grade::Measured : Grade::Limited;
    return g;
}

ojson attribution_to_json(const AttributionRecord& r) {
    ojson j;
    j["t0_ns"] = r.t0_ns;
    j["t1_ns"] = r.t1_ns;
    j["e_pkg_j"] = sig9(r.e_pkg_j);
    j["idle_power_w"] = sig9(r.idle_power_w);
    j["e_task_j"] = sig9(r.e_task_j);
    ojson rows = ojson::array();
    for (const auto& row : r.rows) {
        ojson x;
        x["pid"] = row.pid;
        x["ticks"] = row.ticks;
        x["fraction"] = sig9(row.fraction);
        x["e_pid_j"] = sig9(row.e_pid_j);
        rows.push_back(std::move(x));
    }
    j["rows"] = std::move(rows);
    j["residual_j"] = sig9(r.residual_j);
    j["channel"] = r.channel;
    j["warnings"] = r.warnings;
    return j;
}

AttributionRecord attribution_from_json(const ojson& j) {
    AttributionRecord r;
    r.t0_ns = j.at("t0_ns").get<std::uint64_t>();
    r.t1_ns = j.at("t1_ns").get<std::uint64_t>();
    r.e_pkg_j = j.at("e_pkg_j").get<double>();
    r.idle_power_w = j.at("idle_power_w").get<double>();
    r.e_task_j = j.at("e_task_j").get<double>();
    for (const auto& x : j.at("rows")) {
        AttributionRecord::Row row;
        row.pid = x.at("pid").get<int>();
        row.ticks = x.at("ticks").get<std::uint64_t>();
        row.fraction = x.at("fraction").get<double>();
        row.e_pid_j = x.at("e_pid_j").get<double>();
        r.rows.push_back(row);
    }
    r.residual_j = j.at("residual_j").get<double>();
    r.channel = j.at("channel").get<std::string>();
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    return r;
}

ojson bridge_to_json(const BridgeDecomposition& d) {
    ojson j;
    j["t0_ns"] = d.t0_ns;
    j["t1_ns"] = d.t1_ns;
    j["e_total_j"] = sig9(d.e_total_j);
    j["e_gpu_j"] = sig9(d.e_gpu_j);
    j["e_cpu_sys_j"] = sig9(d.e_cpu_sys_j);
    j["meter_rate_hz"] = sig9(d.meter_rate_hz);
    j["gpu_rate_hz"] = sig9(d.gpu_rate_hz);
    j["warnings"] = d.warnings;
    return j;
}

BridgeDecomposition bridge_from_json(const ojson& j) {
    BridgeDecomposition d;
    d.t0_ns = j.at("t0_ns").get<std::uint64_t>();
    d.t1_ns = j.at("t1_ns").get<std::uint64_t>();
    d.e_total_j = j.at("e_total_j").get<double>();
    d.e_gpu_j = j.at("e_gpu_j").get<double>();
    d.e_cpu_sys_j = j.at("e_cpu_sys_j").get<double>();
    d.meter_rate_hz = j.at("meter_rate_hz").get<double>();
    d.gpu_rate_hz = j.at("gpu_rate_hz").get<double>();
    d.warnings = j.at("warnings").get<std::vector<std::string>>();
    return d;
}

}  // namespace

std::string emit_json(const ReportBundle& bundle) {
    ojson j;
    j["schema_version"] = bundle.schema_version;
    j["tool_version"] = bundle.tool_version;
    j["audit"] = audit_to_json(bundle.audit);
    if (bundle.capabilities) j["capabilities"] = capabilities_to_json(*bundle.capabilities);
    if (bundle.grade) j["grade"] = grade_to_json(*bundle.grade);
    if (!bundle.attribution.empty()) {
        ojson arr = ojson::array();
        for (const auto& r : bundle.attribution) arr.push_back(attribution_to_json(r));
        j["attribution"] = std::move(arr);
    }
    if (!bundle.bridge.empty()) {
        ojson arr = ojson::array();
        for (const auto& d : bundle.bridge) arr.push_back(bridge_to_json(d));
        j["bridge"] = std::move(arr);
    }
    return j.dump(2) + "\n";
}

ReportBundle parse_report_bundle(const std::string& json_text) {
    ojson j = ojson::parse(json_text);
    ReportBundle b;
    b.schema_version = j.at("schema_version").get<int>();
    b.tool_version = j.at("tool_version").get<std::string>();
    b.audit = audit_from_json(j.at("audit"));
    if (j.contains("capabilities")) b.capabilities = capabilities_from_json(j["capabilities"]);
    if (j.contains("grade")) b.grade = grade_from_json(j["grade"]);
    if (j.contains("attribution"))
        for (const auto& r : j["attribution"]) b.attribution.push_back(attribution_from_json(r));
    if (j.contains("bridge"))
        for (const auto& d : j["bridge"]) b.bridge.push_back(bridge_from_json(d));
    return b;
}

std::string emit_markdown_audit(const AuditReport& audit) {
    std::ostringstream out;
    out << "# Energy measurement interface audit";
    if (!audit.platform.empty()) out << ": " << audit.platform;
    out << "\n\n";
    out << "| Interface | Probe Method | Result |\n";
    out << "| --- | --- | --- |\n";
    for (const auto& r : audit.results) {
        out << "| " << interface_name(r.interface) << " | `"
            << interface_probe_method(r.interface) << "` | " << status_name(r.status)
            << ".";
        for (const auto& d : r.detail) out << " " << d;
        out << " |\n";
    }
    if (!audit.notes.empty()) out << "\n" << audit.notes << "\n";
    return out.str();
}

std::string emit_markdown_grade(const RequirementReport& grade,
                                const CapabilityProfile& profile) {
    std::ostringstream out;
    out << "# Energy attribution capability\n\n";
    out << "| Domain | Cumulative energy | Instantaneous power |\n";
    out << "| --- | --- | --- |\n";
    for (auto d : kAllCapabilityDomains) {
        out << "| " << capability_domain_name(d) << " | "
            << (profile.at(d).cumulative_energy ? "yes" : "no") << " | "
            << (profile.at(d).instantaneous_power ? "yes" : "no") << " |\n";
    }
    out << "\n| Requirement | Outcome | Evidence |\n";
    out << "| --- | --- | --- |\n";
    for (const auto& c : grade.checks)
        out << "| " << c.id << " | " << check_outcome_name(c.outcome) << " | " << c.evidence
            << " |\n";
    out << "\nGrade: " << grade_name(grade.grade) << "\n";
    return out.str();
}

std::string emit_text_attribution(const AttributionRecord& rec) {
    std::ostringstream out;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "window %llu %llu e_pkg_j=%.9g idle_power_w=%.9g e_task_j=%.9g channel=%s\n",
                  static_cast<unsigned long long>(rec.t0_ns),
                  static_cast<unsigned long long>(rec.t1_ns), rec.e_pkg_j, rec.idle_power_w,
                  rec.e_task_j, rec.channel.c_str());
    out << buf;
    for (const auto& row : rec.rows) {
        std::snprintf(buf, sizeof(buf), "pid %d ticks=%llu fraction=%.9g e_pid_j=%.9g\n",
                      row.pid, static_cast<unsigned long long>(row.ticks), row.fraction,
                      row.e_pid_j);
        out << buf;
    }
    std::snprintf(buf, sizeof(buf), "residual_j=%.9g\n", rec.residual_j);
    out << buf;
    for (const auto& w : rec.warnings) out << "warning: " << w << "\n";
    return out.str();
}

std::string emit_text_decomposition(const BridgeDecomposition& d) {
    std::ostringstream out;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "t0_ns=%llu t1_ns=%llu e_total_j=%.9g e_gpu_j=%.9g e_cpu_sys_j=%.9g\n",
                  static_cast<unsigned long long>(d.t0_ns),
                  static_cast<unsigned long long>(d.t1_ns), d.e_total_j, d.e_gpu_j,
                  d.e_cpu_sys_j);
    out << buf;
    for (const auto& w : d.warnings) out << "warning: " << w << "\n";
    return out.str();
}

void normalize_timestamps(ReportBundle& bundle) {
    bundle.audit.timestamp_unix_s = 0;
}

}  // namespace enaudit
