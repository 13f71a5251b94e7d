#include "enaudit/probe.hpp"

#include "enaudit/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>

#ifdef __linux__
#include <fcntl.h>
#include <sys/ioctl.h>
#include <unistd.h>
#ifdef __has_include
#if __has_include(<linux/i2c-dev.h>)
#include <linux/i2c-dev.h>
#define ENAUDIT_HAVE_I2C_DEV 1
#endif
#endif
#endif

namespace enaudit {

namespace {

constexpr const char* kScmiDriversPath = "/sys/bus/scmi_protocol/drivers";
constexpr const char* kScmiDevicesPath = "/sys/bus/scmi_protocol/devices";
constexpr const char* kHwmonPath = "/sys/class/hwmon";
constexpr const char* kPowerSupplyPath = "/sys/class/power_supply";
constexpr const char* kIpmiPath = "/dev/ipmi0";
constexpr int kInaAddrLow = 0x40;
constexpr int kInaAddrHigh = 0x4F;

std::string to_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    auto e = s.find_last_not_of(" \t\r\n");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

std::string join(const std::vector<std::string>& v, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        out += v[i];
    }
    return out;
}

std::string format_watts(double w) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", w);
    return buf;
}

bool matches_number_attr(const std::string& name, const char* stem, const char* tail) {
    // e.g. stem="power", tail="_input" matches power1_input, power12_input
    std::size_t sl = std::strlen(stem);
    if (name.compare(0, sl, stem) != 0) return false;
    std::size_t i = sl;
    while (i < name.size() && std::isdigit(static_cast<unsigned char>(name[i]))) ++i;
    if (i == sl) return false;
    return name.compare(i, std::string::npos, tail) == 0;
}

}  // namespace

const char* interface_name(Interface i) {
    switch (i) {
        case Interface::ScmiPowercap:    return "ARM SCMI powercap";
        case Interface::PmuEnergyEvents: return "ARM PMU energy events";
        case Interface::InaI2c:          return "INA3221/INA226";
        case Interface::Ipmi:            return "IPMI/BMC";
        case Interface::HwmonEnergy:     return "hwmon energy/power";
        case Interface::PowerSupply:     return "Power supply subsystem";
        case Interface::GpuPower:        return "NVML (GPU only)";
    }
    return "?";
}

const char* interface_probe_method(Interface i) {
    switch (i) {
        case Interface::ScmiPowercap:    return "/sys/bus/scmi_protocol/drivers/";
        case Interface::PmuEnergyEvents: return "perf list | grep energy|power|rapl";
        case Interface::InaI2c:          return "i2cdetect on all I2C buses";
        case Interface::Ipmi:            return "/dev/ipmi0";
        case Interface::HwmonEnergy:     return "find /sys -name \"energy_uj\" / \"power*_input\"";
        case Interface::PowerSupply:     return "/sys/class/power_supply/*/";
        case Interface::GpuPower:        return "nvidia-smi -q -d POWER";
    }
    return "?";
}

const char* status_name(ProbeStatus s) {
    switch (s) {
        case ProbeStatus::Present:          return "Present";
        case ProbeStatus::Absent:           return "Absent";
        case ProbeStatus::PartiallyPresent: return "PartiallyPresent";
    }
    return "?";
}

const ProbeResult& AuditReport::result_for(Interface i) const {
    for (const auto& r : results)
        if (r.interface == i) return r;
    throw Error("audit report missing interface result");
}

ScmiFindings probe_scmi(const SystemTree& tree) {
    ScmiFindings f;
    f.bus_registered = tree.is_directory(kScmiDriversPath) ||
                       tree.is_directory(kScmiDevicesPath);
    f.loaded_drivers = tree.list_directory(kScmiDriversPath);
    for (const auto& d : f.loaded_drivers) {
        std::string lower = to_lower(d);
        if (lower.find("powercap") != std::string::npos) f.powercap_present = true;
        if (lower.find("sensor") != std::string::npos) f.sensor_present = true;
    }
    f.device_count = static_cast<int>(tree.list_directory(kScmiDevicesPath).size());
    return f;
}

namespace {

ProbeResult scmi_result(const ScmiFindings& f) {
    ProbeResult r{Interface::ScmiPowercap};
    if (!f.bus_registered) {
        r.status = ProbeStatus::Absent;
        r.detail = {"SCMI protocol bus not registered."};
        return r;
    }
    r.status = f.powercap_present ? ProbeStatus::Present : ProbeStatus::Absent;
    std::string drivers = f.loaded_drivers.empty()
                              ? "Bus active. No protocol drivers loaded."
                              : "Bus active. Drivers: " + join(f.loaded_drivers, ", ") + ".";
    r.detail.push_back(drivers);
    r.detail.push_back(std::string(f.powercap_present ? "Powercap loaded." : "No powercap.") +
                       (f.sensor_present ? " Sensor loaded." : " No sensor."));
    r.detail.push_back(std::to_string(f.device_count) + " devices registered.");
    return r;
}

bool is_tracepoint(const std::string& name) {
    // perf tracepoints carry a subsystem prefix ("power:cpu_idle"); hardware
    // events do not
    return name.find(':') != std::string::npos;
}

}  // namespace

ProbeResult probe_pmu_energy_events(const std::vector<std::string>& event_names) {
    ProbeResult r{Interface::PmuEnergyEvents};
    std::vector<std::string> matches;
    int excluded_tracepoints = 0;
    for (const auto& name : event_names) {
        std::string lower = to_lower(name);
        bool energyish = lower.find("energy") != std::string::npos ||
                         lower.find("power") != std::string::npos ||
                         lower.find("rapl") != std::string::npos;
        if (!energyish) continue;
        if (is_tracepoint(name)) {
            ++excluded_tracepoints;
            continue;
        }
        matches.push_back(name);
    }
    if (matches.empty()) {
        r.status = ProbeStatus::Absent;
        r.detail.push_back("Zero hardware energy events.");
        if (excluded_tracepoints > 0)
            r.detail.push_back("Only tracepoints for CPU idle/freq transitions (" +
                               std::to_string(excluded_tracepoints) + " excluded).");
        r.detail.push_back(std::to_string(event_names.size()) + " events searched.");
    } else {
        r.status = ProbeStatus::Present;
        r.detail.push_back("Energy events: " + join(matches, ", "));
    }
    return r;
}

ProbeResult probe_ina_i2c(const I2cScan& bus_scans) {
    ProbeResult r{Interface::InaI2c};
    std::vector<std::string> hits;
    for (const auto& [bus, addrs] : bus_scans) {
        for (int a : addrs) {
            if (a < 0x00 || a > 0x7F)
                throw InputError("i2c address out of 7-bit range: " + std::to_string(a));
            if (a >= kInaAddrLow && a <= kInaAddrHigh) {
                char buf[32];
                std::snprintf(buf, sizeof(buf), "(bus %d, 0x%02X)", bus, a);
                hits.push_back(buf);
            }
        }
    }
    if (hits.empty()) {
        r.status = ProbeStatus::Absent;
        r.detail.push_back("Zero devices at 0x40-0x4F.");
        bool all_empty = std::all_of(bus_scans.begin(), bus_scans.end(),
                                     [](const auto& kv) { return kv.second.empty(); });
        r.detail.push_back(all_empty
                               ? "All " + std::to_string(bus_scans.size()) + " buses empty."
                               : std::to_string(bus_scans.size()) +
                                     " buses scanned; responders outside monitored range.");
    } else {
        r.status = ProbeStatus::Present;
        r.detail.push_back("Devices at " + join(hits, ", "));
    }
    return r;
}

ProbeResult probe_ipmi(const SystemTree& tree) {
    ProbeResult r{Interface::Ipmi};
    if (tree.is_unreadable(kIpmiPath)) {
        r.status = ProbeStatus::PartiallyPresent;
        r.detail.push_back("/dev/ipmi0 present but unreadable (permission?).");
    } else if (tree.exists(kIpmiPath)) {
        r.status = ProbeStatus::Present;
        r.detail.push_back("/dev/ipmi0 present.");
    } else {
        r.status = ProbeStatus::Absent;
        r.detail.push_back("/dev/ipmi0: no such file or directory");
    }
    return r;
}

ProbeResult probe_hwmon(const SystemTree& tree, std::vector<HwmonDevice>* devices) {
    ProbeResult r{Interface::HwmonEnergy};
    std::vector<HwmonDevice> devs;
    for (const auto& name : tree.list_directory(kHwmonPath)) {
        std::string dir = std::string(kHwmonPath) + "/" + name;
        if (!tree.is_directory(dir)) continue;
        HwmonDevice d;
        d.name = name;
        if (auto chip = tree.read_file(dir + "/name")) d.chip = trim(*chip);
        for (const auto& attr : tree.list_directory(dir)) {
            if (attr == "name") continue;
            if (matches_number_attr(attr, "energy", "_input") || attr == "energy_uj")
                d.has_energy = true;
            else if (matches_number_attr(attr, "power", "_input"))
                d.has_power = true;
            else if (matches_number_attr(attr, "temp", "_input"))
                d.has_temp = true;
            else if (matches_number_attr(attr, "power", "_label") ||
                     matches_number_attr(attr, "energy", "_label")) {
                if (auto label = tree.read_file(dir + "/" + attr))
                    d.rail_labels.push_back(trim(*label));
            } else if (attr.ends_with("_input"))
                d.has_other = true;
        }
        devs.push_back(std::move(d));
    }

    bool any_energy = false, any_power = false;
    for (const auto& d : devs) {
        any_energy |= d.has_energy;
        any_power |= d.has_power;
        std::vector<std::string> kinds;
        if (d.has_energy) kinds.push_back("energy");
        if (d.has_power) kinds.push_back("power");
        if (d.has_temp) kinds.push_back("temp");
        if (d.has_other) kinds.push_back("other");
        std::string line = d.name + " (" + (d.chip.empty() ? "?" : d.chip) + "): ";
        if (kinds.empty())
            line += "no sensors.";
        else if (kinds.size() == 1)
            line += kinds[0] + " only.";
        else
            line += join(kinds, "+") + ".";
        if (!d.rail_labels.empty()) line += " Rails: " + join(d.rail_labels, ", ") + ".";
        r.detail.push_back(line);
    }
    if (devs.empty()) r.detail.push_back("No hwmon devices.");
    r.status = (any_energy || any_power) ? ProbeStatus::Present : ProbeStatus::Absent;
    if (devices) *devices = std::move(devs);
    return r;
}

ProbeResult probe_power_supply(const SystemTree& tree) {
    ProbeResult r{Interface::PowerSupply};
    auto entries = tree.list_directory(kPowerSupplyPath);
    if (entries.empty()) {
        r.status = ProbeStatus::Absent;
        r.detail.push_back("Empty - no batteries, no PMIC reporting.");
    } else {
        r.status = ProbeStatus::Present;
        r.detail.push_back("Supplies: " + join(entries, ", ") + ".");
    }
    return r;
}

ProbeResult probe_rapl_powercap(const SystemTree& tree, std::vector<RaplDomain>* domains) {
    ProbeResult r{Interface::HwmonEnergy};  // internal check; interface tag unused
    std::vector<RaplDomain> found;
    for (const auto& path : tree.find_files_named("energy_uj")) {
        RaplDomain d;
        std::string dir = path.substr(0, path.rfind('/'));
        if (auto name = tree.read_file(dir + "/name"))
            d.name = trim(*name);
        else
            d.name = dir.substr(dir.rfind('/') + 1);
        if (auto v = tree.read_file(path)) d.energy_uj = std::strtoull(v->c_str(), nullptr, 10);
        if (auto v = tree.read_file(dir + "/max_energy_range_uj"))
            d.max_energy_range_uj = std::strtoull(v->c_str(), nullptr, 10);
        found.push_back(std::move(d));
    }
    if (found.empty()) {
        r.status = ProbeStatus::Absent;
        r.detail.push_back("No results.");
    } else {
        r.status = ProbeStatus::Present;
        for (const auto& d : found) {
            std::string line = d.name + ": energy_uj=" + std::to_string(d.energy_uj);
            if (d.max_energy_range_uj)
                line += ", max_energy_range_uj=" + std::to_string(d.max_energy_range_uj);
            r.detail.push_back(line);
        }
    }
    if (domains) *domains = std::move(found);
    return r;
}

ProbeResult probe_gpu_power(const GpuPowerAdapter& source,
                            std::optional<GpuPowerReading>* reading) {
    ProbeResult r{Interface::GpuPower};
    auto q = source.query();
    if (reading) *reading = q;
    if (!q || !q->instantaneous_available) {
        r.status = ProbeStatus::Absent;
        r.detail.push_back(q ? "No GPU power reading available."
                             : "GPU power query failed.");
        return r;
    }
    r.status = ProbeStatus::Present;
    r.detail.push_back("GPU: " + format_watts(q->watts) + " W avg.");
    r.detail.push_back(q->cumulative_available ? "Cumulative energy counter available."
                                               : "No cumulative energy counter.");
    if (!q->note.empty()) r.detail.push_back(q->note);
    return r;
}

AuditReport run_audit(const SystemTree& tree,
                      const std::vector<std::string>& pmu_events,
                      const I2cScan& i2c_scans,
                      const GpuPowerAdapter& gpu_adapter,
                      const std::string& platform) {
    AuditReport rep;
    rep.platform = platform;
    rep.timestamp_unix_s = static_cast<std::int64_t>(std::time(nullptr));
    rep.i2c = i2c_scans;
    rep.i2c_bus_count = static_cast<int>(i2c_scans.size());

    rep.scmi = probe_scmi(tree);
    rep.results.push_back(scmi_result(rep.scmi));
    rep.results.push_back(probe_pmu_energy_events(pmu_events));
    rep.results.push_back(probe_ina_i2c(i2c_scans));
    ProbeResult ipmi = probe_ipmi(tree);
    rep.ipmi_present = ipmi.status == ProbeStatus::Present;
    rep.results.push_back(std::move(ipmi));

    ProbeResult hwmon = probe_hwmon(tree, &rep.hwmon_devices);
    // powercap energy_uj is audited as a sibling of the hwmon search (same
    // "find /sys -name energy_uj" target) and kept as its own capability bit
    ProbeResult rapl = probe_rapl_powercap(tree, &rep.rapl_domains);
    if (rapl.status == ProbeStatus::Present) {
        hwmon.status = ProbeStatus::Present;
        for (const auto& line : rapl.detail) hwmon.detail.push_back("powercap " + line);
    } else {
        hwmon.detail.insert(hwmon.detail.begin(), "energy_uj: No results.");
    }
    rep.results.push_back(std::move(hwmon));

    rep.results.push_back(probe_power_supply(tree));
    rep.results.push_back(probe_gpu_power(gpu_adapter, &rep.gpu));
    return rep;
}

std::optional<GpuPowerReading> FixtureGpuAdapter::query() const {
    std::ifstream in(path_);
    if (!in) return std::nullopt;
    GpuPowerReading g;
    std::string line;
    bool any = false;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key == "instantaneous_watts") {
            g.watts = std::strtod(val.c_str(), nullptr);
            g.instantaneous_available = true;
            any = true;
        } else if (key == "cumulative_available") {
            g.cumulative_available = (val == "1" || val == "true");
            any = true;
        } else if (key == "note") {
            g.note = val;
        }
    }
    if (!any) return std::nullopt;
    return g;
}

std::optional<GpuPowerReading> NvmlCliGpuAdapter::query() const {
    FILE* p = popen(
        "nvidia-smi --query-gpu=power.draw --format=csv,noheader,nounits 2>/dev/null", "r");
    if (!p) return std::nullopt;
    char buf[128];
    std::string out;
    while (std::fgets(buf, sizeof(buf), p)) out += buf;
    int rc = pclose(p);
    if (rc != 0 || out.empty()) return std::nullopt;
    GpuPowerReading g;
    g.watts = std::strtod(out.c_str(), nullptr);
    g.instantaneous_available = true;
    g.cumulative_available = false;  // NVML exposes instantaneous power only
    return g;
}

std::vector<std::string> load_pmu_events(const std::string& file_path) {
    std::ifstream in(file_path);
    if (!in) throw LoadError("cannot open pmu event list: " + file_path);
    std::vector<std::string> events;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        events.push_back(line);
    }
    return events;
}

I2cScan load_i2c_scan(const std::string& file_path) {
    std::ifstream in(file_path);
    if (!in) throw LoadError("cannot open i2c scan file: " + file_path);
    I2cScan scan;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto colon = line.find(':');
        if (colon == std::string::npos)
            throw ParseError("i2c scan line " + std::to_string(lineno) +
                             ": expected '<bus>: <addrs>'");
        int bus = std::atoi(line.substr(0, colon).c_str());
        std::istringstream rest(line.substr(colon + 1));
        std::vector<int> addrs;
        std::string tok;
        while (rest >> tok) {
            long a = std::strtol(tok.c_str(), nullptr, 0);
            if (a < 0 || a > 0x7F)
                throw InputError("i2c scan line " + std::to_string(lineno) +
                                 ": address out of 7-bit range: " + tok);
            addrs.push_back(static_cast<int>(a));
        }
        scan[bus] = std::move(addrs);
    }
    return scan;
}

std::vector<std::string> live_pmu_events() {
    std::vector<std::string> events;
    FILE* p = popen("perf list --no-desc 2>/dev/null", "r");
    if (!p) return events;
    char buf[512];
    while (std::fgets(buf, sizeof(buf), p)) {
        std::string line = trim(buf);
        if (line.empty()) continue;
        // "  event_name   [Kernel PMU event]" -> first token
        std::istringstream ss(line);
        std::string name;
        ss >> name;
        if (name == "List" || name.find('[') != std::string::npos) continue;
        events.push_back(name);
    }
    pclose(p);
    return events;
}

I2cScan live_i2c_scan() {
    I2cScan scan;
#if defined(ENAUDIT_HAVE_I2C_DEV)
    for (int bus = 0; bus < 64; ++bus) {
        std::string dev = "/dev/i2c-" + std::to_string(bus);
        int fd = open(dev.c_str(), O_RDWR);
        if (fd < 0) continue;
        std::vector<int> addrs;
        // read-only probe of the monitored range only
        for (int addr = kInaAddrLow; addr <= kInaAddrHigh; ++addr) {
            if (ioctl(fd, I2C_SLAVE, addr) < 0) continue;
            char byte;
            if (read(fd, &byte, 1) == 1) addrs.push_back(addr);
        }
        close(fd);
        scan[bus] = std::move(addrs);
    }
#endif
    return scan;
}

}  // namespace enaudit
