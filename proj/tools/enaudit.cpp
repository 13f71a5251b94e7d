// enaudit - platform energy-observability auditor and per-process energy
// attribution toolkit.
//
// Exit codes: 0 success, 1 usage, 2 input/data, 3 internal, 4 capability gap.

#include "enaudit/attribution.hpp"
#include "enaudit/bridge.hpp"
#include "enaudit/counters.hpp"
#include "enaudit/errors.hpp"
#include "enaudit/grading.hpp"
#include "enaudit/probe.hpp"
#include "enaudit/report.hpp"
#include "enaudit/spbm.hpp"
#include "enaudit/sysmodel.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace enaudit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;
constexpr int kExitCapabilityGap = 4;

struct Options {
    std::string fixture;
    std::string output = "json";  // json | markdown
    std::string out_file;

    double period_s = 0.1;
    double duration_s = 1.0;
    double idle_watts = 0.0;
    double ticks_per_second = 100.0;
    std::vector<int> pids;

    std::string meter_path;
    std::string gpu_trace_path;
    double offset_s = 0.0;
    std::optional<double> t0_s, t1_s;
    std::vector<std::string> shares;  // pid:fraction

    std::string blob_path;
    std::string layout_path;
};

void write_output(const Options& opt, const std::string& text) {
    if (opt.out_file.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(opt.out_file, std::ios::binary);
    if (!out) throw LoadError("cannot write output file: " + opt.out_file);
    out << text;
}

// Everything one audit needs, loaded from a fixture directory or captured live.
struct AuditInputs {
    SystemTree tree;
    std::vector<std::string> pmu_events;
    I2cScan i2c;
    std::unique_ptr<GpuPowerAdapter> gpu;
    std::string platform;
    bool fixture_mode = false;
};

AuditInputs gather_inputs(const Options& opt) {
    AuditInputs in;
    if (!opt.fixture.empty()) {
        in.fixture_mode = true;
        FixtureManifest manifest = load_manifest(opt.fixture);
        in.platform = manifest.platform_name;
        in.tree = load_system_tree((fs::path(opt.fixture) / "tree").string());
        fs::path events = fs::path(opt.fixture) / "pmu_events.txt";
        if (fs::exists(events)) in.pmu_events = load_pmu_events(events.string());
        fs::path scan = fs::path(opt.fixture) / "i2c_scan.txt";
        if (fs::exists(scan)) in.i2c = load_i2c_scan(scan.string());
        in.gpu = std::make_unique<FixtureGpuAdapter>(
            (fs::path(opt.fixture) / "gpu_power.txt").string());
    } else {
        in.platform = "live";
        in.tree = live_tree();
        in.pmu_events = live_pmu_events();
        in.i2c = live_i2c_scan();
        in.gpu = std::make_unique<NvmlCliGpuAdapter>();
    }
    return in;
}

ReportBundle audit_bundle(const AuditInputs& in) {
    ReportBundle bundle;
    bundle.audit = run_audit(in.tree, in.pmu_events, in.i2c, *in.gpu, in.platform);
    if (in.fixture_mode) normalize_timestamps(bundle);
    return bundle;
}

int cmd_audit(const Options& opt) {
    AuditInputs in = gather_inputs(opt);
    ReportBundle bundle = audit_bundle(in);
    write_output(opt, opt.output == "markdown" ? emit_markdown_audit(bundle.audit)
                                               : emit_json(bundle));
    return kExitOk;
}

int cmd_grade(const Options& opt) {
    AuditInputs in = gather_inputs(opt);
    ReportBundle bundle = audit_bundle(in);
    bundle.capabilities = derive_capabilities(bundle.audit);
    bundle.grade = check_requirements(*bundle.capabilities);
    write_output(opt, opt.output == "markdown"
                          ? emit_markdown_grade(*bundle.grade, *bundle.capabilities)
                          : emit_json(bundle));
    return kExitOk;
}

// Scripted attribution inputs shipped inside a fixture:
//   attribution/counter_series.csv  header "t_ns,raw"
//   attribution/counter.meta        unit_microjoules=..., width_bits=...
//   attribution/ticks.csv           header "pid,ticks"; the row "total,N" gives
//                                   the window's aggregate scheduler ticks
struct ScriptedAttribution {
    std::vector<RawSample> series;
    EnergyCounter counter;
    std::vector<ProcessShare> shares;
    std::uint64_t total_ticks = 0;
};

ScriptedAttribution load_scripted_attribution(const std::string& fixture) {
    fs::path dir = fs::path(fixture) / "attribution";
    ScriptedAttribution s;

    std::ifstream meta(dir / "counter.meta");
    if (!meta) throw LoadError("missing " + (dir / "counter.meta").string());
    std::string line;
    while (std::getline(meta, line)) {
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        if (key == "unit_microjoules")
            s.counter.microjoules_per_count = std::strtod(val.c_str(), nullptr);
        else if (key == "width_bits")
            s.counter.width_bits = std::atoi(val.c_str());
        else if (key == "max_range")
            s.counter.max_range = std::strtoull(val.c_str(), nullptr, 10);
    }

    std::ifstream csv(dir / "counter_series.csv");
    if (!csv) throw LoadError("missing " + (dir / "counter_series.csv").string());
    std::getline(csv, line);
    if (line != "t_ns,raw") throw ParseError("counter_series.csv: expected header 't_ns,raw'");
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError("counter_series.csv: bad row");
        s.series.push_back({std::strtoull(line.substr(0, comma).c_str(), nullptr, 10),
                            std::strtoull(line.substr(comma + 1).c_str(), nullptr, 10)});
    }

    std::ifstream ticks(dir / "ticks.csv");
    if (!ticks) throw LoadError("missing " + (dir / "ticks.csv").string());
    std::getline(ticks, line);
    if (line != "pid,ticks") throw ParseError("ticks.csv: expected header 'pid,ticks'");
    while (std::getline(ticks, line)) {
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError("ticks.csv: bad row");
        std::string pid = line.substr(0, comma);
        std::uint64_t t = std::strtoull(line.substr(comma + 1).c_str(), nullptr, 10);
        if (pid == "total")
            s.total_ticks = t;
        else
            s.shares.push_back({std::atoi(pid.c_str()), t, 0.0});
    }
    if (s.total_ticks == 0) throw ParseError("ticks.csv: missing 'total' row");
    for (auto& share : s.shares) share.fraction = cpu_fraction(share.cpu_ticks, s.total_ticks);
    return s;
}

AttributionRecord record_from_series(const std::vector<RawSample>& series,
                                     const EnergyCounter& counter,
                                     const std::vector<ProcessShare>& shares,
                                     double idle_watts) {
    if (series.size() < 2)
        throw InsufficientDataError("counter series needs >= 2 samples for a window");
    AttributionWindow window;
    window.t0_ns = series.front().t_ns;
    window.t1_ns = series.back().t_ns;
    window.e_pkg_j = accumulate_uj(series, counter) * 1e-6;
    IdleBaseline baseline{idle_watts, "operator-supplied"};
    return attribute_window(window, baseline, shares);
}

int cmd_attribute(const Options& opt) {
    if (opt.duration_s <= 0.0) {
        std::cerr << "error: zero-length attribution window requested (--duration must be > 0)\n";
        return kExitUsage;
    }
    AuditInputs in = gather_inputs(opt);
    ReportBundle bundle = audit_bundle(in);
    CapabilityProfile caps = derive_capabilities(bundle.audit);
    if (!caps.at(CapabilityDomain::Cpu).cumulative_energy) {
        std::cerr << "capability gap: no CPU-domain cumulative energy counter on platform '"
                  << bundle.audit.platform
                  << "'; Layer 1 (raw counter energy) does not exist for the CPU, so "
                     "per-process attribution cannot be computed. Refusing to estimate.\n";
        return kExitCapabilityGap;
    }

    AttributionRecord rec;
    if (!opt.fixture.empty()) {
        ScriptedAttribution s = load_scripted_attribution(opt.fixture);
        rec = record_from_series(s.series, s.counter, s.shares, opt.idle_watts);
    } else {
        // live mode: sample the first powercap domain, snapshot ticks around it
        if (bundle.audit.rapl_domains.empty()) {
            std::cerr << "capability gap: no powercap energy_uj domain readable\n";
            return kExitCapabilityGap;
        }
        std::string domain = bundle.audit.rapl_domains.front().name;
        std::string path;
        for (const auto& p : in.tree.find_files_named("energy_uj")) {
            path = p;
            break;
        }
        EnergyCounter counter;
        counter.width_bits = 64;
        if (bundle.audit.rapl_domains.front().max_energy_range_uj)
            counter.max_range = bundle.audit.rapl_domains.front().max_energy_range_uj;
        auto read_uj = [&path]() -> std::optional<std::uint64_t> {
            std::ifstream f(path);
            std::uint64_t v = 0;
            if (!(f >> v)) return std::nullopt;
            return v;
        };
        auto read_file_text = [](const std::string& p) -> std::optional<std::string> {
            std::ifstream f(p);
            if (!f) return std::nullopt;
            std::ostringstream ss;
            ss << f.rdbuf();
            return ss.str();
        };
        auto total0 = read_file_text("/proc/stat");
        std::vector<std::pair<int, std::uint64_t>> pid0;
        for (int pid : opt.pids) {
            auto st = read_file_text("/proc/" + std::to_string(pid) + "/stat");
            if (!st) throw LoadError("process gone: " + std::to_string(pid));
            pid0.emplace_back(pid, parse_stat_ticks(*st));
        }
        SampleSeries series = sample_counter(
            read_uj, counter, static_cast<std::uint64_t>(opt.period_s * 1e9),
            static_cast<std::uint64_t>(opt.duration_s * 1e9), 500.0);
        auto total1 = read_file_text("/proc/stat");
        if (!total0 || !total1) throw LoadError("cannot read /proc/stat");
        std::uint64_t total_delta =
            parse_total_ticks(*total1) - parse_total_ticks(*total0);
        std::vector<ProcessShare> shares;
        for (auto& [pid, t0] : pid0) {
            auto st = read_file_text("/proc/" + std::to_string(pid) + "/stat");
            if (!st) throw LoadError("process gone mid-window: " + std::to_string(pid));
            std::uint64_t delta = parse_stat_ticks(*st) - t0;
            shares.push_back({pid, delta, cpu_fraction(delta, total_delta)});
        }
        rec = record_from_series(series.samples, counter, shares, opt.idle_watts);
        for (const auto& w : series.warnings) rec.warnings.push_back(w);
    }

    if (opt.output == "markdown") {
        write_output(opt, emit_text_attribution(rec));
    } else {
        bundle.attribution.push_back(rec);
        write_output(opt, emit_json(bundle));
    }
    return kExitOk;
}

std::vector<ProcessShare> parse_share_flags(const std::vector<std::string>& flags) {
    std::vector<ProcessShare> shares;
    for (const auto& f : flags) {
        auto colon = f.find(':');
        if (colon == std::string::npos)
            throw InputError("--share expects pid:fraction, got '" + f + "'");
        ProcessShare s;
        s.pid = std::atoi(f.substr(0, colon).c_str());
        s.fraction = std::strtod(f.substr(colon + 1).c_str(), nullptr);
        shares.push_back(s);
    }
    return shares;
}

int cmd_bridge(const Options& opt) {
    MeterTraceLoad meter = load_meter_trace(opt.meter_path);
    MeterTraceLoad gpu = load_meter_trace(opt.gpu_trace_path);
    auto [m, g] = align_traces(meter.trace, gpu.trace, opt.offset_s);

    std::uint64_t t0 = opt.t0_s ? static_cast<std::uint64_t>(*opt.t0_s * 1e9)
                                : std::max(m.samples.front().t_ns, g.samples.front().t_ns);
    std::uint64_t t1 = opt.t1_s ? static_cast<std::uint64_t>(*opt.t1_s * 1e9)
                                : std::min(m.samples.back().t_ns, g.samples.back().t_ns);

    BridgeDecomposition d = bridge_decompose(m, g, t0, t1);
    for (const auto& w : meter.warnings) d.warnings.push_back("meter: " + w);
    for (const auto& w : gpu.warnings) d.warnings.push_back("gpu: " + w);

    std::ostringstream out;
    out << emit_text_decomposition(d);
    if (!opt.shares.empty()) {
        IdleBaseline baseline{opt.idle_watts, "operator-supplied"};
        AttributionResult res = bridge_attribute(d, baseline, parse_share_flags(opt.shares));
        AttributionRecord rec;
        rec.t0_ns = d.t0_ns;
        rec.t1_ns = d.t1_ns;
        rec.e_pkg_j = d.e_cpu_sys_j;
        rec.idle_power_w = opt.idle_watts;
        rec.e_task_j = res.e_task_j;
        for (const auto& [pid, e] : res.e_pid_j) rec.rows.push_back({pid, 0, 0.0, e});
        rec.residual_j = res.residual_j;
        rec.channel = "cpu+sys";
        rec.warnings = res.warnings;
        out << emit_text_attribution(rec);
    }
    write_output(opt, out.str());
    return kExitOk;
}

int cmd_spbm(const Options& opt) {
    SpbmLayout layout =
        opt.layout_path.empty() ? SpbmLayout{} : load_spbm_layout(opt.layout_path);
    std::vector<std::uint8_t> blob = load_blob(opt.blob_path);
    std::vector<SpbmRecord> records = decode_spbm_stream(blob, layout);

    std::ostringstream out;
    out << "records=" << records.size() << "\n";
    if (records.empty()) {
        write_output(opt, out.str());
        return kExitOk;
    }
    if (records.size() >= 3) {
        SpbmCadence c = spbm_cadence(records);
        char buf[128];
        std::snprintf(buf, sizeof(buf),
                      "cadence_median_ms=%.3f cadence_iqr_ms=%.3f stale_reads=%d\n",
                      c.median_interval_ms, c.iqr_ms, c.stale_reads);
        out << buf;
    }
    for (auto dom : {SpbmDomain::PCoreCluster, SpbmDomain::ECoreCluster, SpbmDomain::Gpu,
                     SpbmDomain::SocTotal}) {
        SpbmCounterSeries s = spbm_as_counters(records, dom, layout);
        double mj = accumulate_uj(s.samples, s.counter) * 1e-3;
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%s_accumulated_mj=%.9g\n", spbm_domain_name(dom), mj);
        out << buf;
    }
    SpbmAccumulatorStats stats = spbm_accumulator_stats(records);
    char buf[128];
    std::snprintf(buf, sizeof(buf), "soc_minus_parts_mean_mj=%.9g soc_minus_parts_max_mj=%.9g\n",
                  stats.mean_soc_minus_parts_mj, stats.max_abs_soc_minus_parts_mj);
    out << buf;
    write_output(opt, out.str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    Options opt;
    CLI::App app{"enaudit: energy-observability auditor and attribution toolkit"};
    app.require_subcommand(1);

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--fixture", opt.fixture, "Fixture directory instead of the live system");
        sub->add_option("--output", opt.output, "Output format")
            ->check(CLI::IsMember({"json", "markdown"}));
        sub->add_option("--out", opt.out_file, "Write output to file instead of stdout");
    };

    CLI::App* audit = app.add_subcommand("audit", "Enumerate energy measurement interfaces");
    add_common(audit);

    CLI::App* grade =
        app.add_subcommand("grade", "Grade the platform against the requirement spec");
    add_common(grade);

    CLI::App* attr = app.add_subcommand("attribute", "Per-process energy attribution");
    add_common(attr);
    attr->add_option("--period", opt.period_s, "Sampling period in seconds");
    attr->add_option("--duration", opt.duration_s, "Window duration in seconds");
    attr->add_option("--idle-watts", opt.idle_watts, "Idle baseline power in watts");
    attr->add_option("--ticks-per-second", opt.ticks_per_second,
                     "Scheduler ticks per second (absolute CPU-seconds reporting)");
    attr->add_option("--pid", opt.pids, "Process ids to attribute");

    CLI::App* bridge =
        app.add_subcommand("bridge", "External-meter calibration bridge decomposition");
    add_common(bridge);
    bridge->add_option("--meter", opt.meter_path, "Total board power trace CSV")->required();
    bridge->add_option("--gpu-trace", opt.gpu_trace_path, "GPU power trace CSV")->required();
    bridge->add_option("--offset", opt.offset_s, "GPU trace time offset in seconds");
    double t0 = 0, t1 = 0;
    auto* t0_opt = bridge->add_option("--t0", t0, "Window start in seconds");
    auto* t1_opt = bridge->add_option("--t1", t1, "Window end in seconds");
    bridge->add_option("--idle-watts", opt.idle_watts, "Idle baseline power in watts");
    bridge->add_option("--share", opt.shares, "Process share as pid:fraction");

    CLI::App* spbm = app.add_subcommand("spbm", "Decode per-rail telemetry fixture dumps");
    add_common(spbm);
    spbm->add_option("--blob", opt.blob_path, "Binary record stream")->required();
    spbm->add_option("--layout", opt.layout_path, "Layout descriptor (key=value)");

    CLI11_PARSE(app, argc, argv);
    if (t0_opt->count()) opt.t0_s = t0;
    if (t1_opt->count()) opt.t1_s = t1;

    try {
        if (audit->parsed()) return cmd_audit(opt);
        if (grade->parsed()) return cmd_grade(opt);
        if (attr->parsed()) return cmd_attribute(opt);
        if (bridge->parsed()) return cmd_bridge(opt);
        if (spbm->parsed()) return cmd_spbm(opt);
        return kExitUsage;
    } catch (const CapabilityGapError& e) {
        std::cerr << "capability gap: " << e.what() << "\n";
        return kExitCapabilityGap;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}
