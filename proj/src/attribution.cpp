#include "enaudit/attribution.hpp"

#include "enaudit/errors.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace enaudit {

namespace {
constexpr double kFractionEps = 1e-9;
}

TaskEnergy task_energy(const AttributionWindow& window, const IdleBaseline& baseline) {
    if (window.t1_ns <= window.t0_ns)
        throw InputError("attribution window requires t1 > t0");
    if (window.e_pkg_j < 0.0) throw InputError("package energy must be >= 0");
    if (baseline.idle_power_w < 0.0) throw InputError("idle power must be >= 0");

    TaskEnergy out;
    double raw = window.e_pkg_j - baseline.idle_power_w * window.delta_t_s();
    if (raw < 0.0) {
        out.joules = 0.0;
        out.clamped = true;
        char buf[128];
        std::snprintf(buf, sizeof(buf),
                      "baseline exceeds package energy by %.6g J; clamped to 0", -raw);
        out.warning = buf;
    } else {
        out.joules = raw;
    }
    return out;
}

AttributionRecord attribute_window(const AttributionWindow& window,
                                   const IdleBaseline& baseline,
                                   const std::vector<ProcessShare>& shares) {
    AttributionRecord rec;
    rec.t0_ns = window.t0_ns;
    rec.t1_ns = window.t1_ns;
    rec.e_pkg_j = window.e_pkg_j;
    rec.idle_power_w = baseline.idle_power_w;

    TaskEnergy te = task_energy(window, baseline);
    rec.e_task_j = te.joules;
    if (!te.warning.empty()) rec.warnings.push_back(te.warning);

    AttributionResult res = attribute(te.joules, shares);
    for (const auto& s : shares)
        rec.rows.push_back({s.pid, s.cpu_ticks, s.fraction, res.e_pid_j.at(s.pid)});
    rec.residual_j = res.residual_j;
    for (const auto& w : res.warnings) rec.warnings.push_back(w);
    return rec;
}

double cpu_fraction(std::uint64_t pid_ticks, std::uint64_t total_ticks) {
    if (total_ticks == 0)
        throw UndefinedMetricError("total scheduler ticks is zero for the window");
    if (pid_ticks > total_ticks)
        throw AccountingError("pid ticks (" + std::to_string(pid_ticks) +
                              ") exceed total ticks (" + std::to_string(total_ticks) + ")");
    return static_cast<double>(pid_ticks) / static_cast<double>(total_ticks);
}

AttributionResult attribute(double e_task_j, const std::vector<ProcessShare>& shares) {
    if (e_task_j < 0.0) throw InputError("task energy must be >= 0");
    double fraction_sum = 0.0;
    for (const auto& s : shares) {
        if (s.fraction < 0.0 || s.fraction > 1.0)
            throw InputError("share fraction outside [0, 1] for pid " +
                             std::to_string(s.pid));
        fraction_sum += s.fraction;
    }
    if (fraction_sum > 1.0 + kFractionEps)
        throw AccountingError("share fractions sum to " + std::to_string(fraction_sum) +
                              " > 1");

    AttributionResult out;
    out.e_task_j = e_task_j;
    double attributed = 0.0;
    for (const auto& s : shares) {
        double e = s.fraction * e_task_j;
        out.e_pid_j[s.pid] += e;
        attributed += e;
    }
    out.residual_j = e_task_j - attributed;
    return out;
}

std::uint64_t parse_stat_ticks(const std::string& stat_line) {
    // pid (comm) state ppid ... utime(14) stime(15); comm may itself contain
    // ')' so anchor on the last one
    auto close = stat_line.rfind(')');
    if (close == std::string::npos)
        throw ParseError("stat line missing comm field: " + stat_line);
    std::istringstream rest(stat_line.substr(close + 1));
    std::string tok;
    // after comm: state is field 3; utime and stime are fields 14 and 15
    std::uint64_t utime = 0, stime = 0;
    for (int field = 3; field <= 15; ++field) {
        if (!(rest >> tok))
            throw ParseError("stat line truncated before utime/stime");
        if (field == 14) utime = std::strtoull(tok.c_str(), nullptr, 10);
        if (field == 15) stime = std::strtoull(tok.c_str(), nullptr, 10);
    }
    return utime + stime;
}

std::uint64_t read_process_ticks(const SystemTree& tree, int pid) {
    std::string path = "/proc/" + std::to_string(pid) + "/stat";
    auto content = tree.read_file(path);
    if (!content) throw LoadError("process gone: no " + path);
    return parse_stat_ticks(*content);
}

std::uint64_t parse_total_ticks(const std::string& proc_stat_content) {
    std::istringstream in(proc_stat_content);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("cpu ", 0) != 0) continue;
        std::istringstream fields(line.substr(4));
        std::uint64_t total = 0, v = 0;
        bool any = false;
        while (fields >> v) {
            total += v;
            any = true;
        }
        if (!any) throw ParseError("cpu summary line has no tick fields");
        return total;
    }
    throw ParseError("/proc/stat content missing cpu summary line");
}

std::uint64_t read_total_ticks(const SystemTree& tree) {
    auto content = tree.read_file("/proc/stat");
    if (!content) throw LoadError("no /proc/stat in tree");
    return parse_total_ticks(*content);
}

double epg(double total_energy_j, std::uint64_t successful_goals) {
    if (successful_goals == 0)
        throw UndefinedMetricError("EpG undefined: zero successful goals");
    return total_energy_j / static_cast<double>(successful_goals);
}

double ooi(double epg_agentic, double epg_linear) {
    if (epg_linear <= 0.0)
        throw UndefinedMetricError("OOI undefined: non-positive baseline EpG");
    return epg_agentic / epg_linear;
}

}  // namespace enaudit
