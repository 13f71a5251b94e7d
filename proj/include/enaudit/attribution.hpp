#pragma once

#include "enaudit/sysmodel.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace enaudit {

// Layer-1 package energy over a window.
struct AttributionWindow {
    std::uint64_t t0_ns = 0;
    std::uint64_t t1_ns = 0;
    double e_pkg_j = 0.0;

    double delta_t_s() const { return static_cast<double>(t1_ns - t0_ns) * 1e-9; }
};

struct IdleBaseline {
    double idle_power_w = 0.0;
    std::string provenance;
};

struct ProcessShare {
    int pid = 0;
    std::uint64_t cpu_ticks = 0;
    double fraction = 0.0;  // cpu_ticks / total ticks, in [0, 1]
};

struct GoalMetrics {
    double total_energy_j = 0.0;
    std::uint64_t successful_goals = 0;
    double epg_j_per_goal = 0.0;
};

struct TaskEnergy {
    double joules = 0.0;
    bool clamped = false;  // raw difference was negative; clamped to 0
    std::string warning;
};

struct AttributionResult {
    std::map<int, double> e_pid_j;
    double e_task_j = 0.0;
    double residual_j = 0.0;  // other processes + kernel; never redistributed
    std::vector<std::string> warnings;
};

// Full pipeline output for one window, in stable field order for reports.
struct AttributionRecord {
    std::uint64_t t0_ns = 0;
    std::uint64_t t1_ns = 0;
    double e_pkg_j = 0.0;
    double idle_power_w = 0.0;
    double e_task_j = 0.0;
    struct Row {
        int pid = 0;
        std::uint64_t ticks = 0;
        double fraction = 0.0;
        double e_pid_j = 0.0;
    };
    std::vector<Row> rows;
    double residual_j = 0.0;
    std::string channel = "cpu_pkg";  // "cpu+sys" for bridge-derived records
    std::vector<std::string> warnings;
};

// Layers 2-3 composed over one window.
AttributionRecord attribute_window(const AttributionWindow& window,
                                   const IdleBaseline& baseline,
                                   const std::vector<ProcessShare>& shares);

// Layer 2: task energy above the idle baseline, clamped at zero.
TaskEnergy task_energy(const AttributionWindow& window, const IdleBaseline& baseline);

// Layer 3 inputs: per-process share of scheduler time within the window.
double cpu_fraction(std::uint64_t pid_ticks, std::uint64_t total_ticks);

// Layer 3: per-pid energy plus the unattributed residual.
AttributionResult attribute(double e_task_j, const std::vector<ProcessShare>& shares);

// utime + stime from /proc/<pid>/stat. The comm field may contain spaces and
// parentheses; parsing anchors on the last closing parenthesis.
std::uint64_t read_process_ticks(const SystemTree& tree, int pid);
std::uint64_t parse_stat_ticks(const std::string& stat_line);

// Aggregate (all-cpu) ticks from /proc/stat: sum of the cpu summary line.
std::uint64_t parse_total_ticks(const std::string& proc_stat_content);
std::uint64_t read_total_ticks(const SystemTree& tree);

// Energy per successful goal.
double epg(double total_energy_j, std::uint64_t successful_goals);

// Orchestration overhead: agentic EpG over linear-baseline EpG.
double ooi(double epg_agentic, double epg_linear);

}  // namespace enaudit
