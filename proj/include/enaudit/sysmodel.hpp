#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace enaudit {

// Virtual snapshot of the filesystem paths the probes inspect. Built either
// from a fixture directory or from the live system; immutable afterwards, so
// one audit always sees one consistent state.
class SystemTree {
public:
    enum class EntryKind { File, Directory, DeviceNode, Unreadable };

    struct Entry {
        EntryKind kind = EntryKind::File;
        std::string content;  // file content, verbatim; empty otherwise
    };

    void put_file(const std::string& path, std::string content);
    void put_directory(const std::string& path);
    void put_device_node(const std::string& path);
    void put_unreadable(const std::string& path);

    bool exists(const std::string& path) const;
    bool is_directory(const std::string& path) const;
    bool is_device_node(const std::string& path) const;
    bool is_unreadable(const std::string& path) const;

    // File content, or nullopt when the path is absent or not a regular file.
    std::optional<std::string> read_file(const std::string& path) const;

    // Immediate child names of a directory, sorted. Empty when the path is
    // absent or not a directory.
    std::vector<std::string> list_directory(const std::string& path) const;

    // All file entries whose final path component equals name, sorted.
    std::vector<std::string> find_files_named(const std::string& name) const;

    std::size_t size() const { return entries_.size(); }

private:
    static std::string normalize(const std::string& path);
    void ensure_parents(const std::string& path);

    std::map<std::string, Entry> entries_;
};

struct FixtureManifest {
    std::string platform_name;
    std::string description;
    std::string provenance;  // citation of the source, or "synthetic"
};

// Fixture layout: <root>/manifest.toml plus a mirrored path tree under
// <root>/tree/. A file "<name>.devnode" in the tree stands for a device node
// "<name>" (plain filesystems cannot hold device nodes portably). Files named
// ".keep" only pin otherwise-empty directories and are not tree entries.
inline constexpr const char* kDeviceNodeSuffix = ".devnode";

SystemTree load_system_tree(const std::string& root);

FixtureManifest load_manifest(const std::string& fixture_root);

// Snapshot of the live path families the probes inspect: powercap, the SCMI
// bus, hwmon, power_supply, the ipmi device node, and i2c dev nodes. Missing
// paths are simply absent (a finding, not an error); unreadable paths are
// recorded as such so permission gaps never masquerade as hardware absence.
SystemTree live_tree();

}  // namespace enaudit
