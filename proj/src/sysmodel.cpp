#include "enaudit/sysmodel.hpp"

#include "enaudit/errors.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

namespace fs = std::filesystem;

namespace enaudit {

std::string SystemTree::normalize(const std::string& path) {
    if (path.empty() || path.front() != '/')
        throw InputError("SystemTree paths must be absolute: '" + path + "'");
    std::string out = path;
    while (out.size() > 1 && out.back() == '/') out.pop_back();
    return out;
}

void SystemTree::ensure_parents(const std::string& path) {
    auto pos = path.rfind('/');
    if (pos == std::string::npos || pos == 0) return;
    std::string parent = path.substr(0, pos);
    auto it = entries_.find(parent);
    if (it == entries_.end()) {
        entries_[parent] = Entry{EntryKind::Directory, {}};
        ensure_parents(parent);
    }
}

void SystemTree::put_file(const std::string& path, std::string content) {
    std::string p = normalize(path);
    ensure_parents(p);
    entries_[p] = Entry{EntryKind::File, std::move(content)};
}

void SystemTree::put_directory(const std::string& path) {
    std::string p = normalize(path);
    ensure_parents(p);
    entries_[p] = Entry{EntryKind::Directory, {}};
}

void SystemTree::put_device_node(const std::string& path) {
    std::string p = normalize(path);
    ensure_parents(p);
    entries_[p] = Entry{EntryKind::DeviceNode, {}};
}

void SystemTree::put_unreadable(const std::string& path) {
    std::string p = normalize(path);
    ensure_parents(p);
    entries_[p] = Entry{EntryKind::Unreadable, {}};
}

bool SystemTree::exists(const std::string& path) const {
    return entries_.count(normalize(path)) != 0;
}

bool SystemTree::is_directory(const std::string& path) const {
    auto it = entries_.find(normalize(path));
    return it != entries_.end() && it->second.kind == EntryKind::Directory;
}

bool SystemTree::is_device_node(const std::string& path) const {
    auto it = entries_.find(normalize(path));
    return it != entries_.end() && it->second.kind == EntryKind::DeviceNode;
}

bool SystemTree::is_unreadable(const std::string& path) const {
    auto it = entries_.find(normalize(path));
    return it != entries_.end() && it->second.kind == EntryKind::Unreadable;
}

std::optional<std::string> SystemTree::read_file(const std::string& path) const {
    auto it = entries_.find(normalize(path));
    if (it == entries_.end() || it->second.kind != EntryKind::File) return std::nullopt;
    return it->second.content;
}

std::vector<std::string> SystemTree::list_directory(const std::string& path) const {
    std::string p = normalize(path);
    auto it = entries_.find(p);
    if (it == entries_.end() || it->second.kind != EntryKind::Directory) return {};
    std::string prefix = (p == "/") ? "/" : p + "/";
    std::vector<std::string> names;
    for (auto lb = entries_.upper_bound(prefix); lb != entries_.end(); ++lb) {
        const std::string& key = lb->first;
        if (key.compare(0, prefix.size(), prefix) != 0) break;
        std::string rest = key.substr(prefix.size());
        if (rest.find('/') == std::string::npos) names.push_back(rest);
    }
    return names;
}

std::vector<std::string> SystemTree::find_files_named(const std::string& name) const {
    std::vector<std::string> out;
    std::string suffix = "/" + name;
    for (const auto& [path, entry] : entries_) {
        if (entry.kind != EntryKind::File) continue;
        if (path.size() > suffix.size() &&
            path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0)
            out.push_back(path);
    }
    return out;
}

namespace {

std::string slurp(const fs::path& p, bool& readable) {
    std::ifstream in(p, std::ios::binary);
    if (!in) {
        readable = false;
        return {};
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    readable = true;
    return ss.str();
}

void add_from_disk(SystemTree& tree, const fs::path& on_disk,
                   const std::string& virtual_path) {
    std::error_code ec;
    fs::file_status st = fs::status(on_disk, ec);  // resolves symlinks
    if (ec) {
        tree.put_unreadable(virtual_path);
        return;
    }
    if (fs::is_directory(st)) {
        tree.put_directory(virtual_path);
        fs::directory_iterator it(on_disk, fs::directory_options::skip_permission_denied, ec);
        if (ec) {
            tree.put_unreadable(virtual_path);
            return;
        }
        for (const auto& de : it) {
            std::string name = de.path().filename().string();
            if (name == ".keep") continue;
            std::string child = (virtual_path == "/" ? "" : virtual_path) + "/" + name;
            if (name.size() > std::strlen(kDeviceNodeSuffix) &&
                name.ends_with(kDeviceNodeSuffix)) {
                child.resize(child.size() - std::strlen(kDeviceNodeSuffix));
                tree.put_device_node(child);
                continue;
            }
            add_from_disk(tree, de.path(), child);
        }
    } else if (fs::is_regular_file(st)) {
        bool readable = false;
        std::string content = slurp(on_disk, readable);
        if (readable)
            tree.put_file(virtual_path, std::move(content));
        else
            tree.put_unreadable(virtual_path);
    } else if (fs::is_character_file(st) || fs::is_block_file(st)) {
        tree.put_device_node(virtual_path);
    }
    // sockets/fifos are outside the probe targets; skipped
}

}  // namespace

SystemTree load_system_tree(const std::string& root) {
    std::error_code ec;
    if (!fs::exists(root, ec) || ec)
        throw LoadError("fixture root does not exist: " + root);
    if (!fs::is_directory(root, ec) || ec)
        throw LoadError("fixture root is not a directory: " + root);
    fs::directory_iterator probe(root, ec);
    if (ec) throw LoadError("cannot read fixture root: " + root + ": " + ec.message());

    SystemTree tree;
    for (const auto& de : fs::directory_iterator(root)) {
        std::string name = de.path().filename().string();
        if (name == ".keep") continue;
        add_from_disk(tree, de.path(), "/" + name);
    }
    return tree;
}

FixtureManifest load_manifest(const std::string& fixture_root) {
    fs::path mp = fs::path(fixture_root) / "manifest.toml";
    std::ifstream in(mp);
    if (!in) throw LoadError("missing manifest: " + mp.string());
    FixtureManifest m;
    std::string line;
    while (std::getline(in, line)) {
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\"");
            auto e = s.find_last_not_of(" \t\"\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key == "platform_name") m.platform_name = val;
        else if (key == "description") m.description = val;
        else if (key == "provenance") m.provenance = val;
    }
    if (m.provenance.empty())
        throw LoadError("manifest missing provenance: " + mp.string());
    return m;
}

namespace {

// The path families one audit inspects on a live system.
const char* const kLiveRoots[] = {
    "/sys/class/powercap",
    "/sys/bus/scmi_protocol/drivers",
    "/sys/bus/scmi_protocol/devices",
    "/sys/class/hwmon",
    "/sys/class/power_supply",
};

void add_live_subtree(SystemTree& tree, const std::string& path, int depth) {
    std::error_code ec;
    fs::file_status st = fs::status(path, ec);
    if (ec || !fs::exists(st)) return;
    if (fs::is_directory(st)) {
        tree.put_directory(path);
        if (depth <= 0) return;
        fs::directory_iterator it(path, fs::directory_options::skip_permission_denied, ec);
        if (ec) {
            tree.put_unreadable(path);
            return;
        }
        for (const auto& de : it)
            add_live_subtree(tree, de.path().string(), depth - 1);
    } else if (fs::is_regular_file(st)) {
        bool readable = false;
        // sysfs attributes are small; some block on read (avoided by the
        // depth-limited walk staying inside the class directories)
        std::string content = slurp(path, readable);
        if (readable)
            tree.put_file(path, std::move(content));
        else
            tree.put_unreadable(path);
    } else if (fs::is_character_file(st) || fs::is_block_file(st)) {
        tree.put_device_node(path);
    } else if (fs::is_symlink(fs::symlink_status(path, ec))) {
        // unresolvable symlink; record as unreadable
        tree.put_unreadable(path);
    }
}

}  // namespace

SystemTree live_tree() {
    SystemTree tree;
    for (const char* root : kLiveRoots) add_live_subtree(tree, root, 4);
    std::error_code ec;
    if (fs::exists("/dev/ipmi0", ec)) tree.put_device_node("/dev/ipmi0");
    for (int i = 0; i < 64; ++i) {
        std::string dev = "/dev/i2c-" + std::to_string(i);
        if (fs::exists(dev, ec)) tree.put_device_node(dev);
    }
    return tree;
}

}  // namespace enaudit
