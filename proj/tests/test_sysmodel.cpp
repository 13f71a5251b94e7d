#include "enaudit/errors.hpp"
#include "enaudit/sysmodel.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

namespace fs = std::filesystem;
using namespace enaudit;

namespace {
const std::string kFixtures = std::string(ENAUDIT_SOURCE_DIR) + "/fixtures";
}

TEST_CASE("empty directory loads as a tree with zero entries") {
    fs::path dir = fs::temp_directory_path() / "enaudit_empty_tree";
    fs::remove_all(dir);
    fs::create_directories(dir);
    SystemTree tree = load_system_tree(dir.string());
    CHECK(tree.size() == 0);
    fs::remove_all(dir);
}

TEST_CASE("nonexistent root is a load error") {
    CHECK_THROWS_AS(load_system_tree("/nonexistent/enaudit/root"), LoadError);
}

TEST_CASE("gx10 fixture tree mirrors the audited paths") {
    SystemTree tree = load_system_tree(kFixtures + "/gx10/tree");
    CHECK(tree.is_directory("/sys/bus/scmi_protocol/drivers/scmi-clocks"));
    CHECK(tree.is_directory("/sys/bus/scmi_protocol/drivers/scmi-regulator"));
    CHECK(tree.find_files_named("energy_uj").empty());
    CHECK_FALSE(tree.exists("/dev/ipmi0"));
    auto name = tree.read_file("/sys/class/hwmon/hwmon0/name");
    REQUIRE(name.has_value());
    CHECK(name->find("acpitz") != std::string::npos);
}

TEST_CASE("device node markers become device nodes") {
    SystemTree tree = load_system_tree(kFixtures + "/x86_rapl/tree");
    CHECK(tree.is_device_node("/dev/ipmi0"));
    CHECK_FALSE(tree.read_file("/dev/ipmi0").has_value());
}

TEST_CASE(".keep files are not tree entries") {
    SystemTree tree = load_system_tree(kFixtures + "/gx10/tree");
    CHECK(tree.is_directory("/sys/bus/scmi_protocol/devices"));
    CHECK(tree.list_directory("/sys/bus/scmi_protocol/devices").empty());
}

TEST_CASE("path lookup is deterministic across loads") {
    SystemTree a = load_system_tree(kFixtures + "/gx10/tree");
    SystemTree b = load_system_tree(kFixtures + "/gx10/tree");
    CHECK(a.size() == b.size());
    CHECK(a.list_directory("/sys/bus/scmi_protocol/drivers") ==
          b.list_directory("/sys/bus/scmi_protocol/drivers"));
    CHECK(a.read_file("/sys/class/hwmon/hwmon1/temp1_input") ==
          b.read_file("/sys/class/hwmon/hwmon1/temp1_input"));
}

TEST_CASE("directory listing only returns immediate children") {
    SystemTree tree;
    tree.put_file("/a/b/c", "x");
    tree.put_file("/a/d", "y");
    tree.put_file("/ab", "z");
    auto names = tree.list_directory("/a");
    REQUIRE(names.size() == 2);
    CHECK(names[0] == "b");
    CHECK(names[1] == "d");
}

TEST_CASE("unreadable entries are distinct from absent ones") {
    SystemTree tree;
    tree.put_unreadable("/dev/ipmi0");
    CHECK(tree.exists("/dev/ipmi0"));
    CHECK(tree.is_unreadable("/dev/ipmi0"));
    CHECK_FALSE(tree.is_device_node("/dev/ipmi0"));
}

TEST_CASE("every shipped fixture manifest names its provenance") {
    for (const char* name : {"gx10", "x86_rapl", "jetson", "apple", "qualcomm", "spbm"}) {
        FixtureManifest m = load_manifest(kFixtures + "/" + name);
        CHECK_FALSE(m.platform_name.empty());
        CHECK_FALSE(m.provenance.empty());
    }
}

TEST_CASE("relative paths are rejected") {
    SystemTree tree;
    CHECK_THROWS_AS(tree.put_file("relative/path", ""), InputError);
}
