#include "enaudit/grading.hpp"

#include <doctest.h>

using namespace enaudit;

namespace {

const std::string kFixtures = std::string(ENAUDIT_SOURCE_DIR) + "/fixtures";

AuditReport audit_fixture(const std::string& name) {
    std::string dir = kFixtures + "/" + name;
    SystemTree tree = load_system_tree(dir + "/tree");
    auto events = load_pmu_events(dir + "/pmu_events.txt");
    auto scan = load_i2c_scan(dir + "/i2c_scan.txt");
    FixtureGpuAdapter gpu(dir + "/gpu_power.txt");  // may be missing: Absent
    return run_audit(tree, events, scan, gpu, name);
}

Grade grade_fixture(const std::string& name) {
    return check_requirements(derive_capabilities(audit_fixture(name))).grade;
}

}  // namespace

TEST_CASE("capability derivation per platform") {
    SUBCASE("x86 powercap domains give cpu cumulative energy") {
        CapabilityProfile p = derive_capabilities(audit_fixture("x86_rapl"));
        CHECK(p.at(CapabilityDomain::Cpu).cumulative_energy);
        CHECK(p.at(CapabilityDomain::System).instantaneous_power);  // via BMC sensors
        CHECK_FALSE(p.at(CapabilityDomain::System).cumulative_energy);
        CHECK_FALSE(p.at(CapabilityDomain::Io).cumulative_energy);
    }
    SUBCASE("labeled current-sensor rails give per-domain capability") {
        CapabilityProfile p = derive_capabilities(audit_fixture("jetson"));
        CHECK(p.at(CapabilityDomain::Cpu).cumulative_energy);
        CHECK(p.at(CapabilityDomain::Gpu).cumulative_energy);
        CHECK(p.at(CapabilityDomain::System).cumulative_energy);
        CHECK_FALSE(p.at(CapabilityDomain::Dram).cumulative_energy);
    }
    SUBCASE("gx10 has instantaneous gpu power and nothing else") {
        CapabilityProfile p = derive_capabilities(audit_fixture("gx10"));
        CHECK(p.at(CapabilityDomain::Gpu).instantaneous_power);
        CHECK_FALSE(p.at(CapabilityDomain::Gpu).cumulative_energy);
        for (auto d : kAllCapabilityDomains) CHECK_FALSE(p.at(d).cumulative_energy);
    }
    SUBCASE("locked-down platforms expose nothing") {
        for (const char* name : {"apple", "qualcomm"}) {
            CapabilityProfile p = derive_capabilities(audit_fixture(name));
            for (auto d : kAllCapabilityDomains) {
                CHECK_FALSE(p.at(d).cumulative_energy);
                CHECK_FALSE(p.at(d).instantaneous_power);
            }
        }
    }
}

TEST_CASE("platform grades") {
    CHECK(grade_fixture("x86_rapl") == Grade::Measured);
    CHECK(grade_fixture("jetson") == Grade::Measured);
    CHECK(grade_fixture("gx10") == Grade::Limited);
    CHECK(grade_fixture("apple") == Grade::Limited);
    CHECK(grade_fixture("qualcomm") == Grade::Limited);
}

TEST_CASE("the grade is gated only by cpu cumulative energy") {
    CapabilityProfile p;
    SUBCASE("empty profile is limited") {
        RequirementReport r = check_requirements(p);
        CHECK(r.grade == Grade::Limited);
        REQUIRE(r.checks.size() == 5);
        CHECK(r.checks[0].id == "R1");
        CHECK(r.checks[0].outcome == CheckOutcome::Fail);
    }
    SUBCASE("cpu counter alone is measured") {
        p.at(CapabilityDomain::Cpu).cumulative_energy = true;
        RequirementReport r = check_requirements(p);
        CHECK(r.grade == Grade::Measured);
        CHECK(r.checks[0].outcome == CheckOutcome::Pass);
    }
    SUBCASE("every other domain without cpu stays limited") {
        for (auto d : {CapabilityDomain::Gpu, CapabilityDomain::Dram,
                       CapabilityDomain::Io, CapabilityDomain::System})
            p.at(d).cumulative_energy = true;
        CHECK(check_requirements(p).grade == Grade::Limited);
    }
}

TEST_CASE("adding capabilities never downgrades") {
    CapabilityProfile p;
    Grade prev = check_requirements(p).grade;
    for (auto d : kAllCapabilityDomains) {
        p.at(d).cumulative_energy = true;
        Grade g = check_requirements(p).grade;
        CHECK((prev == Grade::Measured ? g == Grade::Measured : true));
        prev = g;
    }
    CHECK(prev == Grade::Measured);
}

TEST_CASE("latency, resolution and monotonicity annotate without gating") {
    CapabilityProfile p;
    p.at(CapabilityDomain::Cpu).cumulative_energy = true;

    SUBCASE("no characterization means not measurable") {
        RequirementReport r = check_requirements(p);
        CHECK(r.checks[1].outcome == CheckOutcome::NotMeasurable);  // R2
        CHECK(r.checks[2].outcome == CheckOutcome::NotMeasurable);  // R3
        CHECK(r.checks[4].outcome == CheckOutcome::NotMeasurable);  // R5
        CHECK(r.grade == Grade::Measured);
    }
    SUBCASE("a fast fine-grained monotonic counter passes all three") {
        p.characterization = CounterCharacterization{0.001, 0.02, true};
        RequirementReport r = check_requirements(p);
        CHECK(r.checks[1].outcome == CheckOutcome::Pass);
        CHECK(r.checks[2].outcome == CheckOutcome::Pass);
        CHECK(r.checks[4].outcome == CheckOutcome::Pass);
    }
    SUBCASE("slow coarse counters fail the annotations but not the grade") {
        p.characterization = CounterCharacterization{50.0, 4.0, false};
        RequirementReport r = check_requirements(p);
        CHECK(r.checks[1].outcome == CheckOutcome::Fail);
        CHECK(r.checks[2].outcome == CheckOutcome::Fail);
        CHECK(r.checks[4].outcome == CheckOutcome::Fail);
        CHECK(r.grade == Grade::Measured);
    }
    SUBCASE("boundary values: 1 mJ and just under 1 ms pass") {
        p.characterization = CounterCharacterization{1.0, 0.999, true};
        RequirementReport r = check_requirements(p);
        CHECK(r.checks[1].outcome == CheckOutcome::Pass);
        CHECK(r.checks[2].outcome == CheckOutcome::Pass);
    }
}

TEST_CASE("granularity check covers cpu, gpu, dram and io") {
    CapabilityProfile p;
    p.at(CapabilityDomain::Cpu).cumulative_energy = true;
    p.at(CapabilityDomain::Gpu).cumulative_energy = true;
    p.at(CapabilityDomain::Dram).cumulative_energy = true;
    SUBCASE("io missing fails R4") {
        RequirementReport r = check_requirements(p);
        CHECK(r.checks[3].id == "R4");
        CHECK(r.checks[3].outcome == CheckOutcome::Fail);
    }
    SUBCASE("all four pass R4") {
        p.at(CapabilityDomain::Io).cumulative_energy = true;
        CHECK(check_requirements(p).checks[3].outcome == CheckOutcome::Pass);
    }
}
