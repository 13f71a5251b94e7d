#include "enaudit/bridge.hpp"
#include "enaudit/errors.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace enaudit;

namespace {

std::string make_csv(int rows, std::uint64_t span_ns, double mw) {
    std::ostringstream out;
    out << "t_ns,power_mw\n";
    for (int i = 0; i < rows; ++i)
        out << (span_ns * i / (rows - 1)) << "," << mw << "\n";
    return out.str();
}

PowerTrace constant_trace(double watts, std::uint64_t t0, std::uint64_t t1,
                          std::uint64_t step) {
    PowerTrace t;
    for (std::uint64_t ts = t0; ts <= t1; ts += step) t.samples.push_back({ts, watts});
    t.nominal_rate_hz = 1e9 / static_cast<double>(step);
    return t;
}

}  // namespace

TEST_CASE("meter trace rate estimation and under-sampling warning") {
    SUBCASE("1000 intervals over 1 s is ~1 kHz, no warning") {
        MeterTraceLoad m = meter_trace_from_csv(make_csv(1001, 1'000'000'000, 5000));
        CHECK(m.trace.nominal_rate_hz == doctest::Approx(1000.0).epsilon(0.01));
        CHECK(m.warnings.empty());
    }
    SUBCASE("100 intervals over 1 s warns") {
        MeterTraceLoad m = meter_trace_from_csv(make_csv(101, 1'000'000'000, 5000));
        REQUIRE_FALSE(m.warnings.empty());
        CHECK(m.warnings[0].find("under-sampling") != std::string::npos);
    }
    SUBCASE("negative power is a parse error") {
        CHECK_THROWS_AS(meter_trace_from_csv("t_ns,power_mw\n0,5\n1,-1\n"), ParseError);
    }
    SUBCASE("missing file is a load error") {
        CHECK_THROWS_AS(load_meter_trace("/nonexistent/trace.csv"), LoadError);
    }
}

TEST_CASE("trace alignment") {
    PowerTrace meter = constant_trace(10.0, 0, 2'000'000'000, 1'000'000);
    SUBCASE("zero offset with identical spans is the identity") {
        PowerTrace gpu = constant_trace(4.0, 0, 2'000'000'000, 10'000'000);
        auto [m, g] = align_traces(meter, gpu, 0.0);
        CHECK(m.samples.size() == meter.samples.size());
        CHECK(g.samples.size() == gpu.samples.size());
        CHECK(g.samples.front().t_ns == gpu.samples.front().t_ns);
    }
    SUBCASE("a lagging gpu trace is shifted back into coincidence") {
        PowerTrace gpu = constant_trace(4.0, 50'000'000, 2'050'000'000, 10'000'000);
        auto [m, g] = align_traces(meter, gpu, -0.05);
        CHECK(g.samples.front().t_ns == 0);
        CHECK(g.samples.back().t_ns == 2'000'000'000);
    }
    SUBCASE("disjoint spans are an error") {
        PowerTrace gpu = constant_trace(4.0, 3'000'000'000, 4'000'000'000, 10'000'000);
        CHECK_THROWS_AS(align_traces(meter, gpu, 0.0), CoverageError);
    }
}

TEST_CASE("constant-power decomposition") {
    PowerTrace meter = constant_trace(10.0, 0, 2'000'000'000, 1'000'000);
    PowerTrace gpu = constant_trace(4.0, 0, 2'000'000'000, 10'000'000);
    BridgeDecomposition d = bridge_decompose(meter, gpu, 0, 2'000'000'000);
    CHECK(d.e_total_j == doctest::Approx(20.0).epsilon(1e-9));
    CHECK(d.e_gpu_j == doctest::Approx(8.0).epsilon(1e-9));
    CHECK(d.e_cpu_sys_j == doctest::Approx(12.0).epsilon(1e-9));
    CHECK(d.e_gpu_j + d.e_cpu_sys_j == d.e_total_j);
    CHECK(d.warnings.empty());
}

TEST_CASE("zero gpu channel leaves everything in cpu+sys") {
    PowerTrace meter = constant_trace(7.0, 0, 1'000'000'000, 1'000'000);
    PowerTrace gpu = constant_trace(0.0, 0, 1'000'000'000, 10'000'000);
    BridgeDecomposition d = bridge_decompose(meter, gpu, 0, 1'000'000'000);
    CHECK(d.e_cpu_sys_j == d.e_total_j);
}

TEST_CASE("gpu above meter yields a negative diagnostic, not a clamp") {
    PowerTrace meter = constant_trace(3.0, 0, 1'000'000'000, 1'000'000);
    PowerTrace gpu = constant_trace(5.0, 0, 1'000'000'000, 10'000'000);
    BridgeDecomposition d = bridge_decompose(meter, gpu, 0, 1'000'000'000);
    CHECK(d.e_cpu_sys_j < 0.0);
    REQUIRE_FALSE(d.warnings.empty());
    CHECK(d.warnings[0].find("misalignment") != std::string::npos);
}

TEST_CASE("decomposition is additive over adjacent windows") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> watts(1.0, 20.0);
    PowerTrace meter, gpu;
    for (std::uint64_t ts = 0; ts <= 3'000'000'000; ts += 1'000'000)
        meter.samples.push_back({ts, watts(rng)});
    for (std::uint64_t ts = 0; ts <= 3'000'000'000; ts += 20'000'000)
        gpu.samples.push_back({ts, watts(rng) * 0.3});

    BridgeDecomposition whole = bridge_decompose(meter, gpu, 0, 3'000'000'000);
    BridgeDecomposition a = bridge_decompose(meter, gpu, 0, 1'234'000'000);
    BridgeDecomposition b = bridge_decompose(meter, gpu, 1'234'000'000, 3'000'000'000);
    CHECK(a.e_total_j + b.e_total_j == doctest::Approx(whole.e_total_j).epsilon(1e-9));
    CHECK(a.e_gpu_j + b.e_gpu_j == doctest::Approx(whole.e_gpu_j).epsilon(1e-9));
    CHECK(a.e_cpu_sys_j + b.e_cpu_sys_j ==
          doctest::Approx(whole.e_cpu_sys_j).epsilon(1e-9));
}

TEST_CASE("bridge attribution applies layers 2-3 on the cpu+sys channel") {
    BridgeDecomposition d;
    d.t0_ns = 0;
    d.t1_ns = 2'000'000'000;
    d.e_total_j = 20.0;
    d.e_gpu_j = 8.0;
    d.e_cpu_sys_j = 12.0;

    SUBCASE("one process at full fraction") {
        AttributionResult r = bridge_attribute(d, {1.0, "bench"}, {{42, 0, 1.0}});
        CHECK(r.e_pid_j.at(42) == doctest::Approx(10.0));
        CHECK(r.residual_j == doctest::Approx(0.0));
        bool tagged = false;
        for (const auto& w : r.warnings) tagged |= w == "channel=cpu+sys";
        CHECK(tagged);
    }
    SUBCASE("zero shares leave everything in the residual") {
        AttributionResult r = bridge_attribute(d, {1.0, "bench"}, {});
        CHECK(r.e_pid_j.empty());
        CHECK(r.residual_j == doctest::Approx(10.0));
    }
    SUBCASE("negative decomposition is refused") {
        d.e_cpu_sys_j = -1.0;
        CHECK_THROWS_AS(bridge_attribute(d, {0.0, ""}, {}), InputError);
    }
}
