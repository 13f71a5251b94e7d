#include "enaudit/counters.hpp"
#include "enaudit/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace enaudit;

namespace {

EnergyCounter counter32() {
    EnergyCounter c;
    c.width_bits = 32;
    return c;
}

PowerTrace constant_trace(double watts, std::uint64_t t0, std::uint64_t t1,
                          std::uint64_t step) {
    PowerTrace t;
    for (std::uint64_t ts = t0; ts <= t1; ts += step) t.samples.push_back({ts, watts});
    return t;
}

}  // namespace

TEST_CASE("counter delta without wrap") {
    EnergyCounter c = counter32();
    CHECK(counter_delta_raw({0, 100}, {1, 300}, c) == 200);
}

TEST_CASE("counter delta across one wrap matches an unreduced accumulator") {
    EnergyCounter c = counter32();
    std::uint64_t range = 1ull << 32;
    // oracle: a true 64-bit accumulator reduced mod 2^32
    std::uint64_t before = range - 100, increment = 150;
    std::uint64_t after = (before + increment) % range;
    CHECK(after == 50);
    CHECK(counter_delta_raw({0, before}, {1, after}, c) == increment);
}

TEST_CASE("identical readings give zero delta") {
    CHECK(counter_delta_raw({0, 42}, {1, 42}, counter32()) == 0);
}

TEST_CASE("out-of-order samples are rejected") {
    CHECK_THROWS_AS(counter_delta_raw({5, 0}, {5, 1}, counter32()), OrderingError);
    CHECK_THROWS_AS(counter_delta_raw({5, 0}, {4, 1}, counter32()), OrderingError);
}

TEST_CASE("raw value outside the declared range is rejected") {
    EnergyCounter c;
    c.width_bits = 16;
    CHECK_THROWS_AS(counter_delta_raw({0, 70000}, {1, 1}, c), InputError);
}

TEST_CASE("accumulate over a single sample is zero") {
    CHECK(accumulate_raw({{0, 123}}, counter32()) == 0);
}

TEST_CASE("accumulate over a constant series is zero") {
    std::vector<RawSample> series;
    for (int i = 0; i < 10; ++i) series.push_back({static_cast<std::uint64_t>(i), 777});
    CHECK(accumulate_raw(series, counter32()) == 0);
}

TEST_CASE("accumulate across wraps equals the brute-force 64-bit oracle") {
    EnergyCounter c;
    c.width_bits = 16;
    std::uint64_t range = 1ull << 16;
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::uint64_t> incr(0, range / 4 - 1);

    std::uint64_t oracle = 0;  // unreduced accumulation
    std::vector<RawSample> series;
    series.push_back({0, 0});
    int wraps = 0;
    for (int i = 1; i <= 2000; ++i) {
        std::uint64_t step = incr(rng);
        std::uint64_t prev_reduced = oracle % range;
        oracle += step;
        if (oracle % range < prev_reduced) ++wraps;
        series.push_back({static_cast<std::uint64_t>(i), oracle % range});
    }
    REQUIRE(wraps >= 3);
    CHECK(accumulate_raw(series, c) == oracle);
}

TEST_CASE("accumulation is monotone in prefix length") {
    EnergyCounter c = counter32();
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::uint64_t> incr(0, 1ull << 20);
    std::vector<RawSample> series{{0, 0}};
    std::uint64_t acc = 0;
    for (int i = 1; i < 100; ++i) {
        acc += incr(rng);
        series.push_back({static_cast<std::uint64_t>(i), acc % (1ull << 32)});
    }
    std::uint64_t prev = 0;
    for (std::size_t n = 1; n <= series.size(); ++n) {
        std::vector<RawSample> prefix(series.begin(), series.begin() + n);
        std::uint64_t total = accumulate_raw(prefix, c);
        CHECK(total >= prev);
        prev = total;
    }
}

TEST_CASE("constant 1 W for 1 s integrates to 1 J") {
    PowerTrace t = constant_trace(1.0, 0, 1'000'000'000, 1'000'000);
    CHECK(integrate_power_j(t, 0, 1'000'000'000) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("linear ramp 0 to 2 W over 1 s integrates to 1 J") {
    PowerTrace t;
    t.samples.push_back({0, 0.0});
    t.samples.push_back({1'000'000'000, 2.0});
    CHECK(integrate_power_j(t, 0, 1'000'000'000) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("window outside trace coverage is an error") {
    PowerTrace t = constant_trace(1.0, 1'000'000, 2'000'000, 100'000);
    CHECK_THROWS_AS(integrate_power_j(t, 0, 500'000), CoverageError);
    CHECK_THROWS_AS(integrate_power_j(t, 1'500'000, 3'000'000), CoverageError);
}

TEST_CASE("fewer than two samples is insufficient data") {
    PowerTrace t;
    t.samples.push_back({0, 1.0});
    CHECK_THROWS_AS(integrate_power_j(t, 0, 1), InsufficientDataError);
}

TEST_CASE("integration is linear in the trace") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> watts(0.0, 20.0);
    PowerTrace p1, p2, combo;
    double a = 2.5, b = 0.75;
    for (std::uint64_t ts = 0; ts <= 1'000'000'000; ts += 10'000'000) {
        double w1 = watts(rng), w2 = watts(rng);
        p1.samples.push_back({ts, w1});
        p2.samples.push_back({ts, w2});
        combo.samples.push_back({ts, a * w1 + b * w2});
    }
    double lhs = integrate_power_j(combo, 50'000'000, 950'000'000);
    double rhs = a * integrate_power_j(p1, 50'000'000, 950'000'000) +
                 b * integrate_power_j(p2, 50'000'000, 950'000'000);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
}

TEST_CASE("integration is additive over adjacent windows") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> watts(0.0, 50.0);
    PowerTrace t;
    for (std::uint64_t ts = 0; ts <= 2'000'000'000; ts += 7'000'000)
        t.samples.push_back({ts, watts(rng)});
    double whole = integrate_power_j(t, 100'000'000, 1'900'000'000);
    double split = integrate_power_j(t, 100'000'000, 777'000'001) +
                   integrate_power_j(t, 777'000'001, 1'900'000'000);
    CHECK(split == doctest::Approx(whole).epsilon(1e-9));
}

TEST_CASE("wrap time for a 32-bit microjoule counter at 100 W") {
    EnergyCounter c = counter32();
    // 2^32 uJ / 100 W = 42.94967296 s
    CHECK(wrap_time_seconds(c, 100.0) == doctest::Approx(42.94967296).epsilon(1e-12));
}

TEST_CASE("scripted playback sampling") {
    std::vector<std::uint64_t> script{10, 20, 35, 60, 100};
    std::size_t idx = 0;
    CounterReader reader = [&]() -> std::optional<std::uint64_t> {
        if (idx >= script.size()) return std::nullopt;
        return script[idx++];
    };
    EnergyCounter c = counter32();
    SampleSeries s = sample_counter(reader, c, 1'000'000, 4'000'000, 100.0);
    REQUIRE(s.samples.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) CHECK(s.samples[i].raw == script[i]);
    CHECK(s.warnings.empty());
    CHECK(s.latency.reads == 5);
    CHECK(accumulate_raw(s.samples, c) == 90);
}

TEST_CASE("wrap-risk warning when the period exceeds the wrap time") {
    EnergyCounter c;
    c.width_bits = 16;  // 65.536 mJ range: wraps in 0.655 ms at 100 W
    CounterReader reader = []() -> std::optional<std::uint64_t> { return 0; };
    SampleSeries s = sample_counter(reader, c, 1'000'000, 0, 100.0);
    REQUIRE_FALSE(s.warnings.empty());
    CHECK(s.warnings[0].find("wrap-risk") != std::string::npos);
}

TEST_CASE("read failure truncates the series with a note") {
    int calls = 0;
    CounterReader reader = [&]() -> std::optional<std::uint64_t> {
        if (++calls > 2) return std::nullopt;
        return 5;
    };
    SampleSeries s = sample_counter(reader, counter32(), 1'000'000, 10'000'000, 100.0);
    CHECK(s.samples.size() == 2);
    REQUIRE_FALSE(s.warnings.empty());
    CHECK(s.warnings.back().find("read failure") != std::string::npos);
}

TEST_CASE("power trace csv round trip") {
    PowerTrace t;
    t.samples = {{0, 1.5}, {1'000'000, 2.25}, {2'000'000, 0.0}};
    PowerTrace back = parse_power_trace_csv(power_trace_to_csv(t));
    REQUIRE(back.samples.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(back.samples[i].t_ns == t.samples[i].t_ns);
        CHECK(back.samples[i].watts == doctest::Approx(t.samples[i].watts).epsilon(1e-9));
    }
}

TEST_CASE("power trace csv rejects malformed input") {
    CHECK_THROWS_AS(parse_power_trace_csv("time,power\n0,1\n"), ParseError);
    CHECK_THROWS_AS(parse_power_trace_csv("t_ns,power_mw\n0,-5\n"), ParseError);
    CHECK_THROWS_AS(parse_power_trace_csv("t_ns,power_mw\n5,1\n5,2\n"), OrderingError);
    CHECK_THROWS_AS(parse_power_trace_csv("t_ns,power_mw\nabc,1\n"), ParseError);
}
