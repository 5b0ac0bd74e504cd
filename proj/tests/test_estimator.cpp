// test_estimator.cpp - Virtual finishing times, the rate search and IO correction.

#include "doctest.h"

#include "ncdelay/errors.hpp"
#include "ncdelay/estimator.hpp"
#include "ncdelay/simulator.hpp"

#include <cmath>
#include <random>

using namespace ncdelay;

namespace {

MeasuredTrace make_trace(std::vector<std::pair<double, double>> times, double bits = 2048)
{
    MeasuredTrace t;
    std::int64_t id = 0;
    for (auto [a, d] : times) {
        t.records.push_back({id++, bits, a, d});
    }
    return t;
}

MeasuredTrace simulated(double rate, double e, int length_bytes, int n, double load, std::int64_t packets,
                        double jitter = 0.0, std::uint64_t seed = 1, SourceKind kind = SourceKind::real_source)
{
    const RealSourceFlow flow = real_source_from_load(length_bytes * 8.0, n, load, 1e9, 0.96e9);
    return simulate(generate_arrivals({kind, packets}, flow), {rate, e, kInfinity, jitter, seed}).trace;
}

SearchConfig tight()
{
    SearchConfig s;
    s.jitter_floor = 2e-9;
    return s;
}

} // namespace

TEST_CASE("virtual finishing times")
{
    const auto two = virtual_finishing_times(make_trace({{0.0, 1.0}, {1e-6, 1.0}}), 1e9);
    CHECK(two[0] == doctest::Approx(2.048e-6));
    CHECK(two[1] == doctest::Approx(4.096e-6));

    const auto apart = virtual_finishing_times(make_trace({{0.0, 1.0}, {1e-3, 1.0}}), 1e9);
    CHECK(apart[1] == doctest::Approx(1e-3 + 2.048e-6));

    const auto one = virtual_finishing_times(make_trace({{5e-6, 1.0}}), 1e9);
    CHECK(one[0] == doctest::Approx(5e-6 + 2.048e-6));

    CHECK(virtual_finishing_times(MeasuredTrace{}, 1e9).empty());
    CHECK_THROWS_AS(virtual_finishing_times(make_trace({{0.0, 1.0}}), 0.0), DomainError);
}

TEST_CASE("mixed packet lengths use their own service time")
{
    MeasuredTrace t;
    t.records = {{0, 512, 0.0, 1.0}, {1, 12000, 0.0, 1.0}, {2, 4096, 0.0, 1.0}};
    const auto f = virtual_finishing_times(t, 1e9);
    CHECK(f[0] == doctest::Approx(0.512e-6));
    CHECK(f[1] == doctest::Approx(12.512e-6));
    CHECK(f[2] == doctest::Approx(16.608e-6));
}

TEST_CASE("round trip on a jitter-free bursty trace")
{
    const MeasuredTrace trace = simulated(9e8, 4.2e-6, 256, 3, 0.8, 10000);
    const EstimationResult r = estimate(trace, 1e9, tight());
    CHECK(std::abs(r.rate - 9e8) <= 0.01 * 9e8);
    CHECK(std::abs(r.error - 4.2e-6) <= 0.1e-6);
    CHECK(r.iterations > 0);
    CHECK(r.slack_profile.size() == trace.size());
}

TEST_CASE("ideal trace at C with no latency")
{
    const MeasuredTrace trace = simulated(1e9, 0.0, 256, 3, 0.5, 3000, 0.0, 1, SourceKind::ideal_periodic);
    const EstimationResult r = estimate(trace, 1e9);
    CHECK(r.rate == 1e9);
    CHECK(r.error <= 1e-12); // picosecond clock rounding
}

TEST_CASE("shift invariance")
{
    const MeasuredTrace trace = simulated(9e8, 4.2e-6, 512, 3, 0.8, 3000);
    MeasuredTrace shifted = trace;
    for (auto& rec : shifted.records) {
        rec.departure += 5e-6;
    }
    const EstimationResult a = estimate(trace, 1e9, tight());
    const EstimationResult b = estimate(shifted, 1e9, tight());
    CHECK(a.rate == b.rate);
    CHECK(b.error - a.error == doctest::Approx(5e-6).epsilon(1e-9));
}

TEST_CASE("property: soundness and maximality over random traces")
{
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int lengths[] = {256, 512, 1500};
    for (int trial = 0; trial < 40; ++trial) {
        const double rate = 5e8 + 4.5e8 * u(rng);
        const double e = 1e-5 * u(rng);
        const int n = 2 + static_cast<int>(6 * u(rng));
        const double load = std::min(0.9, rate / 1e9 * (0.5 + 0.45 * u(rng)));
        const bool jitter = u(rng) < 0.5;
        const MeasuredTrace trace = simulated(rate, e, lengths[trial % 3], n, load, 1500, jitter ? 5e-8 : 0.0, trial);
        SearchConfig search = tight();
        search.jitter_floor = jitter ? 50e-9 : 2e-9;
        search.linear = trial % 4 == 0;
        const EstimationResult r = estimate(trace, 1e9, search);

        const auto finish = virtual_finishing_times(trace, r.rate);
        for (std::size_t i = 0; i < finish.size(); ++i) {
            CHECK(trace.records[i].departure <= finish[i] + r.error);
        }
        CHECK(r.rate <= 1e9);
        CHECK(r.error >= 0.0);
        if (r.rate < 1e9) {
            const SlackCheck above = check_slack(trace, r.rate + r.step, search.jitter_floor);
            CHECK(above.violation.has_value());
        }
        CHECK(std::abs(r.rate - rate) <= (jitter ? 0.02 : 0.01) * rate);
    }
}

TEST_CASE("soundness on mixed packet lengths")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Arrival> arrivals;
    double t = 0.0;
    for (int i = 0; i < 3000; ++i) {
        t += u(rng) < 0.6 ? 0.0 : 3e-5 * u(rng);
        arrivals.push_back({i, 8.0 * (64 + std::floor(1436 * u(rng))), t});
    }
    const MeasuredTrace trace = simulate(arrivals, {8e8, 3e-6}).trace;
    const EstimationResult r = estimate(trace, 1e9, tight());
    const auto finish = virtual_finishing_times(trace, r.rate);
    for (std::size_t i = 0; i < finish.size(); ++i) {
        CHECK(trace.records[i].departure <= finish[i] + r.error);
    }
    CHECK(r.rate == doctest::Approx(8e8).epsilon(0.01));
    CHECK(r.error == doctest::Approx(3e-6).epsilon(0.05));
}

TEST_CASE("estimation errors")
{
    CHECK_THROWS_AS(estimate(make_trace({{0.0, 1e-6}}), 1e9), PreconditionError);
    CHECK_THROWS_AS(estimate(make_trace({{0.0, 1e-6}, {0.0, 0.5e-6}}), 1e9), PreconditionError);
    CHECK_THROWS_AS(estimate(make_trace({{1e-6, 3e-6}, {0.0, 4e-6}}), 1e9), PreconditionError);
    // Widely spaced packets never queue.
    CHECK_THROWS_AS(estimate(make_trace({{0.0, 3e-6}, {1.0, 1.000003}}), 1e9), EstimationFailed);
    SearchConfig bad;
    bad.resolution = 0.0;
    CHECK_THROWS_AS(estimate(simulated(9e8, 1e-6, 256, 3, 0.5, 100), 1e9, bad), ConfigError);
}

TEST_CASE("a single late packet raises a warning")
{
    MeasuredTrace trace = simulated(9e8, 4.2e-6, 256, 3, 0.8, 3000);
    trace.records[1500].departure += 5e-6;
    for (std::size_t i = 1501; i < trace.size(); ++i) {
        trace.records[i].departure = std::max(trace.records[i].departure, trace.records[i - 1].departure);
    }
    SearchConfig s = tight();
    s.jitter_floor = 1e-5;
    const EstimationResult r = estimate(trace, 1e9, s);
    CHECK_FALSE(r.warnings.empty());
}

TEST_CASE("IO delay table lookups")
{
    const IoDelayTable table = default_io_delay_table();
    CHECK(io_delay_lookup(table, 256, 0.2) == doctest::Approx(2.4e-6));
    CHECK(io_delay_lookup(table, 256, 1.0) == doctest::Approx(2.4e-6));
    CHECK(io_delay_lookup(table, 512, 0.5) == doctest::Approx(2.4e-6));
    CHECK(io_delay_lookup(table, 1500, 0.8) == doctest::Approx(3.6e-6));
    CHECK(table.maximum_for(1500) == doctest::Approx(3.6e-6));
    // Nearest class, ties toward the larger one.
    CHECK(io_delay_lookup(table, 384, 0.5) == doctest::Approx(2.4e-6));
    CHECK(io_delay_lookup(table, 1006, 0.5) == doctest::Approx(3.6e-6));
    CHECK(io_delay_lookup(table, 1005, 0.5) == doctest::Approx(2.4e-6));
    CHECK(io_delay_lookup(table, 9000, 0.5) == doctest::Approx(3.6e-6));
    CHECK_THROWS_AS(io_delay_lookup(IoDelayTable{}, 256, 0.5), ConfigError);
}

TEST_CASE("IO correction reproduces the reported error terms")
{
    const IoDelayTable table = default_io_delay_table();
    EstimationResult r;
    r.error = 1.8e-6;
    CHECK(apply_io_correction(r, table, 256).error_with_io == doctest::Approx(4.2e-6).epsilon(1e-12));
    CHECK(apply_io_correction(r, table, 512).error_with_io == doctest::Approx(4.2e-6).epsilon(1e-12));
    r.error = 1.4e-6;
    CHECK(apply_io_correction(r, table, 1500).error_with_io == doctest::Approx(5.0e-6).epsilon(1e-12));
    r.error = 0.0;
    const EstimationResult z = apply_io_correction(r, table, 1500);
    CHECK(z.error_with_io == z.io_delay);
    CHECK(z.io_delay == doctest::Approx(3.6e-6));
}
