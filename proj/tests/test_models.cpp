// test_models.cpp - Closed-form bounds, their curves, and the oracle equivalence.

#include "doctest.h"
#include "oracles.hpp"
#include "param_draws.hpp"

#include "ncdelay/errors.hpp"
#include "ncdelay/models.hpp"

#include <numeric>

using namespace ncdelay;

namespace {

// Worked example shared by several cases: 256 B packets, 3-packet burst.
constexpr double kL = 2048.0;
constexpr double kB = 6144.0;
const RateLatencyServer kServer{9e8, 4.2e-6, 1e9};

double component_sum(const DelayBound& bound)
{
    return std::accumulate(bound.components.begin(), bound.components.end(), 0.0,
                           [](double acc, const BoundTerm& t) { return acc + t.value; });
}

double component(const DelayBound& bound, const std::string& name)
{
    for (const auto& t : bound.components) {
        if (t.name == name) {
            return t.value;
        }
    }
    for (const auto& t : bound.annotations) {
        if (t.name == name) {
            return t.value;
        }
    }
    FAIL("missing component " << name);
    return 0.0;
}

double oracle_of(const Curve& alpha, const RateLatencyServer& server)
{
    return horizontal_deviation(alpha, service_curve(server)).value;
}

} // namespace

TEST_CASE("ideal delay")
{
    CHECK(ideal_delay(2048, 1e9).value == doctest::Approx(2.048e-6));
    CHECK(ideal_delay(12000, 1e9).value == doctest::Approx(1.2e-5));
    CHECK(ideal_delay(2048, 1e300).value < 1e-290);
    CHECK_THROWS_AS(ideal_delay(0.0, 1e9), DomainError);
    CHECK_THROWS_AS(ideal_delay(2048, -1.0), DomainError);
}

TEST_CASE("token bucket bound")
{
    const DelayBound a = token_bucket_bound({5e8, kB}, {1e9, 0.0, 1e9});
    CHECK(a.value == doctest::Approx(6.144e-6).epsilon(1e-12));
    CHECK(a.value == doctest::Approx(oracle_of(Curve::affine(5e8, kB), {1e9, 0.0, 1e9})).epsilon(1e-12));

    const DelayBound b = token_bucket_bound({5e8, kB}, kServer);
    CHECK(b.value == doctest::Approx(1.1026666666666667e-05).epsilon(1e-12));
    CHECK(b.value == doctest::Approx(component_sum(b)).epsilon(1e-15));

    CHECK(token_bucket_bound({5e8, 0.0}, {1e9, 0.0, 1e9}).value == 0.0);
    CHECK_THROWS_AS(token_bucket_bound({2e9, kB}, kServer), UnboundedDelay);
}

TEST_CASE("model A bound")
{
    const FourTupleFlow flow{1e9, kL, 5e8, kB};
    const DelayBound bound = model_a_bound(flow, kServer);
    // Frozen from exact rational arithmetic.
    CHECK(bound.value == doctest::Approx(7.385777777777778e-06).epsilon(1e-12));
    CHECK(-component(bound, "reduction") == doctest::Approx(3.6408888888888887e-06).epsilon(1e-12));
    CHECK(bound.value == doctest::Approx(oracle_of(curve_of(flow), kServer)).epsilon(1e-12));
    CHECK(component(bound, "kink_t") == doctest::Approx(8.192e-6));

    // R = r collapses to the token bucket bound.
    const DelayBound at_rate = model_a_bound(flow, {5e8, 4.2e-6, 1e9});
    CHECK(component(at_rate, "reduction") == 0.0);
    CHECK(at_rate.value == doctest::Approx(kB / 5e8 + 4.2e-6));

    // b = l: no burst to shave.
    const DelayBound single = model_a_bound({1e9, kL, 5e8, kL}, kServer);
    CHECK(component(single, "reduction") == 0.0);
    CHECK(single.value == doctest::Approx(kL / 9e8 + 4.2e-6));

    CHECK_THROWS_AS(model_a_bound(flow, {1.1e9, 4.2e-6, 1e9}), PreconditionError);
    CHECK_THROWS_AS(model_a_bound(flow, {4e8, 4.2e-6, 1e9}), PreconditionError);
    CHECK_THROWS_AS(model_a_bound({5e8, kL, 5e8, kB}, {5e8, 0.0, 1e9}), PreconditionError);
    CHECK_THROWS_AS(model_a_bound({1e9, kB, 5e8, kL}, kServer), PreconditionError);
}

TEST_CASE("model B bound")
{
    const PeriodicStaircaseFlow flow{1e-5, kB, 1e9, kL};
    const DelayBound bound = model_b_bound(flow, kServer);
    CHECK(bound.value == doctest::Approx(6.930666666666667e-06).epsilon(1e-12));
    CHECK(bound.value == doctest::Approx(oracle_of(curve_of(flow), kServer)).epsilon(1e-12));
    CHECK(bound.value == doctest::Approx(component_sum(bound)).epsilon(1e-15));

    const DelayBound single = model_b_bound({1e-5, kL, 1e9, kL}, kServer);
    CHECK(single.value == doctest::Approx(kL / 9e8 + 4.2e-6));

    const DelayBound fast_link = model_b_bound({1e-5, kB, kInfinity, kL}, kServer);
    CHECK(fast_link.value == doctest::Approx(token_bucket_bound({5e8, kB}, kServer).value));

    // b / T above R.
    CHECK_THROWS_AS(model_b_bound({5e-6, kB, 2e9, kL}, kServer), UnboundedDelay);
    CHECK_THROWS_AS(model_b_bound({1e-5, kB, 8e8, kL}, kServer), PreconditionError);
}

TEST_CASE("model C bound and the real source")
{
    const RealSourceFlow flow = real_source_from_load(kL, 3, 0.5, 1e9, 0.96e9);
    CHECK(flow.period == doctest::Approx(1.2288e-5).epsilon(1e-12));
    CHECK(flow.spacing == doctest::Approx(2.1333333333333334e-06).epsilon(1e-12));
    CHECK(flow.gap == doctest::Approx(8.021333333333334e-06).epsilon(1e-12));

    const DelayBound bound = model_c_bound(flow, kServer);
    CHECK(bound.value == doctest::Approx(6.76e-6).epsilon(1e-12));
    CHECK(bound.value == doctest::Approx(oracle_of(curve_of(flow), kServer)).epsilon(1e-12));
    CHECK(component(bound, "kink_t") == doctest::Approx(2 * flow.spacing));
    CHECK(component(bound, "kink_value_bits") == doctest::Approx(kB));

    const RealSourceFlow one = real_source_from_load(kL, 1, 0.5, 1e9, 0.96e9);
    CHECK(one.gap == doctest::Approx(one.period));
    CHECK(model_c_bound(one, kServer).value == doctest::Approx(kL / 9e8 + 4.2e-6).epsilon(1e-12));

    // R = r1 = l / tau leaves e + tau.
    const DelayBound at_r1 = model_c_bound(flow, {flow.r1(), 4.2e-6, 1e9});
    CHECK(at_r1.value == doctest::Approx(4.2e-6 + flow.spacing).epsilon(1e-12));

    CHECK_THROWS_AS(model_c_bound(flow, {4e8, 4.2e-6, 1e9}), UnboundedDelay);
    CHECK_THROWS_AS(model_c_bound(flow, {0.99e9, 4.2e-6, 1e9}), PreconditionError);
}

TEST_CASE("real source feasibility")
{
    CHECK_THROWS_AS(real_source_from_load(1.0, 3, 1.5, 1.0, 1.0), DomainError);
    // T_p = 4 s but the burst needs (n - 1) tau = 4 s, so delta = 0.
    CHECK_THROWS_AS(real_source_from_load(2.0, 3, 0.75, 2.0, 1.0), InfeasibleSource);
    CHECK_THROWS_AS(real_source_from_load(kL, 0, 0.5, 1e9, 1e9), DomainError);
    CHECK_THROWS_AS(real_source_from_load(kL, 3, 0.0, 1e9, 1e9), DomainError);
}

TEST_CASE("curve_of produces the documented shapes")
{
    const Curve four = curve_of(FourTupleFlow{1e9, kL, 5e8, kB});
    REQUIRE(four.segments().size() == 2);
    CHECK(four.segments()[1].t == doctest::Approx(8.192e-6));
    CHECK(four.is_concave());

    const Curve tb = curve_of(TokenBucketFlow{5e8, kB});
    CHECK(tb.kind() == CurveKind::affine);

    const RealSourceFlow flow = real_source_from_load(kL, 3, 0.5, 1e9, 0.96e9);
    const Curve rs = curve_of(flow);
    REQUIRE(rs.segments().size() == 2);
    CHECK(rs.segments()[1].t == doctest::Approx(4.2666666666666667e-6).epsilon(1e-9));
    CHECK(rs.eval(rs.segments()[1].t) == doctest::Approx(kB).epsilon(1e-9));

    const Curve stairs = curve_of(PeriodicStaircaseFlow{1e-5, kB, 1e9, kL});
    CHECK(oracle::non_decreasing(stairs, 3e-4, 3000));
    CHECK(oracle::subadditivity_violation(stairs, 1.1e-4, 97) <= 1e-9);
}

TEST_CASE("property: closed forms equal the numeric horizontal deviation")
{
    draws::Sampler sampler(31337);
    for (int i = 0; i < 1000; ++i) {
        const auto tb = sampler.token_bucket();
        CHECK(oracle::rel_close(token_bucket_bound(tb.flow, tb.server).value, oracle_of(curve_of(tb.flow), tb.server),
                                1e-9));
        const auto a = sampler.four_tuple();
        CHECK(oracle::rel_close(model_a_bound(a.flow, a.server).value, oracle_of(curve_of(a.flow), a.server), 1e-9));
        const auto b = sampler.staircase();
        CHECK(oracle::rel_close(model_b_bound(b.flow, b.server).value, oracle_of(curve_of(b.flow), b.server), 1e-9));
        const auto c = sampler.real_source();
        CHECK(oracle::rel_close(model_c_bound(c.flow, c.server).value, oracle_of(curve_of(c.flow), c.server), 1e-9));
    }
}

TEST_CASE("property: model A never exceeds the token bucket bound")
{
    draws::Sampler sampler(4);
    for (int i = 0; i < 500; ++i) {
        const auto a = sampler.four_tuple();
        const double with_link = model_a_bound(a.flow, a.server).value;
        const double without = token_bucket_bound({a.flow.rate, a.flow.burst}, a.server).value;
        CHECK(with_link <= without * (1 + 1e-12));
        if (a.server.rate > a.flow.rate && a.flow.burst > a.flow.packet_bits) {
            CHECK(with_link < without);
        }
    }
}

TEST_CASE("property: monotonicity in R, e, b and l")
{
    draws::Sampler sampler(8);
    for (int i = 0; i < 300; ++i) {
        const auto a = sampler.four_tuple();
        const double base = model_a_bound(a.flow, a.server).value;
        RateLatencyServer faster = a.server;
        faster.rate = std::min(a.flow.peak_rate, a.server.rate * 1.01);
        CHECK(model_a_bound(a.flow, faster).value <= base * (1 + 1e-12));
        RateLatencyServer slower_e = a.server;
        slower_e.latency += 1e-6;
        CHECK(model_a_bound(a.flow, slower_e).value >= base);
        FourTupleFlow bigger_b = a.flow;
        bigger_b.burst *= 1.1;
        CHECK(model_a_bound(bigger_b, a.server).value >= base * (1 - 1e-12));
        FourTupleFlow bigger_l = a.flow;
        bigger_l.packet_bits = std::min(bigger_l.burst, bigger_l.packet_bits * 1.1);
        CHECK(model_a_bound(bigger_l, a.server).value >= base * (1 - 1e-12));

        const auto b = sampler.staircase();
        const double vb = model_b_bound(b.flow, b.server).value;
        RateLatencyServer fb = b.server;
        fb.rate = std::min(b.flow.peak_rate, fb.rate * 1.01);
        CHECK(model_b_bound(b.flow, fb).value <= vb * (1 + 1e-12));
        PeriodicStaircaseFlow lb = b.flow;
        lb.packet_bits = std::min(lb.burst, lb.packet_bits * 1.1);
        CHECK(model_b_bound(lb, b.server).value >= vb * (1 - 1e-12));

        const auto c = sampler.real_source();
        const double vc = model_c_bound(c.flow, c.server).value;
        RateLatencyServer fc = c.server;
        fc.rate = std::min(c.flow.r1(), fc.rate * 1.01);
        CHECK(model_c_bound(c.flow, fc).value <= vc * (1 + 1e-12));
    }
}

TEST_CASE("property: limits recover simpler bounds")
{
    draws::Sampler sampler(12);
    for (int i = 0; i < 200; ++i) {
        const auto a = sampler.four_tuple();
        FourTupleFlow huge_p = a.flow;
        huge_p.peak_rate = 1e30;
        const double tb = token_bucket_bound({a.flow.rate, a.flow.burst}, a.server).value;
        CHECK(oracle::rel_close(model_a_bound(huge_p, a.server).value, tb, 1e-9));

        const auto b = sampler.staircase();
        PeriodicStaircaseFlow fast = b.flow;
        fast.peak_rate = 1e30;
        CHECK(oracle::rel_close(model_b_bound(fast, b.server).value,
                                token_bucket_bound({b.flow.burst / b.flow.period, b.flow.burst}, b.server).value,
                                1e-9));

        const auto c = sampler.real_source();
        const RealSourceFlow single = real_source_from_load(c.flow.packet_bits, 1, c.flow.load, c.flow.nominal_rate,
                                                            c.flow.source_rate);
        RateLatencyServer s = c.server;
        s.rate = std::clamp(s.rate, single.r2(), single.r1());
        CHECK(oracle::rel_close(model_c_bound(single, s).value, single.packet_bits / s.rate + s.latency, 1e-12));
    }
}
