// param_draws.hpp - Random parameter sets that satisfy each bound's preconditions.

#ifndef NCDELAY_TESTS_PARAM_DRAWS_HPP
#define NCDELAY_TESTS_PARAM_DRAWS_HPP

#include "ncdelay/models.hpp"

#include <cmath>
#include <random>

namespace draws {

class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    // Picks lo or hi exactly once in a while so boundaries are exercised.
    double between(double lo, double hi)
    {
        const int pick = integer(0, 9);
        if (pick == 0) {
            return lo;
        }
        if (pick == 1) {
            return hi;
        }
        return uniform(lo, hi);
    }

    ncdelay::RateLatencyServer server(double lo_rate, double hi_rate)
    {
        return {between(lo_rate, hi_rate), integer(0, 9) == 0 ? 0.0 : uniform(0.0, 1e-4), hi_rate};
    }

    struct TokenBucketCase {
        ncdelay::TokenBucketFlow flow;
        ncdelay::RateLatencyServer server;
    };
    TokenBucketCase token_bucket()
    {
        const double r = log_uniform(1e6, 1e10);
        const double b = log_uniform(1.0, 1e6);
        return {{r, b}, server(r, r * uniform(1.0, 4.0))};
    }

    struct FourTupleCase {
        ncdelay::FourTupleFlow flow;
        ncdelay::RateLatencyServer server;
    };
    FourTupleCase four_tuple()
    {
        const double p = log_uniform(1e7, 1e11);
        const double r = p * uniform(0.01, 0.99);
        const double l = uniform(64.0, 12000.0);
        const double b = l * between(1.0, 40.0);
        return {{p, l, r, b}, server(r, p)};
    }

    struct StaircaseCase {
        ncdelay::PeriodicStaircaseFlow flow;
        ncdelay::RateLatencyServer server;
    };
    StaircaseCase staircase()
    {
        const double p = log_uniform(1e7, 1e11);
        const double l = uniform(64.0, 12000.0);
        const double b = l * integer(1, 16);
        const double T = b / p * between(1.0, 20.0);
        return {{T, b, p, l}, server(b / T, p)};
    }

    struct RealSourceCase {
        ncdelay::RealSourceFlow flow;
        ncdelay::RateLatencyServer server;
    };
    RealSourceCase real_source()
    {
        const double C = log_uniform(1e8, 1e11);
        const double rp = C * uniform(0.5, 1.0);
        const double l = uniform(64.0, 12000.0);
        const int n = integer(1, 16);
        const double load = uniform(0.02, 0.999) * rp / C;
        const ncdelay::RealSourceFlow flow = ncdelay::real_source_from_load(l, n, load, C, rp);
        return {flow, server(flow.r2(), flow.r1())};
    }

private:
    std::mt19937_64 rng_;
};

} // namespace draws

#endif
