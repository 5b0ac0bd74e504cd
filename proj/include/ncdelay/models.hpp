// models.hpp - Parametric arrival/service models and closed-form delay bounds.
//
// Four arrival models sit on top of a rate-latency server beta(t) = R [t - e]^+:
//
//   token bucket      alpha(t) = r t + b                       d <= b/R + e
//   four-tuple        alpha(t) = min(p t + l, r t + b)          d <= b/R + e - (R-r)(b-l)/((p-r)R)
//   periodic stairs   alpha(t) = (p t + l) (x) b ceil(t/T)      d <= b/R + e - (b-l)/p
//   real source       alpha(t) = min(r1 t + b1, r2 t + b2)      d <= (l/R - tau) n + e + tau
//
// Every bound is reported as signed components (base, error, reduction) that
// sum to the value, and can be cross-checked with horizontal_deviation() on
// curve_of(flow) and service_curve(server).

#ifndef NCDELAY_MODELS_HPP
#define NCDELAY_MODELS_HPP

#include "ncdelay/curve.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace ncdelay {

struct RateLatencyServer {
    double rate;          // R, bits/s
    double latency;       // e, seconds
    double nominal_rate;  // C, bits/s
};

struct TokenBucketFlow {
    double rate;   // r, bits/s
    double burst;  // b, bits
};

struct FourTupleFlow {
    double peak_rate;    // p, bits/s (link speed)
    double packet_bits;  // l
    double rate;         // r
    double burst;        // b
};

struct PeriodicStaircaseFlow {
    double period;       // T, seconds
    double burst;        // b, bits per period
    double peak_rate;    // p, bits/s
    double packet_bits;  // l
};

// Periodic burst of n packets emitted back to back at the source's maximum
// rate r_p, so consecutive packets of a burst are tau = l / r_p apart and
// bursts repeat every T_p = (n - 1) tau + delta.
struct RealSourceFlow {
    double packet_bits;   // l
    int burst_packets;    // n
    double spacing;       // tau, seconds
    double period;        // T_p, seconds
    double gap;           // delta, seconds
    double source_rate;   // r_p, bits/s
    double load;          // fraction of nominal_rate
    double nominal_rate;  // C, bits/s

    double r1() const { return packet_bits / spacing; }
    double b1() const { return packet_bits; }
    double r2() const { return burst_packets * packet_bits / period; }
    double b2() const { return burst_packets * packet_bits - r2() * spacing * (burst_packets - 1); }
    double burst_bits() const { return burst_packets * packet_bits; }
};

// n packets of l bits per period at `load` * C, spaced l / r_p inside a burst.
RealSourceFlow real_source_from_load(double packet_bits, int burst_packets, double load,
                                     double nominal_rate, double source_rate);

enum class BoundModel { ideal, token_bucket, model_a, model_b, model_c };

std::string_view to_string(BoundModel model);

struct BoundTerm {
    std::string name;
    double value;
};

struct DelayBound {
    BoundModel model;
    double value;                       // seconds
    std::vector<BoundTerm> components;  // signed, summing to value
    std::vector<BoundTerm> annotations; // informational, not summed
};

DelayBound ideal_delay(double packet_bits, double nominal_rate);
DelayBound token_bucket_bound(const TokenBucketFlow& flow, const RateLatencyServer& server);
DelayBound model_a_bound(const FourTupleFlow& flow, const RateLatencyServer& server);
DelayBound model_b_bound(const PeriodicStaircaseFlow& flow, const RateLatencyServer& server);
DelayBound model_c_bound(const RealSourceFlow& flow, const RateLatencyServer& server);

Curve service_curve(const RateLatencyServer& server);
Curve curve_of(const TokenBucketFlow& flow);
Curve curve_of(const FourTupleFlow& flow);
Curve curve_of(const PeriodicStaircaseFlow& flow);
Curve curve_of(const RealSourceFlow& flow);

} // namespace ncdelay

#endif
