// models.cpp - Closed-form delay bounds and the curves they are derived from.

#include "ncdelay/models.hpp"

#include "ncdelay/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ncdelay {

namespace {

// a <= b, forgiving rounding noise at the boundary.
bool at_most(double a, double b)
{
    return a <= b || std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
}

void require_positive(double x, const char* name)
{
    if (!(x > 0.0) || std::isnan(x)) {
        std::ostringstream msg;
        msg << name << " must be > 0, got " << x;
        throw DomainError(msg.str());
    }
}

void check_server(const RateLatencyServer& server)
{
    require_positive(server.rate, "service rate R");
    if (!(server.latency >= 0.0) || !std::isfinite(server.latency)) {
        throw DomainError("error term e must be finite and >= 0");
    }
}

std::string describe(const char* what, double lhs, const char* op, double rhs)
{
    std::ostringstream msg;
    msg << what << ": " << lhs << ' ' << op << ' ' << rhs;
    return msg.str();
}

DelayBound make_bound(BoundModel model, double base, double error, double reduction)
{
    DelayBound bound{model, base + error - reduction, {}, {}};
    bound.components = {{"base", base}, {"error", error}, {"reduction", -reduction}};
    return bound;
}

} // namespace

std::string_view to_string(BoundModel model)
{
    switch (model) {
    case BoundModel::ideal: return "ideal";
    case BoundModel::token_bucket: return "token_bucket";
    case BoundModel::model_a: return "model_a";
    case BoundModel::model_b: return "model_b";
    case BoundModel::model_c: return "model_c";
    }
    return "unknown";
}

RealSourceFlow real_source_from_load(double packet_bits, int burst_packets, double load,
                                     double nominal_rate, double source_rate)
{
    require_positive(packet_bits, "packet length l");
    require_positive(nominal_rate, "nominal rate C");
    require_positive(source_rate, "source rate r_p");
    if (burst_packets < 1) {
        throw DomainError("burst must hold at least one packet");
    }
    if (!(load > 0.0 && load <= 1.0)) {
        throw DomainError(describe("load must lie in (0, 1]", load, "not in", 1.0));
    }
    RealSourceFlow flow{};
    flow.packet_bits = packet_bits;
    flow.burst_packets = burst_packets;
    flow.spacing = packet_bits / source_rate;
    flow.period = burst_packets * packet_bits / (load * nominal_rate);
    flow.gap = flow.period - (burst_packets - 1) * flow.spacing;
    flow.source_rate = source_rate;
    flow.load = load;
    flow.nominal_rate = nominal_rate;
    if (!(flow.gap > 0.0)) {
        std::ostringstream msg;
        msg << "burst of " << burst_packets << " packets spaced " << flow.spacing
            << " s does not fit the period " << flow.period << " s at load " << load;
        throw InfeasibleSource(msg.str());
    }
    return flow;
}

DelayBound ideal_delay(double packet_bits, double nominal_rate)
{
    require_positive(packet_bits, "packet length");
    require_positive(nominal_rate, "nominal rate C");
    return make_bound(BoundModel::ideal, packet_bits / nominal_rate, 0.0, 0.0);
}

DelayBound token_bucket_bound(const TokenBucketFlow& flow, const RateLatencyServer& server)
{
    check_server(server);
    if (!(flow.burst >= 0.0) || !(flow.rate >= 0.0)) {
        throw DomainError("token bucket rate and burst must be >= 0");
    }
    if (!at_most(flow.rate, server.rate)) {
        throw UnboundedDelay(describe("sustained rate exceeds service rate", flow.rate, ">", server.rate));
    }
    return make_bound(BoundModel::token_bucket, flow.burst / server.rate, server.latency, 0.0);
}

DelayBound model_a_bound(const FourTupleFlow& flow, const RateLatencyServer& server)
{
    check_server(server);
    require_positive(flow.rate, "rate r");
    require_positive(flow.packet_bits, "packet length l");
    const double p = flow.peak_rate, l = flow.packet_bits, r = flow.rate, b = flow.burst;
    const double R = server.rate;
    if (p == r) {
        throw PreconditionError("degenerate four-tuple: link speed p equals sustained rate r");
    }
    if (!at_most(r, p)) {
        throw PreconditionError(describe("four-tuple needs p >= r", p, "<", r));
    }
    if (!at_most(l, b)) {
        throw PreconditionError(describe("four-tuple needs b >= l", b, "<", l));
    }
    if (!at_most(r, R)) {
        throw PreconditionError(describe("model A needs r <= R", r, ">", R));
    }
    if (!at_most(R, p)) {
        throw PreconditionError(describe("model A needs R <= p", R, ">", p));
    }
    const double reduction = p == kInfinity ? 0.0 : std::max(0.0, R - r) * (b - l) / ((p - r) * R);
    DelayBound bound = make_bound(BoundModel::model_a, b / R, server.latency, reduction);
    bound.annotations = {{"kink_t", p == kInfinity ? 0.0 : (b - l) / (p - r)}};
    return bound;
}

DelayBound model_b_bound(const PeriodicStaircaseFlow& flow, const RateLatencyServer& server)
{
    check_server(server);
    require_positive(flow.period, "period T");
    require_positive(flow.packet_bits, "packet length l");
    const double T = flow.period, b = flow.burst, p = flow.peak_rate, l = flow.packet_bits;
    const double R = server.rate;
    if (!at_most(b / T, R)) {
        throw UnboundedDelay(describe("periodic rate b/T exceeds service rate", b / T, ">", R));
    }
    if (!at_most(l, b)) {
        throw PreconditionError(describe("staircase flow needs b >= l", b, "<", l));
    }
    if (!at_most(b / T, p)) {
        throw PreconditionError(describe("link speed cannot carry the periodic load", p, "<", b / T));
    }
    if (!at_most(R, p)) {
        throw PreconditionError(describe("model B needs R <= p", R, ">", p));
    }
    const double reduction = p == kInfinity ? 0.0 : (b - l) / p;
    DelayBound bound = make_bound(BoundModel::model_b, b / R, server.latency, reduction);
    bound.annotations = {{"burst_complete_t", reduction}};
    return bound;
}

DelayBound model_c_bound(const RealSourceFlow& flow, const RateLatencyServer& server)
{
    check_server(server);
    const double R = server.rate, l = flow.packet_bits, tau = flow.spacing;
    const int n = flow.burst_packets;
    if (!at_most(flow.r2(), R)) {
        throw UnboundedDelay(describe("burst rate r2 exceeds service rate", flow.r2(), ">", R));
    }
    if (!at_most(R, flow.r1())) {
        throw PreconditionError(describe("model C needs R <= r1 = l/tau", R, ">", flow.r1()));
    }
    // n l / R + e - (n - 1) tau, with the per-packet catch-up capped at l / R.
    const double reduction = (n - 1) * std::min(tau, l / R);
    DelayBound bound = make_bound(BoundModel::model_c, n * l / R, server.latency, reduction);
    bound.annotations = {{"kink_t", (n - 1) * tau}, {"kink_value_bits", n * l}};
    return bound;
}

Curve service_curve(const RateLatencyServer& server)
{
    check_server(server);
    return Curve::rate_latency(server.rate, server.latency);
}

Curve curve_of(const TokenBucketFlow& flow)
{
    return Curve::affine(flow.rate, flow.burst);
}

Curve curve_of(const FourTupleFlow& flow)
{
    if (flow.peak_rate == kInfinity) {
        return Curve::affine(flow.rate, flow.burst);
    }
    return minimum(Curve::affine(flow.peak_rate, flow.packet_bits), Curve::affine(flow.rate, flow.burst));
}

Curve curve_of(const PeriodicStaircaseFlow& flow)
{
    const Curve stairs = Curve::staircase(flow.burst, flow.period);
    if (flow.peak_rate == kInfinity) {
        return stairs;
    }
    return convolve(Curve::affine(flow.peak_rate, flow.packet_bits), stairs);
}

Curve curve_of(const RealSourceFlow& flow)
{
    return minimum(Curve::affine(flow.r1(), flow.b1()), Curve::affine(flow.r2(), flow.b2()));
}

} // namespace ncdelay
