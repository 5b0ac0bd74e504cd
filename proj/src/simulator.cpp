// simulator.cpp - Event loop, source timing and the delay sweep.

#include "ncdelay/simulator.hpp"

#include "ncdelay/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace ncdelay {

namespace {

using Ticks = std::int64_t;

Ticks to_ticks(double seconds)
{
    return std::llround(seconds * kTicksPerSecond);
}

double to_seconds(Ticks ticks)
{
    return static_cast<double>(ticks) / kTicksPerSecond;
}

void check_server(const ServerConfig& s)
{
    if (!(s.rate > 0.0) || !std::isfinite(s.rate)) {
        throw DomainError("server rate R must be finite and > 0");
    }
    if (!(s.processing >= 0.0) || !std::isfinite(s.processing)) {
        throw DomainError("processing delay must be finite and >= 0");
    }
    if (!(s.ingress_rate > 0.0)) {
        throw DomainError("ingress rate must be > 0");
    }
    if (!(s.jitter >= 0.0) || !std::isfinite(s.jitter)) {
        throw DomainError("jitter bound must be finite and >= 0");
    }
}

} // namespace

std::string_view to_string(SourceKind kind)
{
    return kind == SourceKind::ideal_periodic ? "ideal_periodic" : "real_source";
}

SourceKind source_kind_from_string(std::string_view name)
{
    if (name == "ideal_periodic") {
        return SourceKind::ideal_periodic;
    }
    if (name == "real_source") {
        return SourceKind::real_source;
    }
    throw ConfigError("unknown source kind '" + std::string(name) + "' (ideal_periodic or real_source)");
}

std::vector<Arrival> generate_arrivals(const SourceConfig& source, const RealSourceFlow& flow)
{
    if (source.total_packets < 0) {
        throw DomainError("packet count must be >= 0");
    }
    if (flow.burst_packets < 1 || !(flow.packet_bits > 0.0) || !(flow.period > 0.0)) {
        throw DomainError("source needs n >= 1, l > 0 and T_p > 0");
    }
    if (source.kind == SourceKind::real_source && !(flow.period - (flow.burst_packets - 1) * flow.spacing > 0.0)) {
        throw InfeasibleSource("burst does not fit in the period (delta <= 0)");
    }
    std::vector<Arrival> arrivals;
    arrivals.reserve(static_cast<std::size_t>(source.total_packets));
    for (std::int64_t id = 0; id < source.total_packets; ++id) {
        const std::int64_t burst = id / flow.burst_packets;
        const std::int64_t k = id % flow.burst_packets;
        double t = static_cast<double>(burst) * flow.period;
        if (source.kind == SourceKind::real_source) {
            t += static_cast<double>(k) * flow.spacing;
        }
        arrivals.push_back({id, flow.packet_bits, t});
    }
    return arrivals;
}

SimulationReport simulate(const std::vector<Arrival>& arrivals, const ServerConfig& server)
{
    check_server(server);
    SimulationReport report;
    const std::size_t n = arrivals.size();
    report.trace.records.reserve(n);
    report.delays.reserve(n);
    report.parts.reserve(n);

    std::mt19937_64 rng(server.seed);
    std::uniform_real_distribution<double> jitter(0.0, server.jitter);
    const Ticks processing = to_ticks(server.processing);
    const bool ingress = std::isfinite(server.ingress_rate);

    Ticks prev_time = 0, prev_eligible = 0, prev_finish = 0, prev_departure = 0;
    std::vector<Ticks> eligible_at(n), departs_at(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Arrival& a = arrivals[i];
        if (!(a.length_bits > 0.0)) {
            throw DomainError("packet " + std::to_string(a.id) + " has non-positive length");
        }
        const Ticks t = to_ticks(a.time);
        if (i > 0 && t < prev_time) {
            std::ostringstream msg;
            msg << "arrivals out of order at packet " << a.id;
            throw PreconditionError(msg.str());
        }
        Ticks eligible = t;
        if (ingress) {
            eligible = (i > 0 ? std::max(t, prev_eligible) : t) + to_ticks(a.length_bits / server.ingress_rate);
        }
        const Ticks start = i > 0 ? std::max(eligible, prev_finish) : eligible;
        const Ticks service = to_ticks(a.length_bits / server.rate);
        const Ticks finish = start + service;
        const Ticks extra = server.jitter > 0.0 ? to_ticks(jitter(rng)) : 0;
        // Jitter never reorders departures.
        const Ticks departure = std::max(i > 0 ? prev_departure : finish, finish + processing + extra);

        report.trace.records.push_back({a.id, a.length_bits, to_seconds(eligible), to_seconds(departure)});
        report.delays.push_back(to_seconds(departure - eligible));
        report.parts.push_back({to_seconds(start - eligible), to_seconds(departure - finish), to_seconds(service)});
        eligible_at[i] = eligible;
        departs_at[i] = departure;
        prev_time = t;
        prev_eligible = eligible;
        prev_finish = finish;
        prev_departure = departure;
    }
    if (!report.delays.empty()) {
        report.max_delay = *std::max_element(report.delays.begin(), report.delays.end());
    }

    // B(t) = A(t) - D(t) after all events sharing a time stamp.
    std::size_t ia = 0, id = 0;
    double backlog = 0.0;
    while (ia < n || id < n) {
        const Ticks now = id >= n || (ia < n && eligible_at[ia] <= departs_at[id]) ? eligible_at[ia] : departs_at[id];
        while (ia < n && eligible_at[ia] == now) {
            backlog += arrivals[ia++].length_bits;
        }
        while (id < n && departs_at[id] == now) {
            backlog -= arrivals[id++].length_bits;
        }
        report.backlog.push_back({to_seconds(now), backlog});
    }
    return report;
}

PointModels point_models(const SweepPoint& point, const SweepSetup& setup)
{
    const double l = point.length_bytes * 8.0;
    PointModels m{};
    m.flow = real_source_from_load(l, point.burst_packets, point.load, setup.nominal_rate, setup.source_rate);
    const double link = setup.source == SourceKind::real_source
                            ? std::min(setup.source_rate, setup.server.ingress_rate)
                            : setup.server.ingress_rate;
    const double b = m.flow.burst_bits();
    m.four_tuple = {link, l, m.flow.r2(), b};
    m.staircase = {m.flow.period, b, link, l};
    m.server = {setup.server.rate, setup.server.processing + setup.server.jitter, setup.nominal_rate};
    return m;
}

namespace {

template <typename F>
std::optional<double> try_bound(SweepRow& row, const char* name, F&& f)
{
    try {
        return f().value;
    } catch (const Error& e) {
        row.notes.push_back(std::string(name) + ": " + e.what());
        return std::nullopt;
    }
}

} // namespace

std::vector<SweepRow> max_delay_sweep(const std::vector<SweepPoint>& grid, const SweepSetup& setup)
{
    std::vector<SweepRow> rows;
    rows.reserve(grid.size());
    for (const SweepPoint& point : grid) {
        SweepRow row{point, {}, {}, {}, {}, {}, {}};
        PointModels m;
        try {
            m = point_models(point, setup);
            const auto arrivals = generate_arrivals({setup.source, setup.packets}, m.flow);
            row.max_delay = simulate(arrivals, setup.server).max_delay;
        } catch (const Error& e) {
            row.notes.push_back(std::string("simulation: ") + e.what());
            rows.push_back(std::move(row));
            continue;
        }
        row.bound_ideal = try_bound(row, "ideal", [&] { return ideal_delay(m.flow.packet_bits, setup.nominal_rate); });
        row.bound_a = try_bound(row, "model_a", [&] { return model_a_bound(m.four_tuple, m.server); });
        row.bound_b = try_bound(row, "model_b", [&] { return model_b_bound(m.staircase, m.server); });
        row.bound_c = try_bound(row, "model_c", [&] { return model_c_bound(m.flow, m.server); });
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace ncdelay
