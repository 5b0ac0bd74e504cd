// simulator.hpp - Single-node FIFO server and the periodic burst source.
//
// The event loop runs on an integer picosecond clock. A packet first crosses
// the ingress link (store-and-forward at p_in, one packet at a time), becomes
// eligible, waits in the FIFO, is served at rate R and leaves after a fixed
// processing delay plus optional seeded jitter. The trace records the
// eligibility instant as the arrival, so per-packet delay is
// T_queue + T_trans + T_proc.

#ifndef NCDELAY_SIMULATOR_HPP
#define NCDELAY_SIMULATOR_HPP

#include "ncdelay/curve.hpp"
#include "ncdelay/models.hpp"
#include "ncdelay/trace.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ncdelay {

inline constexpr double kTicksPerSecond = 1e12;

enum class SourceKind { ideal_periodic, real_source };

std::string_view to_string(SourceKind kind);
SourceKind source_kind_from_string(std::string_view name);

struct SourceConfig {
    SourceKind kind = SourceKind::real_source;
    std::int64_t total_packets = 0;
};

struct Arrival {
    std::int64_t id;
    double length_bits;
    double time;  // first bit leaves the source, seconds

    bool operator==(const Arrival&) const = default;
};

std::vector<Arrival> generate_arrivals(const SourceConfig& source, const RealSourceFlow& flow);

struct ServerConfig {
    double rate = 0.0;                // R, bits/s
    double processing = 0.0;          // e_proc, seconds
    double ingress_rate = kInfinity;  // p_in, bits/s
    double jitter = 0.0;              // departure jitter drawn from [0, jitter], seconds
    std::uint64_t seed = 0;
};

struct DelayParts {
    double queue;
    double processing;
    double transmission;
};

struct BacklogSample {
    double time;
    double bits;
};

struct SimulationReport {
    MeasuredTrace trace;
    std::vector<double> delays;
    std::vector<DelayParts> parts;
    std::vector<BacklogSample> backlog;
    double max_delay = 0.0;
};

SimulationReport simulate(const std::vector<Arrival>& arrivals, const ServerConfig& server);

struct SweepPoint {
    int length_bytes;
    double load;
    int burst_packets;
};

struct SweepSetup {
    ServerConfig server;
    SourceKind source = SourceKind::real_source;
    double nominal_rate = 1e9;   // C
    double source_rate = 0.96e9; // r_p
    std::int64_t packets = 2000; // per grid point
};

// Bounds that do not apply at a grid point (precondition or stability) are empty.
struct SweepRow {
    SweepPoint point;
    std::optional<double> max_delay;
    std::optional<double> bound_ideal;
    std::optional<double> bound_a;
    std::optional<double> bound_b;
    std::optional<double> bound_c;
    std::vector<std::string> notes;
};

// The flows handed to each bound for one grid point.
struct PointModels {
    RealSourceFlow flow;
    FourTupleFlow four_tuple;
    PeriodicStaircaseFlow staircase;
    RateLatencyServer server;
};

PointModels point_models(const SweepPoint& point, const SweepSetup& setup);
std::vector<SweepRow> max_delay_sweep(const std::vector<SweepPoint>& grid, const SweepSetup& setup);

} // namespace ncdelay

#endif
