// trace.hpp - Per-packet measurement records shared by the simulator, the
// estimator and the file readers.

#ifndef NCDELAY_TRACE_HPP
#define NCDELAY_TRACE_HPP

#include <cstdint>
#include <vector>

namespace ncdelay {

struct PacketRecord {
    std::int64_t id;
    double length_bits;
    double arrival;    // T_i, seconds
    double departure;  // T_i*, seconds

    bool operator==(const PacketRecord&) const = default;
};

struct MeasuredTrace {
    std::vector<PacketRecord> records;

    std::size_t size() const { return records.size(); }
    bool empty() const { return records.empty(); }
    bool operator==(const MeasuredTrace&) const = default;
};

// Throws PreconditionError naming the first broken rule: positive lengths,
// non-decreasing arrivals, departure after arrival, FIFO departures.
void validate_trace(const MeasuredTrace& trace);

} // namespace ncdelay

#endif
