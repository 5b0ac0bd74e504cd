// estimator.cpp - Slack test, rate search and IO-delay correction.

#include "ncdelay/estimator.hpp"

#include "ncdelay/errors.hpp"
#include "ncdelay/units.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <set>
#include <sstream>

namespace ncdelay {

void validate_trace(const MeasuredTrace& trace)
{
    const auto& recs = trace.records;
    for (std::size_t i = 0; i < recs.size(); ++i) {
        const PacketRecord& r = recs[i];
        std::ostringstream msg;
        msg << "packet " << r.id << ": ";
        if (!(r.length_bits > 0.0)) {
            msg << "length must be positive";
            throw PreconditionError(msg.str());
        }
        if (!(r.departure > r.arrival)) {
            msg << "departure " << r.departure << " s is not after arrival " << r.arrival << " s";
            throw PreconditionError(msg.str());
        }
        if (i > 0 && r.arrival < recs[i - 1].arrival) {
            msg << "arrival goes backwards (arrivals must be non-decreasing)";
            throw PreconditionError(msg.str());
        }
        if (i > 0 && r.departure < recs[i - 1].departure) {
            msg << "departure overtakes packet " << recs[i - 1].id << " (FIFO order violated)";
            throw PreconditionError(msg.str());
        }
    }
}

std::vector<double> virtual_finishing_times(const MeasuredTrace& trace, double rate)
{
    if (!(rate > 0.0)) {
        throw DomainError("service rate must be > 0");
    }
    std::vector<double> finish;
    finish.reserve(trace.size());
    double prev = -std::numeric_limits<double>::infinity();
    for (const PacketRecord& r : trace.records) {
        prev = std::max(r.arrival, prev) + r.length_bits / rate;
        finish.push_back(prev);
    }
    return finish;
}

std::vector<double> slack_profile(const MeasuredTrace& trace, double rate)
{
    std::vector<double> slack = virtual_finishing_times(trace, rate);
    for (std::size_t i = 0; i < slack.size(); ++i) {
        slack[i] = trace.records[i].departure - slack[i];
    }
    return slack;
}

SlackCheck check_slack(const MeasuredTrace& trace, double rate, double jitter_floor)
{
    const std::vector<double> finish = virtual_finishing_times(trace, rate);
    SlackCheck check;
    double period_min = 0.0;
    for (std::size_t i = 0; i < finish.size(); ++i) {
        const double slack = trace.records[i].departure - finish[i];
        const bool queued = i > 0 && trace.records[i].arrival < finish[i - 1];
        if (!queued) {
            period_min = slack;
            continue;
        }
        check.backlogged = true;
        // Compare against the lowest slack seen so far in this backlog period,
        // so slow drifts cannot hide under the floor one packet at a time.
        const double growth = slack - period_min;
        check.worst_increase = std::max(check.worst_increase, growth);
        if (growth > jitter_floor && !check.violation) {
            check.violation = i;
        }
        period_min = std::min(period_min, slack);
    }
    return check;
}

namespace {

void require_search(const SearchConfig& s)
{
    if (!(s.jitter_floor >= 0.0) || !(s.resolution > 0.0 && s.resolution < 1.0) ||
        !(s.linear_step > 0.0 && s.linear_step < 1.0) || !(s.scan_step > 0.0 && s.scan_step < 1.0) ||
        !(s.min_rate_fraction > 0.0 && s.min_rate_fraction < 1.0)) {
        throw ConfigError("search configuration out of range");
    }
}

[[noreturn]] void fail_search(const MeasuredTrace& trace, double lowest, bool saw_backlog)
{
    std::ostringstream msg;
    msg << "no service rate down to " << lowest << " bit/s passes the slack test over " << trace.size()
        << " packets";
    if (!saw_backlog) {
        msg << "; the trace never queues at any tried rate";
    } else {
        msg << "; check for FIFO violations or clock skew between capture points";
    }
    throw EstimationFailed(msg.str());
}

} // namespace

EstimationResult estimate(const MeasuredTrace& trace, double nominal_rate, const SearchConfig& search)
{
    require_search(search);
    if (!(nominal_rate > 0.0)) {
        throw DomainError("nominal rate C must be > 0");
    }
    if (trace.size() < 2) {
        throw PreconditionError("estimation needs at least two packets");
    }
    validate_trace(trace);

    EstimationResult result;
    const double floor_rate = nominal_rate * search.min_rate_fraction;
    bool saw_backlog = false;
    auto accepted = [&](double rate) {
        ++result.iterations;
        const SlackCheck check = check_slack(trace, rate, search.jitter_floor);
        saw_backlog = saw_backlog || check.backlogged;
        return check.accepted();
    };

    const double step = search.linear ? search.linear_step : search.scan_step;
    double lo = nominal_rate;
    double hi = 0.0;  // lowest rejected rate so far, 0 while none
    while (!accepted(lo)) {
        hi = lo;
        lo *= step;
        if (lo < floor_rate) {
            fail_search(trace, hi, saw_backlog);
        }
    }
    if (hi == 0.0) {
        result.rate = nominal_rate;
        result.step = search.linear ? nominal_rate * (1.0 / step - 1.0) : nominal_rate * search.resolution;
    } else {
        if (!search.linear) {
            const double resolution = nominal_rate * search.resolution;
            while (hi - lo > resolution) {
                const double mid = 0.5 * (lo + hi);
                (accepted(mid) ? lo : hi) = mid;
            }
        }
        result.rate = lo;
        result.step = hi - lo;
    }

    result.slack_profile = slack_profile(trace, result.rate);
    std::vector<double> sorted = result.slack_profile;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    result.error = sorted.front();
    if (result.error < 0.0) {
        std::ostringstream msg;
        msg << "maximum slack " << result.error << " s is negative; error term clamped to 0";
        result.warnings.push_back(msg.str());
        result.error = 0.0;
    }
    if (sorted.size() > 1 && sorted[0] - sorted[1] > search.outlier_threshold) {
        std::ostringstream msg;
        msg << "error term set by a single packet: largest slack exceeds the next by " << sorted[0] - sorted[1]
            << " s";
        result.warnings.push_back(msg.str());
    }
    result.error_with_io = result.error;
    return result;
}

std::vector<int> IoDelayTable::length_classes() const
{
    std::set<int> lengths;
    for (const auto& e : entries) {
        lengths.insert(e.length_bytes);
    }
    return {lengths.begin(), lengths.end()};
}

double IoDelayTable::maximum_for(int length_bytes) const
{
    double best = -1.0;
    for (const auto& e : entries) {
        if (e.length_bytes == length_bytes) {
            best = std::max(best, e.delay);
        }
    }
    if (best < 0.0) {
        throw ConfigError("IO delay table has no row for " + std::to_string(length_bytes) + " B");
    }
    return best;
}

IoDelayTable default_io_delay_table()
{
    IoDelayTable table;
    const double loads[] = {0.2, 0.5, 0.8, 1.0};
    const double long_packets[] = {2.4, 2.4, 3.6, 3.6};
    for (int i = 0; i < 4; ++i) {
        table.entries.push_back({256, loads[i], units::us_to_s(2.4)});
        table.entries.push_back({512, loads[i], units::us_to_s(2.4)});
        table.entries.push_back({1500, loads[i], units::us_to_s(long_packets[i])});
    }
    return table;
}

double io_delay_lookup(const IoDelayTable& table, int length_bytes, double load)
{
    if (table.entries.empty()) {
        throw ConfigError("IO delay table is empty");
    }
    if (length_bytes <= 0) {
        throw DomainError("packet length must be positive");
    }
    if (!(load >= 0.0)) {
        throw DomainError("load must be >= 0");
    }
    int nearest = 0;
    int best_distance = -1;
    for (int cls : table.length_classes()) {
        const int distance = std::abs(cls - length_bytes);
        // Classes come in ascending order, so <= moves ties to the larger class.
        if (best_distance < 0 || distance <= best_distance) {
            nearest = cls;
            best_distance = distance;
        }
    }
    return table.maximum_for(nearest);
}

EstimationResult apply_io_correction(EstimationResult result, const IoDelayTable& table, int length_bytes)
{
    result.io_delay = io_delay_lookup(table, length_bytes, 0.0);
    result.error_with_io = result.error + result.io_delay;
    return result;
}

} // namespace ncdelay
