// trace_io.hpp - File formats: traces, arrivals, configs, IO-delay tables and
// the reference measurement data.
//
// All CSV files are UTF-8 with LF endings; lines starting with '#' and blank
// lines are skipped. Times are stored as integer nanoseconds and lengths as
// bytes; readers convert to seconds and bits.

#ifndef NCDELAY_TRACE_IO_HPP
#define NCDELAY_TRACE_IO_HPP

#include "ncdelay/estimator.hpp"
#include "ncdelay/simulator.hpp"
#include "ncdelay/trace.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace ncdelay {

inline constexpr const char* kTraceHeader = "packet_id,length_bytes,arrival_ns,departure_ns";
inline constexpr const char* kArrivalsHeader = "packet_id,length_bytes,arrival_ns";
inline constexpr const char* kIoTableHeader = "length_bytes,load_fraction,io_delay_us";

MeasuredTrace parse_trace(std::istream& in, const std::string& source);
void format_trace(const MeasuredTrace& trace, std::ostream& out);
MeasuredTrace read_trace(const std::filesystem::path& path);
void write_trace(const MeasuredTrace& trace, const std::filesystem::path& path);

std::vector<Arrival> parse_arrivals(std::istream& in, const std::string& source);
void format_arrivals(const std::vector<Arrival>& arrivals, std::ostream& out);
std::vector<Arrival> read_arrivals(const std::filesystem::path& path);
void write_arrivals(const std::vector<Arrival>& arrivals, const std::filesystem::path& path);

IoDelayTable parse_io_table(std::istream& in, const std::string& source);
IoDelayTable read_io_table(const std::filesystem::path& path);

// `key = value` settings. Physical quantities carry their unit in the key:
// _s, _us, _ns for times, _bits, _bytes for sizes, _bps, _mbps, _gbps for
// rates. Accessors take the key without the suffix and convert to seconds,
// bits or bits/second.
class Config {
public:
    static Config parse(std::istream& in, const std::string& source);
    static Config read(const std::filesystem::path& path);

    bool has_time(const std::string& base) const;
    bool has_size(const std::string& base) const;
    bool has_rate(const std::string& base) const;
    bool has(const std::string& key) const;

    double time(const std::string& base) const;
    double size(const std::string& base) const;
    double rate(const std::string& base) const;  // "inf" allowed
    double number(const std::string& key) const;
    long long integer(const std::string& key) const;
    std::string text(const std::string& key) const;
    std::vector<double> numbers(const std::string& key) const;  // comma separated, may be empty

    double time_or(const std::string& base, double fallback) const;
    double rate_or(const std::string& base, double fallback) const;
    double number_or(const std::string& key, double fallback) const;
    long long integer_or(const std::string& key, long long fallback) const;
    std::string text_or(const std::string& key, const std::string& fallback) const;

    // Throws ConfigError listing keys no accessor asked for (usually typos).
    void reject_unused() const;

    const std::map<std::string, std::string>& values() const { return values_; }
    // Every key read so far, with the value as written.
    std::map<std::string, std::string> used_values() const;

private:
    std::optional<std::pair<std::string, double>> find_unit(const std::string& base,
                                                            const std::vector<std::pair<const char*, double>>& units) const;
    const std::string& raw(const std::string& key) const;
    double to_number(const std::string& key, const std::string& value) const;

    std::string source_;
    std::map<std::string, std::string> values_;
    std::map<std::string, std::size_t> lines_;
    mutable std::set<std::string> used_;
};

struct ServiceEstimateRow {
    int length_bytes;
    double rate;   // bits/s
    double error;  // seconds, IO delay included
};

struct MaxDelayRow {
    int length_bytes;
    double load;
    int burst_packets;
    double max_delay;  // seconds
    double variance;   // as published, unit unstated
};

struct AnchorPoint {
    std::string name;
    int length_bytes;
    std::optional<double> load;
    std::optional<int> burst_packets;
    double value;  // seconds
};

struct ReferenceDataset {
    IoDelayTable io_delays;
    std::vector<ServiceEstimateRow> service_estimates;
    std::vector<MaxDelayRow> max_delays;
    std::vector<AnchorPoint> anchors;

    double max_delay(int length_bytes, double load, int burst_packets) const;
    const ServiceEstimateRow& service_estimate(int length_bytes) const;
    const AnchorPoint& anchor(const std::string& name) const;
};

std::filesystem::path default_data_dir();
// Loads table1.csv, table2.csv, table3.csv and anchors.csv from `dir` after
// checking each against SHA256SUMS.
ReferenceDataset load_reference(const std::filesystem::path& dir);
ReferenceDataset load_reference();

std::string sha256_hex(const std::string& content);
std::string read_file(const std::filesystem::path& path);
// Writes through a temporary file in the same directory and renames it.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

} // namespace ncdelay

#endif
