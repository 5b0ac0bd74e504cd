// trace_io.cpp - CSV and key = value readers/writers.

#include "ncdelay/trace_io.hpp"

#include "ncdelay/errors.hpp"
#include "ncdelay/units.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#ifndef NCDELAY_DATA_DIR
#define NCDELAY_DATA_DIR "data"
#endif

namespace ncdelay {

namespace {

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, sep)) {
        fields.push_back(trim(field));
    }
    if (!line.empty() && line.back() == sep) {
        fields.emplace_back();
    }
    return fields;
}

// Data rows of a CSV file with a fixed header; comments and blanks skipped.
class CsvReader {
public:
    CsvReader(std::istream& in, std::string source, const std::string& header)
        : in_(in), source_(std::move(source))
    {
        std::string line;
        while (next_line(line)) {
            if (line != header) {
                fail("expected header '" + header + "', got '" + line + "'");
            }
            columns_ = split(header, ',').size();
            return;
        }
        fail("missing header '" + header + "'");
    }

    bool next(std::vector<std::string>& fields)
    {
        std::string line;
        if (!next_line(line)) {
            return false;
        }
        fields = split(line, ',');
        if (fields.size() != columns_) {
            fail("expected " + std::to_string(columns_) + " fields, got " + std::to_string(fields.size()));
        }
        return true;
    }

    [[noreturn]] void fail(const std::string& message) const { throw ParseError(source_, line_, message); }

    std::int64_t integer(const std::string& field, const char* what) const
    {
        std::int64_t v = 0;
        const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
        if (ec != std::errc() || ptr != field.data() + field.size()) {
            fail(std::string(what) + " is not an integer: '" + field + "'");
        }
        return v;
    }

    double real(const std::string& field, const char* what, bool allow_empty = false) const
    {
        if (field.empty() && allow_empty) {
            return std::nan("");
        }
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
        if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v)) {
            fail(std::string(what) + " is not a number: '" + field + "'");
        }
        return v;
    }

private:
    bool next_line(std::string& line)
    {
        while (std::getline(in_, line)) {
            ++line_;
            if (!line.empty() && line.back() == '\r') {
                line.pop_back();
            }
            const std::string t = trim(line);
            if (t.empty() || t.front() == '#') {
                continue;
            }
            line = t;
            return true;
        }
        return false;
    }

    std::istream& in_;
    std::string source_;
    std::size_t line_ = 0;
    std::size_t columns_ = 0;
};

std::ifstream open_input(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string() + " for reading");
    }
    return in;
}

std::int64_t whole_bytes(double bits, std::int64_t id)
{
    const double bytes = units::bits_to_bytes(bits);
    if (bytes != std::floor(bytes) || bytes <= 0) {
        throw DomainError("packet " + std::to_string(id) + " is not a whole number of bytes");
    }
    return static_cast<std::int64_t>(bytes);
}

} // namespace

MeasuredTrace parse_trace(std::istream& in, const std::string& source)
{
    CsvReader csv(in, source, kTraceHeader);
    MeasuredTrace trace;
    std::vector<std::string> f;
    std::int64_t prev_arrival = 0, prev_departure = 0;
    while (csv.next(f)) {
        const std::int64_t id = csv.integer(f[0], "packet_id");
        const std::int64_t bytes = csv.integer(f[1], "length_bytes");
        const std::int64_t arrival = csv.integer(f[2], "arrival_ns");
        const std::int64_t departure = csv.integer(f[3], "departure_ns");
        if (bytes <= 0) {
            csv.fail("length_bytes must be positive");
        }
        if (departure <= arrival) {
            csv.fail("departure_ns must be after arrival_ns");
        }
        if (!trace.empty() && arrival < prev_arrival) {
            csv.fail("arrival_ns must be non-decreasing");
        }
        if (!trace.empty() && departure < prev_departure) {
            csv.fail("departure_ns must be non-decreasing (FIFO)");
        }
        trace.records.push_back({id, units::bytes_to_bits(static_cast<double>(bytes)), units::ns_to_s(arrival),
                                 units::ns_to_s(departure)});
        prev_arrival = arrival;
        prev_departure = departure;
    }
    return trace;
}

void format_trace(const MeasuredTrace& trace, std::ostream& out)
{
    out << kTraceHeader << '\n';
    for (const PacketRecord& r : trace.records) {
        out << r.id << ',' << whole_bytes(r.length_bits, r.id) << ',' << units::s_to_ns(r.arrival) << ','
            << units::s_to_ns(r.departure) << '\n';
    }
}

MeasuredTrace read_trace(const std::filesystem::path& path)
{
    auto in = open_input(path);
    return parse_trace(in, path.string());
}

void write_trace(const MeasuredTrace& trace, const std::filesystem::path& path)
{
    std::ostringstream out;
    format_trace(trace, out);
    write_file_atomic(path, out.str());
}

std::vector<Arrival> parse_arrivals(std::istream& in, const std::string& source)
{
    CsvReader csv(in, source, kArrivalsHeader);
    std::vector<Arrival> arrivals;
    std::vector<std::string> f;
    std::int64_t prev = 0;
    while (csv.next(f)) {
        const std::int64_t id = csv.integer(f[0], "packet_id");
        const std::int64_t bytes = csv.integer(f[1], "length_bytes");
        const std::int64_t t = csv.integer(f[2], "arrival_ns");
        if (bytes <= 0) {
            csv.fail("length_bytes must be positive");
        }
        if (!arrivals.empty() && t < prev) {
            csv.fail("arrival_ns must be non-decreasing");
        }
        arrivals.push_back({id, units::bytes_to_bits(static_cast<double>(bytes)), units::ns_to_s(t)});
        prev = t;
    }
    return arrivals;
}

void format_arrivals(const std::vector<Arrival>& arrivals, std::ostream& out)
{
    out << kArrivalsHeader << '\n';
    for (const Arrival& a : arrivals) {
        out << a.id << ',' << whole_bytes(a.length_bits, a.id) << ',' << units::s_to_ns(a.time) << '\n';
    }
}

std::vector<Arrival> read_arrivals(const std::filesystem::path& path)
{
    auto in = open_input(path);
    return parse_arrivals(in, path.string());
}

void write_arrivals(const std::vector<Arrival>& arrivals, const std::filesystem::path& path)
{
    std::ostringstream out;
    format_arrivals(arrivals, out);
    write_file_atomic(path, out.str());
}

IoDelayTable parse_io_table(std::istream& in, const std::string& source)
{
    CsvReader csv(in, source, kIoTableHeader);
    IoDelayTable table;
    std::vector<std::string> f;
    while (csv.next(f)) {
        const auto length = csv.integer(f[0], "length_bytes");
        const double load = csv.real(f[1], "load_fraction");
        const double delay_us = csv.real(f[2], "io_delay_us");
        if (length <= 0 || !(load > 0.0 && load <= 1.0) || !(delay_us > 0.0)) {
            csv.fail("need length_bytes > 0, load_fraction in (0, 1] and io_delay_us > 0");
        }
        table.entries.push_back({static_cast<int>(length), load, units::us_to_s(delay_us)});
    }
    return table;
}

IoDelayTable read_io_table(const std::filesystem::path& path)
{
    auto in = open_input(path);
    return parse_io_table(in, path.string());
}

// ---------------------------------------------------------------------------
// Config

Config Config::parse(std::istream& in, const std::string& source)
{
    Config cfg;
    cfg.source_ = source;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') {
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ParseError(source, number, "expected 'key = value'");
        }
        const std::string key = trim(std::string_view(t).substr(0, eq));
        const std::string value = trim(std::string_view(t).substr(eq + 1));
        const bool valid_key = !key.empty() && std::all_of(key.begin(), key.end(), [](char c) {
            return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
        });
        if (!valid_key) {
            throw ParseError(source, number, "invalid key '" + key + "' (use lower case, digits and '_')");
        }
        if (cfg.values_.count(key)) {
            throw ParseError(source, number, "duplicate key '" + key + "'");
        }
        cfg.values_[key] = value;
        cfg.lines_[key] = number;
    }
    return cfg;
}

Config Config::read(const std::filesystem::path& path)
{
    auto in = open_input(path);
    return parse(in, path.string());
}

namespace {

const std::vector<std::pair<const char*, double>> kTimeUnits = {{"_s", 1.0}, {"_us", 1e-6}, {"_ns", 1e-9}};
const std::vector<std::pair<const char*, double>> kSizeUnits = {{"_bits", 1.0}, {"_bytes", 8.0}};
const std::vector<std::pair<const char*, double>> kRateUnits = {{"_bps", 1.0}, {"_mbps", 1e6}, {"_gbps", 1e9}};

} // namespace

std::optional<std::pair<std::string, double>>
Config::find_unit(const std::string& base, const std::vector<std::pair<const char*, double>>& units) const
{
    std::optional<std::pair<std::string, double>> found;
    for (const auto& [suffix, scale] : units) {
        const std::string key = base + suffix;
        if (values_.count(key)) {
            if (found) {
                throw ConfigError(source_ + ": both " + found->first + " and " + key + " are set");
            }
            found = std::make_pair(key, scale);
        }
    }
    return found;
}

const std::string& Config::raw(const std::string& key) const
{
    const auto it = values_.find(key);
    if (it == values_.end()) {
        throw ConfigError(source_ + ": missing key '" + key + "'");
    }
    used_.insert(key);
    return it->second;
}

double Config::to_number(const std::string& key, const std::string& value) const
{
    if (value == "inf") {
        return kInfinity;
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size() || std::isnan(v)) {
        throw ConfigError(source_ + ":" + std::to_string(lines_.at(key)) + ": '" + key + "' is not a number: '" +
                          value + "'");
    }
    return v;
}

bool Config::has_time(const std::string& base) const { return find_unit(base, kTimeUnits).has_value(); }
bool Config::has_size(const std::string& base) const { return find_unit(base, kSizeUnits).has_value(); }
bool Config::has_rate(const std::string& base) const { return find_unit(base, kRateUnits).has_value(); }
bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

double Config::time(const std::string& base) const
{
    const auto unit = find_unit(base, kTimeUnits);
    if (!unit) {
        throw ConfigError(source_ + ": missing " + base + "_s (or _us, _ns)");
    }
    const double v = to_number(unit->first, raw(unit->first)) * unit->second;
    if (!std::isfinite(v)) {
        throw ConfigError(source_ + ": " + unit->first + " must be finite");
    }
    return v;
}

double Config::size(const std::string& base) const
{
    const auto unit = find_unit(base, kSizeUnits);
    if (!unit) {
        throw ConfigError(source_ + ": missing " + base + "_bytes (or _bits)");
    }
    return to_number(unit->first, raw(unit->first)) * unit->second;
}

double Config::rate(const std::string& base) const
{
    const auto unit = find_unit(base, kRateUnits);
    if (!unit) {
        throw ConfigError(source_ + ": missing " + base + "_bps (or _mbps, _gbps)");
    }
    return to_number(unit->first, raw(unit->first)) * unit->second;
}

double Config::number(const std::string& key) const { return to_number(key, raw(key)); }

long long Config::integer(const std::string& key) const
{
    const std::string& value = raw(key);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw ConfigError(source_ + ":" + std::to_string(lines_.at(key)) + ": '" + key + "' is not an integer: '" +
                          value + "'");
    }
    return v;
}

std::string Config::text(const std::string& key) const { return raw(key); }

std::vector<double> Config::numbers(const std::string& key) const
{
    const std::string& value = raw(key);
    std::vector<double> out;
    if (value.empty()) {
        return out;
    }
    for (const std::string& item : split(value, ',')) {
        out.push_back(to_number(key, item));
    }
    return out;
}

double Config::time_or(const std::string& base, double fallback) const
{
    return has_time(base) ? time(base) : fallback;
}

double Config::rate_or(const std::string& base, double fallback) const
{
    return has_rate(base) ? rate(base) : fallback;
}

double Config::number_or(const std::string& key, double fallback) const
{
    return has(key) ? number(key) : fallback;
}

long long Config::integer_or(const std::string& key, long long fallback) const
{
    return has(key) ? integer(key) : fallback;
}

std::string Config::text_or(const std::string& key, const std::string& fallback) const
{
    return has(key) ? text(key) : fallback;
}

void Config::reject_unused() const
{
    std::string unknown;
    for (const auto& [key, value] : values_) {
        if (!used_.count(key)) {
            unknown += (unknown.empty() ? "" : ", ") + key;
        }
    }
    if (!unknown.empty()) {
        throw ConfigError(source_ + ": unknown keys: " + unknown);
    }
}

std::map<std::string, std::string> Config::used_values() const
{
    std::map<std::string, std::string> out;
    for (const auto& key : used_) {
        out[key] = values_.at(key);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Reference data

double ReferenceDataset::max_delay(int length_bytes, double load, int burst_packets) const
{
    for (const auto& row : max_delays) {
        if (row.length_bytes == length_bytes && std::abs(row.load - load) < 1e-9 && row.burst_packets == burst_packets) {
            return row.max_delay;
        }
    }
    std::ostringstream msg;
    msg << "no reference max delay for " << length_bytes << " B, load " << load << ", burst " << burst_packets;
    throw DomainError(msg.str());
}

const ServiceEstimateRow& ReferenceDataset::service_estimate(int length_bytes) const
{
    for (const auto& row : service_estimates) {
        if (row.length_bytes == length_bytes) {
            return row;
        }
    }
    throw DomainError("no reference service estimate for " + std::to_string(length_bytes) + " B");
}

const AnchorPoint& ReferenceDataset::anchor(const std::string& name) const
{
    for (const auto& a : anchors) {
        if (a.name == name) {
            return a;
        }
    }
    throw DomainError("no reference anchor named '" + name + "'");
}

std::filesystem::path default_data_dir()
{
    return NCDELAY_DATA_DIR;
}

ReferenceDataset load_reference(const std::filesystem::path& dir)
{
    std::map<std::string, std::string> expected;
    {
        const std::string sums = read_file(dir / "SHA256SUMS");
        std::istringstream in(sums);
        std::string line;
        while (std::getline(in, line)) {
            std::istringstream fields(line);
            std::string digest, name;
            if (fields >> digest >> name) {
                expected[name] = digest;
            }
        }
    }
    auto load = [&](const std::string& name) {
        const std::string content = read_file(dir / name);
        const auto it = expected.find(name);
        if (it == expected.end()) {
            throw IoError((dir / name).string() + ": not listed in SHA256SUMS");
        }
        if (sha256_hex(content) != it->second) {
            throw IoError((dir / name).string() + ": checksum mismatch, reference data is corrupt");
        }
        return content;
    };

    ReferenceDataset data;
    {
        std::istringstream in(load("table1.csv"));
        data.io_delays = parse_io_table(in, (dir / "table1.csv").string());
    }
    {
        std::istringstream in(load("table2.csv"));
        CsvReader csv(in, (dir / "table2.csv").string(), "length_bytes,rate_mbps,error_us");
        std::vector<std::string> f;
        while (csv.next(f)) {
            data.service_estimates.push_back({static_cast<int>(csv.integer(f[0], "length_bytes")),
                                              csv.real(f[1], "rate_mbps") * 1e6,
                                              units::us_to_s(csv.real(f[2], "error_us"))});
        }
    }
    {
        std::istringstream in(load("table3.csv"));
        CsvReader csv(in, (dir / "table3.csv").string(),
                      "length_bytes,load_fraction,burst_packets,max_delay_us,variance");
        std::vector<std::string> f;
        while (csv.next(f)) {
            data.max_delays.push_back({static_cast<int>(csv.integer(f[0], "length_bytes")),
                                       csv.real(f[1], "load_fraction"),
                                       static_cast<int>(csv.integer(f[2], "burst_packets")),
                                       units::us_to_s(csv.real(f[3], "max_delay_us")), csv.real(f[4], "variance")});
        }
    }
    {
        std::istringstream in(load("anchors.csv"));
        CsvReader csv(in, (dir / "anchors.csv").string(), "name,length_bytes,load_fraction,burst_packets,value_us");
        std::vector<std::string> f;
        while (csv.next(f)) {
            AnchorPoint a{f[0], static_cast<int>(csv.integer(f[1], "length_bytes")), std::nullopt, std::nullopt,
                          units::us_to_s(csv.real(f[4], "value_us"))};
            if (!f[2].empty()) {
                a.load = csv.real(f[2], "load_fraction");
            }
            if (!f[3].empty()) {
                a.burst_packets = static_cast<int>(csv.integer(f[3], "burst_packets"));
            }
            data.anchors.push_back(std::move(a));
        }
    }
    return data;
}

ReferenceDataset load_reference()
{
    return load_reference(default_data_dir() / "reference");
}

std::string sha256_hex(const std::string& content)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(content.data(), content.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw IoError("SHA-256 computation failed");
    }
    std::ostringstream hex;
    for (unsigned int i = 0; i < length; ++i) {
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    }
    return hex.str();
}

std::string read_file(const std::filesystem::path& path)
{
    auto in = open_input(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        throw IoError("error reading " + path.string());
    }
    return buf.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content)
{
    namespace fs = std::filesystem;
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot open " + tmp.string() + " for writing");
        }
        out << content;
        out.flush();
        if (!out) {
            throw IoError("error writing " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot move " + tmp.string() + " to " + path.string());
    }
}

} // namespace ncdelay
