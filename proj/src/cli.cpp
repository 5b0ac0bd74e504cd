// cli.cpp - Subcommands gen, sim, estimate, bound, compare and curve.

#include "ncdelay/cli.hpp"

#include "ncdelay/curve.hpp"
#include "ncdelay/errors.hpp"
#include "ncdelay/estimator.hpp"
#include "ncdelay/models.hpp"
#include "ncdelay/simulator.hpp"
#include "ncdelay/trace_io.hpp"
#include "ncdelay/units.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <functional>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#ifndef NCDELAY_VERSION
#define NCDELAY_VERSION "unknown"
#endif

namespace ncdelay {

namespace {

using Json = nlohmann::ordered_json;

std::string num(double v)
{
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    std::ostringstream s;
    s << std::setprecision(15) << v;
    return s.str();
}

std::string num(const std::optional<double>& v, double scale = 1.0)
{
    return v ? num(*v * scale) : std::string();
}

// Keys any subcommand understands. Keys for other subcommands are tolerated so
// one file can describe a whole pipeline; anything else is a typo.
const std::set<std::string> kKnownBases = {
    "packet", "burst", "burst_packets", "load", "nominal_rate", "source_rate", "source", "packets",
    "rate", "peak_rate", "service_rate", "error", "processing", "ingress_rate", "jitter",
    "lengths_bytes", "loads", "bursts", "service",
};
const char* const kSuffixes[] = {"_s", "_us", "_ns", "_bits", "_bytes", "_bps", "_mbps", "_gbps"};

void check_keys(const Config& cfg, const std::string& path)
{
    for (const auto& [key, value] : cfg.values()) {
        bool known = kKnownBases.count(key) > 0;
        for (const char* suffix : kSuffixes) {
            const std::string s(suffix);
            if (!known && key.size() > s.size() && key.compare(key.size() - s.size(), s.size(), s) == 0) {
                known = kKnownBases.count(key.substr(0, key.size() - s.size())) > 0;
            }
        }
        if (!known) {
            throw ConfigError(path + ": unknown key '" + key + "'");
        }
    }
}

Config load_config(const std::string& path)
{
    Config cfg = Config::read(path);
    check_keys(cfg, path);
    return cfg;
}

// Book-keeping for the manifest written next to every output file.
struct Run {
    Run(std::string name, std::uint64_t seed_value) : subcommand(std::move(name)), seed(seed_value) {}

    std::string subcommand;
    std::uint64_t seed;
    Json config = Json::object();
    Json options = Json::object();
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;

    void add_config(const std::string& path, const Config& cfg, const std::string& key = {})
    {
        const std::string name = key.empty() ? path : key;
        Json j = Json::object();
        for (const auto& [k, v] : cfg.used_values()) {
            j[k] = v;
        }
        config[name] = j;
        inputs.push_back(path);
    }
};

bool to_stdout(const std::string& path)
{
    return path.empty() || path == "-";
}

void emit(Run& run, const std::string& path, const std::string& content, std::ostream& out)
{
    if (to_stdout(path)) {
        out << content;
        return;
    }
    write_file_atomic(path, content);
    run.outputs.push_back(path);
}

void write_manifest(const Run& run, const std::string& out_path)
{
    if (to_stdout(out_path)) {
        return;
    }
    Json j;
    j["tool"] = "ncdelay";
    j["version"] = NCDELAY_VERSION;
    j["subcommand"] = run.subcommand;
    j["seed"] = run.seed;
    j["options"] = run.options;
    j["config"] = run.config;
    // Files are hashed as they are on disk once the run has finished.
    auto digests = [](const std::vector<std::string>& paths) {
        Json list = Json::array();
        for (const auto& path : paths) {
            list.push_back({{"path", path}, {"sha256", sha256_hex(read_file(path))}});
        }
        return list;
    };
    j["inputs"] = digests(run.inputs);
    j["outputs"] = digests(run.outputs);
    write_file_atomic(out_path + ".manifest.json", j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Shared config readers

struct SourceSetup {
    RealSourceFlow flow;
    SourceConfig source;
};

SourceSetup read_source(const Config& cfg)
{
    const double l = cfg.size("packet");
    const long long n = cfg.integer("burst_packets");
    if (n < 1 || n > 1000000) {
        throw ConfigError("burst_packets must lie in [1, 1000000]");
    }
    const double load = cfg.number("load");
    const double C = cfg.rate_or("nominal_rate", 1e9);
    const double rp = cfg.rate_or("source_rate", 0.96e9);
    SourceSetup source_setup{real_source_from_load(l, static_cast<int>(n), load, C, rp), {}};
    source_setup.source.kind = source_kind_from_string(cfg.text_or("source", "real_source"));
    source_setup.source.total_packets = cfg.integer("packets");
    return source_setup;
}

ServerConfig read_server(const Config& cfg, std::uint64_t seed)
{
    ServerConfig s;
    s.rate = cfg.rate("service_rate");
    s.processing = cfg.time_or("processing", 0.0);
    s.ingress_rate = cfg.rate_or("ingress_rate", kInfinity);
    s.jitter = cfg.time_or("jitter", 0.0);
    s.seed = seed;
    return s;
}

// Parametric flow for the bound and curve commands: l, b, r, p.
struct FlowSetup {
    double l, b, r, p, C;
    std::optional<RateLatencyServer> server;

    TokenBucketFlow token_bucket() const { return {r, b}; }
    FourTupleFlow four_tuple() const { return {p, l, r, b}; }
    PeriodicStaircaseFlow staircase() const { return {b / r, b, p, l}; }
    RealSourceFlow real_source() const
    {
        const double n = b / l;
        if (std::abs(n - std::round(n)) > 1e-9 * n || n < 1.0) {
            throw PreconditionError("model C needs the burst to be a whole number of packets (b / l = " + num(n) + ")");
        }
        RealSourceFlow f{};
        f.packet_bits = l;
        f.burst_packets = static_cast<int>(std::round(n));
        f.spacing = std::isfinite(p) ? l / p : 0.0;
        f.period = b / r;
        f.gap = f.period - (f.burst_packets - 1) * f.spacing;
        f.source_rate = p;
        f.load = r / C;
        f.nominal_rate = C;
        if (!(f.gap > 0.0)) {
            throw InfeasibleSource("burst of " + num(n) + " packets spaced l/p does not fit the period b/r");
        }
        return f;
    }
};

FlowSetup read_flow(const Config& cfg)
{
    FlowSetup f{};
    f.l = cfg.size("packet");
    f.b = cfg.has("burst_packets") ? static_cast<double>(cfg.integer("burst_packets")) * f.l : cfg.size("burst");
    f.C = cfg.rate_or("nominal_rate", 1e9);
    f.r = cfg.has_rate("rate") ? cfg.rate("rate") : cfg.number("load") * f.C;
    f.p = cfg.rate_or("peak_rate", kInfinity);
    if (!(f.l > 0.0) || !(f.b > 0.0) || !(f.r > 0.0) || !(f.p > 0.0)) {
        throw ConfigError("packet, burst, rate and peak_rate must be positive");
    }
    if (cfg.has_rate("service_rate")) {
        f.server = RateLatencyServer{cfg.rate("service_rate"), cfg.time_or("error", 0.0), f.C};
    }
    return f;
}

// ---------------------------------------------------------------------------
// Subcommands

struct Common {
    std::string out;
    std::uint64_t seed = 1;
    std::string io_table;
};

int cmd_gen(const std::string& config_path, const Common& common, std::ostream& out)
{
    Run run{"gen", common.seed};
    const Config cfg = load_config(config_path);
    const SourceSetup source_setup = read_source(cfg);
    run.add_config(config_path, cfg);
    std::ostringstream csv;
    format_arrivals(generate_arrivals(source_setup.source, source_setup.flow), csv);
    emit(run, common.out, csv.str(), out);
    write_manifest(run, common.out);
    return kExitOk;
}

struct SimOptions {
    std::string server_config;
    std::string arrivals;
    std::string source_config;
    std::string report;
    std::string parts;
    std::string backlog;
};

int cmd_sim(const SimOptions& o, const Common& common, std::ostream& out)
{
    Run run{"sim", common.seed};
    const Config server_cfg = load_config(o.server_config);
    const ServerConfig server = read_server(server_cfg, common.seed);
    run.add_config(o.server_config, server_cfg);

    std::vector<Arrival> arrivals;
    if (!o.arrivals.empty()) {
        arrivals = read_arrivals(o.arrivals);
        run.inputs.push_back(o.arrivals);
    } else {
        const Config source_cfg = load_config(o.source_config);
        const SourceSetup source_setup = read_source(source_cfg);
        run.add_config(o.source_config, source_cfg, o.source_config + "#source");
        arrivals = generate_arrivals(source_setup.source, source_setup.flow);
    }
    const SimulationReport report = simulate(arrivals, server);

    std::ostringstream trace;
    format_trace(report.trace, trace);
    emit(run, common.out, trace.str(), out);

    std::string report_path = o.report;
    if (report_path.empty() && !to_stdout(common.out)) {
        report_path = common.out + ".report.txt";
    }
    if (!report_path.empty()) {
        double sum = 0.0, peak_backlog = 0.0;
        for (double d : report.delays) {
            sum += d;
        }
        for (const auto& b : report.backlog) {
            peak_backlog = std::max(peak_backlog, b.bits);
        }
        std::ostringstream text;
        text << "# ncdelay sim report\n"
             << "packets = " << report.delays.size() << '\n'
             << "max_delay_us = " << num(units::s_to_us(report.max_delay)) << '\n'
             << "mean_delay_us = " << num(report.delays.empty() ? 0.0 : units::s_to_us(sum / report.delays.size()))
             << '\n'
             << "max_backlog_bits = " << num(peak_backlog) << '\n';
        emit(run, report_path, text.str(), out);
    }
    if (!o.parts.empty()) {
        std::ostringstream csv;
        csv << "packet_id,queue_ns,processing_ns,transmission_ns,delay_ns\n";
        for (std::size_t i = 0; i < report.parts.size(); ++i) {
            const DelayParts& p = report.parts[i];
            csv << report.trace.records[i].id << ',' << num(p.queue * 1e9) << ',' << num(p.processing * 1e9) << ','
                << num(p.transmission * 1e9) << ',' << num(report.delays[i] * 1e9) << '\n';
        }
        emit(run, o.parts, csv.str(), out);
    }
    if (!o.backlog.empty()) {
        std::ostringstream csv;
        csv << "time_ns,backlog_bits\n";
        for (const auto& b : report.backlog) {
            csv << num(b.time * 1e9) << ',' << num(b.bits) << '\n';
        }
        emit(run, o.backlog, csv.str(), out);
    }
    write_manifest(run, common.out);
    return kExitOk;
}

struct EstimateOptions {
    std::string trace;
    double nominal_rate = 1e9;
    int length_bytes = 0;
    double jitter_floor_ns = 50.0;
    double resolution = 1e-4;
    bool linear = false;
    bool no_io = false;
};

int most_common_length(const MeasuredTrace& trace)
{
    std::map<long long, std::size_t> counts;
    for (const auto& r : trace.records) {
        ++counts[std::llround(units::bits_to_bytes(r.length_bits))];
    }
    long long best = 0;
    std::size_t best_count = 0;
    for (const auto& [len, count] : counts) {
        if (count > best_count) {
            best = len;
            best_count = count;
        }
    }
    return static_cast<int>(best);
}

int cmd_estimate(const EstimateOptions& o, const Common& common, std::ostream& out)
{
    Run run{"estimate", common.seed};
    const MeasuredTrace trace = read_trace(o.trace);
    run.inputs.push_back(o.trace);

    SearchConfig search;
    search.jitter_floor = o.jitter_floor_ns * 1e-9;
    search.resolution = o.resolution;
    search.linear = o.linear;
    EstimationResult result = estimate(trace, o.nominal_rate, search);

    const int length = o.length_bytes > 0 ? o.length_bytes : most_common_length(trace);
    if (!o.no_io) {
        const std::string table_path =
            common.io_table.empty() ? (default_data_dir() / "io_delay_table1.csv").string() : common.io_table;
        result = apply_io_correction(result, read_io_table(table_path), length);
        run.inputs.push_back(table_path);
    }
    run.options = {{"nominal_rate_bps", o.nominal_rate},
                   {"length_bytes", length},
                   {"jitter_floor_ns", o.jitter_floor_ns},
                   {"resolution", o.resolution},
                   {"linear", o.linear},
                   {"io_correction", !o.no_io}};

    std::ostringstream text;
    text << "# ncdelay estimate report\n"
         << "packets = " << trace.size() << '\n'
         << "nominal_rate_bps = " << num(o.nominal_rate) << '\n'
         << "service_rate_bps = " << num(result.rate) << '\n'
         << "error_measured_us = " << num(units::s_to_us(result.error)) << '\n'
         << "io_delay_us = " << num(units::s_to_us(result.io_delay)) << '\n'
         << "error_us = " << num(units::s_to_us(result.error_with_io)) << '\n'
         << "length_bytes = " << length << '\n'
         << "step_bps = " << num(result.step) << '\n'
         << "iterations = " << result.iterations << '\n';
    for (std::size_t i = 0; i < result.warnings.size(); ++i) {
        text << "warning_" << i + 1 << " = " << result.warnings[i] << '\n';
    }
    emit(run, common.out, text.str(), out);

    if (!to_stdout(common.out)) {
        std::ostringstream csv;
        csv << "packet_id,slack_ns\n";
        for (std::size_t i = 0; i < trace.size(); ++i) {
            csv << trace.records[i].id << ',' << num(result.slack_profile[i] * 1e9) << '\n';
        }
        emit(run, common.out + ".slack.csv", csv.str(), out);
    }
    write_manifest(run, common.out);
    return kExitOk;
}

std::vector<std::pair<std::string, std::function<DelayBound()>>> bound_jobs(const FlowSetup& f, const std::string& model)
{
    if (!f.server && model != "ideal") {
        throw ConfigError("bound needs service_rate and error keys");
    }
    const RateLatencyServer server = f.server.value_or(RateLatencyServer{f.C, 0.0, f.C});
    std::vector<std::pair<std::string, std::function<DelayBound()>>> jobs = {
        {"ideal", [f] { return ideal_delay(f.l, f.C); }},
        {"tb", [f, server] { return token_bucket_bound(f.token_bucket(), server); }},
        {"a", [f, server] { return model_a_bound(f.four_tuple(), server); }},
        {"b", [f, server] { return model_b_bound(f.staircase(), server); }},
        {"c", [f, server] { return model_c_bound(f.real_source(), server); }},
    };
    if (model == "all") {
        return jobs;
    }
    for (auto& job : jobs) {
        if (job.first == model) {
            return {job};
        }
    }
    throw ConfigError("unknown model '" + model + "'");
}

double term(const DelayBound& b, const char* name)
{
    for (const auto& t : b.components) {
        if (t.name == name) {
            return t.value;
        }
    }
    return 0.0;
}

int cmd_bound(const std::string& config_path, const std::string& model, const Common& common, std::ostream& out)
{
    Run run{"bound", common.seed};
    const Config cfg = load_config(config_path);
    const FlowSetup flow = read_flow(cfg);
    run.add_config(config_path, cfg);
    run.options = {{"model", model}};

    const auto jobs = bound_jobs(flow, model);
    std::ostringstream csv;
    csv << "model,value_us,base_us,error_us,reduction_us,status\n";
    for (const auto& [name, job] : jobs) {
        try {
            const DelayBound b = job();
            csv << name << ',' << num(units::s_to_us(b.value)) << ',' << num(units::s_to_us(term(b, "base"))) << ','
                << num(units::s_to_us(term(b, "error"))) << ',' << num(units::s_to_us(term(b, "reduction"))) << ",ok\n";
        } catch (const Error& e) {
            if (jobs.size() == 1) {
                throw;
            }
            csv << name << ",,,,," << to_string(e.category()) << '\n';
        }
    }
    emit(run, common.out, csv.str(), out);
    write_manifest(run, common.out);
    return kExitOk;
}

int cmd_compare(const std::string& config_path, const Common& common, std::ostream& out, std::ostream& err)
{
    Run run{"compare", common.seed};
    const Config cfg = load_config(config_path);
    SweepSetup setup;
    setup.source = source_kind_from_string(cfg.text_or("source", "real_source"));
    setup.packets = cfg.integer_or("packets", 2000);
    setup.nominal_rate = cfg.rate_or("nominal_rate", 1e9);
    setup.source_rate = cfg.rate_or("source_rate", 0.96e9);
    const std::string service = cfg.text_or("service", "config");
    if (service != "config" && service != "reference") {
        throw ConfigError("service must be 'config' or 'reference'");
    }
    std::optional<ReferenceDataset> reference;
    if (service == "reference") {
        reference = load_reference();
        setup.server.rate = 0.0;
        setup.server.processing = 0.0;
    } else {
        setup.server.rate = cfg.rate("service_rate");
        setup.server.processing = cfg.time_or("processing", 0.0);
    }
    setup.server.ingress_rate = cfg.rate_or("ingress_rate", kInfinity);
    setup.server.jitter = cfg.time_or("jitter", 0.0);
    setup.server.seed = common.seed;

    std::vector<SweepPoint> grid;
    const auto lengths = cfg.numbers("lengths_bytes");
    const auto loads = cfg.numbers("loads");
    const auto bursts = cfg.numbers("bursts");
    for (double len : lengths) {
        for (double load : loads) {
            for (double n : bursts) {
                if (len != std::floor(len) || n != std::floor(n) || len <= 0 || n <= 0) {
                    throw ConfigError("lengths_bytes and bursts must be positive integers");
                }
                grid.push_back({static_cast<int>(len), load, static_cast<int>(n)});
            }
        }
    }
    run.add_config(config_path, cfg);

    std::ostringstream csv;
    csv << "length_bytes,load_fraction,burst_packets,source,service_rate_bps,processing_us,"
        << "max_delay_us,bound_ideal_us,bound_a_us,bound_b_us,bound_c_us\n";
    for (const SweepPoint& point : grid) {
        SweepSetup s = setup;
        if (reference) {
            const auto& row = reference->service_estimate(point.length_bytes);
            s.server.rate = row.rate;
            s.server.processing = row.error;
        }
        const SweepRow row = max_delay_sweep({point}, s).front();
        for (const auto& note : row.notes) {
            err << "note: " << point.length_bytes << " B, load " << num(point.load) << ", n " << point.burst_packets
                << ": " << note << '\n';
        }
        csv << point.length_bytes << ',' << num(point.load) << ',' << point.burst_packets << ','
            << to_string(s.source) << ',' << num(s.server.rate) << ',' << num(units::s_to_us(s.server.processing))
            << ',' << num(row.max_delay, 1e6) << ',' << num(row.bound_ideal, 1e6) << ',' << num(row.bound_a, 1e6)
            << ',' << num(row.bound_b, 1e6) << ',' << num(row.bound_c, 1e6) << '\n';
    }
    emit(run, common.out, csv.str(), out);
    write_manifest(run, common.out);
    return kExitOk;
}

struct CurveOptions {
    std::string config;
    std::string model = "a";
    double horizon_us = 0.0;
    int samples = 0;
};

int cmd_curve(const CurveOptions& o, const Common& common, std::ostream& out)
{
    Run run{"curve", common.seed};
    const Config cfg = load_config(o.config);
    const FlowSetup flow = read_flow(cfg);
    run.add_config(o.config, cfg);
    run.options = {{"model", o.model}, {"horizon_us", o.horizon_us}, {"samples", o.samples}};

    const Curve curve = [&] {
        if (o.model == "tb") {
            return curve_of(flow.token_bucket());
        }
        if (o.model == "a") {
            return curve_of(flow.four_tuple());
        }
        if (o.model == "b") {
            return curve_of(flow.staircase());
        }
        if (o.model == "c") {
            return curve_of(flow.real_source());
        }
        if (o.model == "service") {
            if (!flow.server) {
                throw ConfigError("service curve needs service_rate and error keys");
            }
            return service_curve(*flow.server);
        }
        throw ConfigError("unknown curve '" + o.model + "' (tb, a, b, c, service)");
    }();

    std::ostringstream csv;
    if (o.samples > 0) {
        if (!(o.horizon_us > 0.0)) {
            throw ConfigError("--samples needs --horizon-us > 0");
        }
        csv << "t_seconds,value_bits\n" << std::setprecision(17);
        const double horizon = units::us_to_s(o.horizon_us);
        for (int i = 0; i <= o.samples; ++i) {
            const double t = horizon * i / o.samples;
            csv << t << ',' << curve.eval(t) << '\n';
        }
    } else {
        export_csv(curve, csv);
    }
    emit(run, common.out, csv.str(), out);
    write_manifest(run, common.out);
    return kExitOk;
}

int exit_code(ErrorCategory category)
{
    switch (category) {
    case ErrorCategory::parse:
    case ErrorCategory::config: return kExitUsage;
    case ErrorCategory::io: return kExitIo;
    default: return kExitMath;
    }
}

std::string one_line(std::string s)
{
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Delay bounds, service-curve estimation and FIFO simulation for a single network node", "ncdelay"};
    app.set_version_flag("--version", NCDELAY_VERSION);
    app.require_subcommand(1);

    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", common.out, "Output file (stdout when omitted or '-')");
        sub->add_option("--seed", common.seed, "Seed for randomized parts (jitter)");
    };

    std::string config;
    auto* gen = app.add_subcommand("gen", "Generate source arrivals");
    gen->add_option("--config", config, "Source config (key = value)")->required();
    add_common(gen);

    SimOptions sim_opts;
    auto* sim = app.add_subcommand("sim", "Simulate the FIFO server and write a trace");
    sim->add_option("--server", sim_opts.server_config, "Server config")->required();
    auto* arrivals_opt = sim->add_option("--arrivals", sim_opts.arrivals, "Arrivals CSV from 'gen'");
    auto* source_opt = sim->add_option("--source", sim_opts.source_config, "Source config (instead of --arrivals)");
    arrivals_opt->excludes(source_opt);
    sim->add_option("--report", sim_opts.report, "Summary file (default <out>.report.txt)");
    sim->add_option("--parts", sim_opts.parts, "Per-packet delay decomposition CSV");
    sim->add_option("--backlog", sim_opts.backlog, "Backlog samples CSV");
    add_common(sim);

    EstimateOptions est_opts;
    auto* est = app.add_subcommand("estimate", "Estimate the service curve (R, e) from a trace");
    est->add_option("--trace", est_opts.trace, "Trace CSV")->required();
    est->add_option("--nominal-rate", est_opts.nominal_rate, "Nominal rate C in bit/s")->capture_default_str();
    est->add_option("--length-bytes", est_opts.length_bytes, "Packet length class for the IO correction");
    est->add_option("--jitter-floor-ns", est_opts.jitter_floor_ns, "Tolerated slack increase")->capture_default_str();
    est->add_option("--resolution", est_opts.resolution, "Search resolution as a fraction of C")->capture_default_str();
    est->add_flag("--linear", est_opts.linear, "Decrease R in 0.1% steps instead of bisecting");
    est->add_flag("--no-io", est_opts.no_io, "Skip the IO-delay correction");
    est->add_option("--io-table", common.io_table, "IO-delay table CSV");
    add_common(est);

    std::string model = "all";
    auto* bound = app.add_subcommand("bound", "Closed-form delay bounds for a flow and server");
    bound->add_option("--config", config, "Flow and server config")->required();
    bound->add_option("--model", model, "ideal, tb, a, b, c or all")
        ->check(CLI::IsMember({"ideal", "tb", "a", "b", "c", "all"}))
        ->capture_default_str();
    add_common(bound);

    auto* compare = app.add_subcommand("compare", "Simulated maximum delay against every bound over a grid");
    compare->add_option("--config", config, "Sweep config")->required();
    add_common(compare);

    CurveOptions curve_opts;
    auto* curve = app.add_subcommand("curve", "Export an arrival or service curve");
    curve->add_option("--config", curve_opts.config, "Flow (and server) config")->required();
    curve->add_option("--model", curve_opts.model, "tb, a, b, c or service")->capture_default_str();
    curve->add_option("--horizon-us", curve_opts.horizon_us, "Sampling horizon");
    curve->add_option("--samples", curve_opts.samples, "Sample count (breakpoints when 0)");
    add_common(curve);

    std::vector<std::string> argv_store = {"ncdelay"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return kExitOk;
        }
        err << "error: usage: " << one_line(e.what()) << '\n';
        return kExitUsage;
    }

    try {
        if (*gen) {
            return cmd_gen(config, common, out);
        }
        if (*sim) {
            if (sim_opts.arrivals.empty() && sim_opts.source_config.empty()) {
                throw ConfigError("sim needs --arrivals or --source");
            }
            return cmd_sim(sim_opts, common, out);
        }
        if (*est) {
            return cmd_estimate(est_opts, common, out);
        }
        if (*bound) {
            return cmd_bound(config, model, common, out);
        }
        if (*compare) {
            return cmd_compare(config, common, out, err);
        }
        if (*curve) {
            return cmd_curve(curve_opts, common, out);
        }
    } catch (const Error& e) {
        err << "error: " << to_string(e.category()) << ": " << one_line(e.what()) << '\n';
        return exit_code(e.category());
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: io: " << one_line(e.what()) << '\n';
        return kExitIo;
    }
    return kExitUsage;
}

} // namespace ncdelay
