// test_trace_io.cpp - File formats, config grammar and reference data.

#include "doctest.h"

#include "ncdelay/errors.hpp"
#include "ncdelay/trace_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ncdelay;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir()
{
    const fs::path dir = fs::temp_directory_path() / "ncdelay_test_trace_io";
    fs::create_directories(dir);
    return dir;
}

MeasuredTrace parse(const std::string& text)
{
    std::istringstream in(text);
    return parse_trace(in, "t.csv");
}

std::size_t parse_error_line(const std::string& text)
{
    try {
        parse(text);
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;
}

Config config(const std::string& text)
{
    std::istringstream in(text);
    return Config::parse(in, "c.cfg");
}

} // namespace

TEST_CASE("trace round trip through a file")
{
    const RealSourceFlow flow = real_source_from_load(2048, 3, 0.8, 1e9, 0.96e9);
    const SimulationReport r = simulate(generate_arrivals({SourceKind::real_source, 10000}, flow), {9e8, 4.2e-6});
    const fs::path path = scratch_dir() / "trace.csv";
    write_trace(r.trace, path);
    const MeasuredTrace once = read_trace(path);
    REQUIRE(once.size() == 10000);
    // Nanosecond storage: the first pass rounds, later passes are exact.
    for (std::size_t i = 0; i < once.size(); ++i) {
        CHECK(std::abs(once.records[i].arrival - r.trace.records[i].arrival) <= 0.5e-9);
        CHECK(std::abs(once.records[i].departure - r.trace.records[i].departure) <= 0.5e-9);
    }
    write_trace(once, path);
    CHECK(read_trace(path) == once);
    CHECK_FALSE(fs::exists(fs::path(path) += ".tmp"));
}

TEST_CASE("trace parsing rules")
{
    CHECK(parse(std::string(kTraceHeader) + "\n").empty());
    CHECK(parse("# comment\n\n" + std::string(kTraceHeader) + "\n# more\n0,256,0,5000\n").size() == 1);

    const MeasuredTrace t = parse(std::string(kTraceHeader) + "\n7,256,1000,6000\n");
    CHECK(t.records[0].id == 7);
    CHECK(t.records[0].length_bits == 2048);
    CHECK(t.records[0].arrival == doctest::Approx(1e-6));
    CHECK(t.records[0].departure == doctest::Approx(6e-6));

    const std::string h = std::string(kTraceHeader) + "\n";
    CHECK(parse_error_line(h + "0,256,0,5000\n1,256,10,5\n") == 3);
    CHECK(parse_error_line(h + "0,256,100,5000\n1,256,10,6000\n") == 3);
    CHECK(parse_error_line(h + "0,256,0,5000\n1,256,10,4000\n") == 3);
    CHECK(parse_error_line(h + "0,256,0\n") == 2);
    CHECK(parse_error_line(h + "0,abc,0,5\n") == 2);
    CHECK(parse_error_line(h + "0,0,0,5\n") == 2);
    CHECK(parse_error_line("packet_id,length\n") == 1);
    CHECK_THROWS_AS(parse(""), ParseError);
    try {
        parse(h + "0,256,10,5\n");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("departure_ns must be after arrival_ns") != std::string::npos);
    }
    CHECK_THROWS_AS(read_trace(scratch_dir() / "missing.csv"), IoError);
}

TEST_CASE("arrivals round trip")
{
    const auto arrivals = generate_arrivals({SourceKind::real_source, 500}, real_source_from_load(4096, 5, 0.5, 1e9, 0.96e9));
    const fs::path path = scratch_dir() / "arrivals.csv";
    write_arrivals(arrivals, path);
    const auto once = read_arrivals(path);
    REQUIRE(once.size() == arrivals.size());
    write_arrivals(once, path);
    CHECK(read_arrivals(path) == once);
    CHECK(once[1].time == doctest::Approx(arrivals[1].time).epsilon(1e-6));

    std::vector<Arrival> odd = {{0, 13, 0.0}};
    CHECK_THROWS_AS(write_arrivals(odd, path), DomainError);
}

TEST_CASE("IO delay table file matches the built-in table")
{
    const IoDelayTable file = read_io_table(default_data_dir() / "io_delay_table1.csv");
    const IoDelayTable builtin = default_io_delay_table();
    REQUIRE(file.entries.size() == builtin.entries.size());
    for (int length : {256, 512, 1500}) {
        CHECK(file.maximum_for(length) == doctest::Approx(builtin.maximum_for(length)));
    }
    std::istringstream bad(std::string(kIoTableHeader) + "\n256,0.5,-1\n");
    CHECK_THROWS_AS(parse_io_table(bad, "bad.csv"), ParseError);
}

TEST_CASE("config grammar and units")
{
    const Config c = config("# server\nrate_mbps = 885.95\nerror_us = 4.2\nlength_bytes=256\n"
                            "gap_ns = 10\nlink_bps = inf\nsource = real_source\nloads = 0.2, 0.5\nempty =\n");
    CHECK(c.rate("rate") == doctest::Approx(885.95e6));
    CHECK(c.time("error") == doctest::Approx(4.2e-6));
    CHECK(c.size("length") == 2048);
    CHECK(c.time("gap") == doctest::Approx(1e-8));
    CHECK(c.rate("link") == kInfinity);
    CHECK(c.text("source") == "real_source");
    CHECK(c.numbers("loads") == std::vector<double>{0.2, 0.5});
    CHECK(c.numbers("empty").empty());
    CHECK(c.rate_or("other", 7.0) == 7.0);
    CHECK_NOTHROW(c.reject_unused());
    CHECK(c.used_values().size() == 8);

    CHECK_THROWS_AS(config("a = 1\nfoo\n"), ParseError);
    CHECK_THROWS_AS(config("a = 1\na = 2\n"), ParseError);
    CHECK_THROWS_AS(config("Bad Key = 1\n"), ParseError);
    CHECK_THROWS_AS(config("x_s = 1\nx_us = 2\n").time("x"), ConfigError);
    CHECK_THROWS_AS(config("x_s = fast\n").time("x"), ConfigError);
    CHECK_THROWS_AS(config("x_s = 1\n").rate("x"), ConfigError);
    CHECK_THROWS_AS(config("n = 1.5\n").integer("n"), ConfigError);
    const Config typo = config("rate_bps = 1\nrtae_bps = 2\n");
    typo.rate("rate");
    CHECK_THROWS_AS(typo.reject_unused(), ConfigError);
}

TEST_CASE("reference dataset values")
{
    const ReferenceDataset ref = load_reference();
    CHECK(ref.max_delay(512, 0.8, 5) == doctest::Approx(15.2e-6));
    CHECK(ref.max_delay(1500, 0.2, 3) == doctest::Approx(21.5e-6));
    CHECK(ref.max_delay(256, 0.5, 1) == doctest::Approx(12.0e-6));
    CHECK(ref.max_delays.size() == 16);
    CHECK(ref.service_estimate(256).rate == doctest::Approx(885.95e6));
    CHECK(ref.service_estimate(512).rate == doctest::Approx(918.19e6));
    CHECK(ref.service_estimate(1500).error == doctest::Approx(5.0e-6));
    CHECK(ref.io_delays.maximum_for(1500) == doctest::Approx(3.6e-6));
    CHECK(ref.anchor("fig8_measured").value == doctest::Approx(13.0e-6));
    CHECK(ref.anchor("fig8_model_b").value == doctest::Approx(9.6e-6));
    CHECK_FALSE(ref.anchor("ideal_256").load);
    CHECK_THROWS_AS(ref.max_delay(256, 0.8, 3), DomainError);
}

TEST_CASE("reference checksums are enforced")
{
    const fs::path dir = scratch_dir() / "ref";
    fs::create_directories(dir);
    for (const auto& entry : fs::directory_iterator(default_data_dir() / "reference")) {
        fs::copy_file(entry.path(), dir / entry.path().filename(), fs::copy_options::overwrite_existing);
    }
    CHECK_NOTHROW(load_reference(dir));
    {
        std::ofstream out(dir / "table3.csv", std::ios::app);
        out << "256,0.8,3,99.0,0.1\n";
    }
    CHECK_THROWS_AS(load_reference(dir), IoError);
    fs::remove(dir / "table3.csv");
    CHECK_THROWS_AS(load_reference(dir), IoError);
}

TEST_CASE("sha256 of known strings")
{
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
