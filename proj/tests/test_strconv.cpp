#include <doctest.h>

#include <limits>
#include <random>

#include "decbench/errors.hpp"
#include "decbench/strconv.hpp"

using namespace decbench;

TEST_CASE("format_double is shortest round-trip") {
    CHECK(format_double(0.9) == "0.9");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(0.95) == "0.95");
    CHECK(format_double(-0.72) == "-0.72");
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
}

TEST_CASE("parse_double inverts format_double bit-exactly") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 5000; ++i) {
        double x = (static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5) * std::pow(10.0, static_cast<int>(rng() % 12) - 6);
        CHECK(parse_double(format_double(x)) == x);
    }
    CHECK(std::isinf(parse_double("-inf")));
    CHECK_THROWS_AS(parse_double("0.9x"), InputError);
    CHECK_THROWS_AS(parse_double(""), InputError);
}

TEST_CASE("percent encoding round-trips arbitrary bytes") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 2000; ++i) {
        std::string raw;
        size_t len = rng() % 24;
        for (size_t j = 0; j < len; ++j) {
            raw.push_back(static_cast<char>(rng() % 256));
        }
        CHECK(percent_decode(percent_encode(raw)) == raw);
        CHECK(percent_encode(raw).find(' ') == std::string::npos);
        CHECK(percent_encode(raw).find('\n') == std::string::npos);
    }
}

TEST_CASE("csv quoting round-trips commas and quotes") {
    std::vector<std::string> fields = {"plain", "with,comma", "with\"quote", "cs[alpha=0.6,k=10]", ""};
    std::string line;
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) line += ',';
        line += csv_quote(fields[i]);
    }
    auto parsed = csv_split_line(line);
    REQUIRE(parsed.size() == fields.size());
    for (size_t i = 0; i < fields.size(); ++i) {
        CHECK(parsed[i] == fields[i]);
    }
}

TEST_CASE("split_fields handles runs of whitespace") {
    auto f = split_fields("  a \t b\tc  ");
    REQUIRE(f.size() == 3);
    CHECK(f[0] == "a");
    CHECK(f[2] == "c");
}
