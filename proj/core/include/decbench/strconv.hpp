#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace decbench {

// Shortest round-trip decimal formatting. All persisted floating-point
// values (strategy keys, CSV, JSONL) go through these two functions so that
// parse(format(x)) == x bit-exactly. Non-finite values spell "inf", "-inf",
// "nan".
std::string format_double(double value);
double parse_double(std::string_view text);  // throws InputError on garbage

std::string format_u64(uint64_t value);
uint64_t parse_u64(std::string_view text);
long parse_long(std::string_view text);

// Whitespace-separated fields of a line.
std::vector<std::string_view> split_fields(std::string_view line);
// Split on a single character, keeping empty fields.
std::vector<std::string_view> split_char(std::string_view text, char sep);
std::string_view trim(std::string_view text);

// Reversible encoding for tokens that may contain whitespace or control
// bytes (byte-scheme tokenizers). Encodes '%' and anything outside the
// printable ASCII range as %XX.
std::string percent_encode(std::string_view raw);
std::string percent_decode(std::string_view encoded);

// Minimal CSV quoting; strategy keys contain commas.
std::string csv_quote(const std::string& value);
std::vector<std::string> csv_split_line(const std::string& line);

}  // namespace decbench
