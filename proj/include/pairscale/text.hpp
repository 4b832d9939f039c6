#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace pairscale {

std::string trim(std::string_view s);

// Unicode NFC normalization (ICU-backed). Invalid UTF-8 byte sequences are
// replaced with U+FFFD rather than rejected, so normalization is total.
std::string nfc(std::string_view s);

// Full Unicode case folding, for case-insensitive matching.
std::string fold_case(std::string_view s);

// Canonical entity identity: NFC-normalized, whitespace-trimmed, otherwise
// the exact roster string.
std::string canonical_id(std::string_view s);

// Normalization applied to both sides of an extraction-reply comparison.
std::string match_key(std::string_view s);

bool contains(std::string_view haystack, std::string_view needle);

// RFC 4180 style CSV: quoted fields, doubled quotes, newlines inside quotes.
std::vector<std::vector<std::string>> parse_csv(std::istream& in);
std::string csv_escape(std::string_view field);

}  // namespace pairscale
