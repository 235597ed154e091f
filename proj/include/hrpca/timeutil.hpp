#ifndef HRPCA_TIMEUTIL_HPP
#define HRPCA_TIMEUTIL_HPP

#include <cstdint>
#include <string>

namespace hrpca {

// Parses "YYYY-MM-DDTHH:MM:SSZ" (ISO-8601, UTC) to seconds since the Unix
// epoch. Throws ParseError on anything else.
std::int64_t parse_iso8601_utc(const std::string& text);

// Inverse of parse_iso8601_utc.
std::string format_iso8601_utc(std::int64_t epoch_seconds);

// Parses a duration like "24h", "90m", "3600s", "2d", or a bare number of
// seconds. Throws ParseError on malformed input.
std::int64_t parse_duration_seconds(const std::string& text);

}  // namespace hrpca

#endif  // HRPCA_TIMEUTIL_HPP
