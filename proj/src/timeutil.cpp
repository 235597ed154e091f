#include "hrpca/timeutil.hpp"

#include <chrono>
#include <cstdio>
#include <string>

#include "hrpca/errors.hpp"

namespace hrpca {

namespace chr = std::chrono;

std::int64_t parse_iso8601_utc(const std::string& text) {
    int y = 0, mo = 0, da = 0, h = 0, mi = 0, s = 0;
    char tail = '\0';
    const int matched =
        std::sscanf(text.c_str(), "%4d-%2d-%2d%*1[T ]%2d:%2d:%2d%c", &y, &mo, &da, &h,
                    &mi, &s, &tail);
    if (matched != 7 || tail != 'Z') {
        throw ParseError("expected ISO-8601 UTC instant (YYYY-MM-DDTHH:MM:SSZ), got '" +
                         text + "'");
    }
    const chr::year_month_day ymd{chr::year{y}, chr::month{static_cast<unsigned>(mo)},
                                  chr::day{static_cast<unsigned>(da)}};
    if (!ymd.ok() || h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 || s > 60) {
        throw ParseError("calendar fields out of range in '" + text + "'");
    }
    const chr::sys_days days{ymd};
    return chr::duration_cast<chr::seconds>(days.time_since_epoch()).count() +
           h * 3600LL + mi * 60LL + s;
}

std::string format_iso8601_utc(std::int64_t epoch_seconds) {
    std::int64_t day_count = epoch_seconds / 86400;
    std::int64_t within = epoch_seconds % 86400;
    if (within < 0) {
        within += 86400;
        day_count -= 1;
    }
    const chr::sys_days days{chr::days{day_count}};
    const chr::year_month_day ymd{days};
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02lld:%02lld:%02lldZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()),
                  static_cast<long long>(within / 3600),
                  static_cast<long long>((within % 3600) / 60),
                  static_cast<long long>(within % 60));
    return buf;
}

std::int64_t parse_duration_seconds(const std::string& text) {
    if (text.empty()) {
        throw ParseError("empty duration");
    }
    std::size_t pos = 0;
    long long value = 0;
    try {
        value = std::stoll(text, &pos);
    } catch (const std::exception&) {
        throw ParseError("malformed duration '" + text + "'");
    }
    if (value < 0) {
        throw ParseError("duration must be non-negative: '" + text + "'");
    }
    if (pos == text.size()) {
        return value;  // bare seconds
    }
    if (pos + 1 != text.size()) {
        throw ParseError("malformed duration '" + text + "'");
    }
    switch (text[pos]) {
        case 's': return value;
        case 'm': return value * 60;
        case 'h': return value * 3600;
        case 'd': return value * 86400;
        default:
            throw ParseError("unknown duration unit in '" + text + "'");
    }
}

}  // namespace hrpca
