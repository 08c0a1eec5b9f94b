#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace tshs {

inline constexpr int64_t kMsPerDay = 86'400'000;

// Wall-clock time of day in milliseconds since midnight. Arithmetic wraps at
// midnight so a window can span 23:59 -> 00:01.
struct ClockTime {
    int64_t ms = 0; // [0, kMsPerDay)

    static ClockTime of(int64_t ms_since_midnight) {
        int64_t m = ms_since_midnight % kMsPerDay;
        if (m < 0)
            m += kMsPerDay;
        return ClockTime{m};
    }

    ClockTime plus(int64_t delta_ms) const { return of(ms + delta_ms); }

    bool operator==(const ClockTime&) const = default;
};

// "HH:MM:SS:mmm", milliseconds always three digits. With am_pm the hour is
// rendered on the 12-hour clock and " AM"/" PM" appended. pad_hours controls
// the leading zero on single-digit hours.
std::string format_clock(ClockTime t, bool pad_hours = true, bool am_pm = false);

// Seconds-resolution variant used in recording-span sentences and timeline
// headers: "HH:MM:SS" plus optional AM/PM suffix.
std::string format_clock_s(ClockTime t, bool pad_hours = true, bool am_pm = false);

// Accepts everything the formatters above emit plus unpadded hours and
// missing milliseconds: "2:34:56", "02:34:56:789", "02:34:56:789 AM".
std::optional<ClockTime> parse_clock(std::string_view text);

// Clock range stored as [start, end) in ms-of-day; end < start means the
// range wraps past midnight.
struct ClockRange {
    int64_t start_ms = 0;
    int64_t end_ms = 0;

    bool operator==(const ClockRange&) const = default;

    // Length accounting for midnight wrap.
    int64_t duration_ms() const {
        int64_t d = end_ms - start_ms;
        return d >= 0 ? d : d + kMsPerDay;
    }
};

// "From HH:MM:SS:mmm to HH:MM:SS:mmm".
std::string format_clock_range(const ClockRange& r, bool am_pm = false);
std::optional<ClockRange> parse_clock_range(std::string_view text);

} // namespace tshs
