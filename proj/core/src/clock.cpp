#include "tshs/clock.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

namespace tshs {

namespace {

struct HmsParts {
    int hour, minute, second, milli;
};

HmsParts split_parts(ClockTime t) {
    int64_t ms = t.ms;
    HmsParts p{};
    p.milli = static_cast<int>(ms % 1000);
    int64_t s = ms / 1000;
    p.second = static_cast<int>(s % 60);
    int64_t m = s / 60;
    p.minute = static_cast<int>(m % 60);
    p.hour = static_cast<int>(m / 60);
    return p;
}

// 0 -> (12, AM), 12 -> (12, PM), 13..23 -> (1..11, PM)
int to_12h(int hour24, bool& pm) {
    pm = hour24 >= 12;
    int h = hour24 % 12;
    return h == 0 ? 12 : h;
}

void append_hour(std::string& out, int hour, bool pad) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), pad ? "%02d" : "%d", hour);
    out += buf;
}

} // namespace

std::string format_clock(ClockTime t, bool pad_hours, bool am_pm) {
    HmsParts p = split_parts(t);
    bool pm = false;
    int hour = am_pm ? to_12h(p.hour, pm) : p.hour;
    std::string out;
    append_hour(out, hour, pad_hours);
    char buf[16];
    std::snprintf(buf, sizeof(buf), ":%02d:%02d:%03d", p.minute, p.second, p.milli);
    out += buf;
    if (am_pm)
        out += pm ? " PM" : " AM";
    return out;
}

std::string format_clock_s(ClockTime t, bool pad_hours, bool am_pm) {
    HmsParts p = split_parts(t);
    bool pm = false;
    int hour = am_pm ? to_12h(p.hour, pm) : p.hour;
    std::string out;
    append_hour(out, hour, pad_hours);
    char buf[16];
    std::snprintf(buf, sizeof(buf), ":%02d:%02d", p.minute, p.second);
    out += buf;
    if (am_pm)
        out += pm ? " PM" : " AM";
    return out;
}

namespace {

bool read_int(std::string_view& s, int max_digits, int& out) {
    size_t n = 0;
    while (n < s.size() && n < static_cast<size_t>(max_digits) &&
           std::isdigit(static_cast<unsigned char>(s[n])))
        ++n;
    if (n == 0)
        return false;
    auto res = std::from_chars(s.data(), s.data() + n, out);
    if (res.ec != std::errc{})
        return false;
    s.remove_prefix(n);
    return true;
}

bool consume(std::string_view& s, char c) {
    if (s.empty() || s.front() != c)
        return false;
    s.remove_prefix(1);
    return true;
}

void skip_spaces(std::string_view& s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
}

} // namespace

std::optional<ClockTime> parse_clock(std::string_view text) {
    std::string_view s = text;
    skip_spaces(s);
    int hour = 0, minute = 0, second = 0, milli = 0;
    if (!read_int(s, 2, hour) || !consume(s, ':'))
        return std::nullopt;
    if (!read_int(s, 2, minute) || !consume(s, ':'))
        return std::nullopt;
    if (!read_int(s, 2, second))
        return std::nullopt;
    // Optional milliseconds, separated by ':' or '.'.
    if (!s.empty() && (s.front() == ':' || s.front() == '.')) {
        s.remove_prefix(1);
        if (!read_int(s, 3, milli))
            return std::nullopt;
    }
    skip_spaces(s);
    bool has_suffix = false, pm = false;
    if (s.size() >= 2) {
        char a = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
        char b = static_cast<char>(std::toupper(static_cast<unsigned char>(s[1])));
        if ((a == 'A' || a == 'P') && b == 'M') {
            has_suffix = true;
            pm = a == 'P';
            s.remove_prefix(2);
        }
    }
    skip_spaces(s);
    if (!s.empty())
        return std::nullopt;
    if (minute > 59 || second > 59)
        return std::nullopt;
    if (has_suffix) {
        if (hour < 1 || hour > 12)
            return std::nullopt;
        hour = hour % 12 + (pm ? 12 : 0);
    } else if (hour > 23) {
        return std::nullopt;
    }
    int64_t ms = ((static_cast<int64_t>(hour) * 60 + minute) * 60 + second) * 1000 + milli;
    return ClockTime{ms};
}

std::string format_clock_range(const ClockRange& r, bool am_pm) {
    return "From " + format_clock(ClockTime::of(r.start_ms), true, am_pm) + " to " +
           format_clock(ClockTime::of(r.end_ms), true, am_pm);
}

std::optional<ClockRange> parse_clock_range(std::string_view text) {
    // Find "from ... to ..." case-insensitively; the leading "from" may be
    // absent ("02:09:52:635 to 02:10:08:967" is accepted).
    auto lower = std::string(text);
    for (auto& c : lower)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    size_t start = 0;
    size_t from = lower.find("from ");
    if (from != std::string::npos)
        start = from + 5;
    size_t to_pos = lower.find(" to ", start);
    if (to_pos == std::string::npos)
        return std::nullopt;
    auto t1 = parse_clock(text.substr(start, to_pos - start));
    std::string_view rest = text.substr(to_pos + 4);
    // Trim trailing punctuation.
    while (!rest.empty() && (rest.back() == '.' || rest.back() == '!' || rest.back() == ' '))
        rest.remove_suffix(1);
    auto t2 = parse_clock(rest);
    if (!t1 || !t2)
        return std::nullopt;
    return ClockRange{t1->ms, t2->ms};
}

} // namespace tshs
