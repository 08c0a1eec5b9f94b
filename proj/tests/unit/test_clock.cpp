#include "tshs/clock.hpp"

#include <doctest.h>

using namespace tshs;

TEST_SUITE("clock") {

TEST_CASE("known instant renders in both conventions") {
    ClockTime t = ClockTime::of(9'296'789);
    CHECK(format_clock(t, true, true) == "02:34:56:789 AM");
    CHECK(format_clock(t, true, false) == "02:34:56:789");
    CHECK(format_clock_s(t, true, false) == "02:34:56");
    CHECK(format_clock_s(t, true, true) == "02:34:56 AM");
}

TEST_CASE("twelve-hour boundaries") {
    CHECK(format_clock(ClockTime::of(0), true, true) == "12:00:00:000 AM");
    CHECK(format_clock(ClockTime::of(12 * 3'600'000), true, true) == "12:00:00:000 PM");
    CHECK(format_clock(ClockTime::of(kMsPerDay - 1), true, true) == "11:59:59:999 PM");
    CHECK(format_clock(ClockTime::of(13 * 3'600'000 + 62'000), true, true) == "01:01:02:000 PM");
}

TEST_CASE("of wraps modulo the day") {
    CHECK(ClockTime::of(kMsPerDay).ms == 0);
    CHECK(ClockTime::of(kMsPerDay + 5).ms == 5);
    CHECK(ClockTime::of(-1).ms == kMsPerDay - 1);
    CHECK(ClockTime::of(3).plus(-10).ms == kMsPerDay - 7);
}

TEST_CASE("parser round-trips strided coverage of the day") {
    for (int64_t ms = 0; ms < kMsPerDay; ms += 1'009) {
        ClockTime t = ClockTime::of(ms);
        auto p24 = parse_clock(format_clock(t, true, false));
        REQUIRE(p24.has_value());
        CHECK(p24->ms == ms);
        auto p12 = parse_clock(format_clock(t, true, true));
        REQUIRE(p12.has_value());
        CHECK(p12->ms == ms);
        auto ps = parse_clock(format_clock_s(t, true, false));
        REQUIRE(ps.has_value());
        CHECK(ps->ms == ms - ms % 1000);
    }
}

TEST_CASE("parser accepts unpadded hours and rejects junk") {
    auto p = parse_clock("2:34:56");
    REQUIRE(p.has_value());
    CHECK(p->ms == 2 * 3'600'000 + 34 * 60'000 + 56'000);
    CHECK_FALSE(parse_clock("25:00:00").has_value());
    CHECK_FALSE(parse_clock("10:65:00").has_value());
    CHECK_FALSE(parse_clock("banana").has_value());
    CHECK_FALSE(parse_clock("13:00:00 PM").has_value()); // 13 is not a 12-hour hour
}

TEST_CASE("range duration handles the midnight wrap") {
    ClockRange plain{3'600'000, 7'200'000};
    CHECK(plain.duration_ms() == 3'600'000);
    ClockRange wrapped{23 * 3'600'000, 1 * 3'600'000};
    CHECK(wrapped.duration_ms() == 2 * 3'600'000);
}

TEST_CASE("range renders and parses") {
    ClockRange r{9'296'789, 9'896'789};
    std::string text = format_clock_range(r);
    CHECK(text == "From 02:34:56:789 to 02:44:56:789");
    auto back = parse_clock_range(text);
    REQUIRE(back.has_value());
    CHECK(back->start_ms == r.start_ms);
    CHECK(back->end_ms == r.end_ms);
}

} // TEST_SUITE
