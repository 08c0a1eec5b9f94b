#include "tshs/bouts.hpp"
#include "tshs/synth.hpp"

#include <doctest.h>

#include <cmath>

using namespace tshs;

TEST_SUITE("synth") {

TEST_CASE("recording has the requested shape") {
    SynthSpec spec;
    spec.participants = 2;
    spec.minutes = 2.0;
    spec.rate = 100.0;
    Recording rec = synth_recording(spec, 0);
    CHECK(rec.participant_id == "P000");
    CHECK(rec.rate == doctest::Approx(100.0));
    CHECK(rec.length() == 12'000);
    CHECK(rec.channels[1].size() == rec.channels[0].size());
    CHECK(rec.start_clock_ms >= 0);
    CHECK(rec.start_clock_ms < 86'400'000);
}

TEST_CASE("annotations tile the whole recording by default") {
    SynthSpec spec;
    spec.participants = 1;
    spec.minutes = 3.0;
    Recording rec = synth_recording(spec, 0);
    REQUIRE(!rec.annotations.empty());
    CHECK(rec.annotations.front().start == 0);
    CHECK(rec.annotations.back().end == rec.length());
    for (size_t i = 1; i < rec.annotations.size(); ++i)
        CHECK(rec.annotations[i].start == rec.annotations[i - 1].end);
}

TEST_CASE("unannotated fraction leaves gaps") {
    SynthSpec spec;
    spec.participants = 1;
    spec.minutes = 10.0;
    spec.bout_lo_s = 5.0;
    spec.bout_hi_s = 20.0;
    spec.unannotated_frac = 0.5;
    Recording rec = synth_recording(spec, 0);
    int64_t annotated = 0;
    for (const auto& a : rec.annotations)
        annotated += a.end - a.start;
    CHECK(annotated < rec.length());
    CHECK(annotated > 0);
}

TEST_CASE("same spec and index reproduce the same bytes") {
    SynthSpec spec;
    spec.participants = 1;
    spec.minutes = 1.0;
    Recording a = synth_recording(spec, 0);
    Recording b = synth_recording(spec, 0);
    CHECK(a.channels[0] == b.channels[0]);
    CHECK(a.channels[2] == b.channels[2]);
    CHECK(a.start_clock_ms == b.start_clock_ms);
    Recording c = synth_recording(spec, 1);
    CHECK(a.channels[0] != c.channels[0]);
}

TEST_CASE("per-channel bias magnitude sits in the configured band") {
    SynthSpec spec;
    spec.participants = 6;
    spec.minutes = 2.0;
    for (int idx = 0; idx < spec.participants; ++idx) {
        Recording rec = synth_recording(spec, idx);
        // Sleep bouts are nearly flat, so their mean exposes the bias.
        for (const auto& a : rec.annotations) {
            if (a.cls != ActivityClass::Sleep || a.end - a.start < 500)
                continue;
            double mean = 0.0;
            for (int64_t i = a.start; i < a.end; ++i)
                mean += rec.channels[0][static_cast<size_t>(i)];
            mean /= static_cast<double>(a.end - a.start);
            CHECK(std::abs(mean) > spec.bias_lo - 0.1);
            CHECK(std::abs(mean) < spec.bias_hi + 0.1);
        }
    }
}

TEST_CASE("both regimes appear in a long recording") {
    SynthSpec spec;
    spec.participants = 1;
    spec.minutes = 60.0;
    Recording rec = synth_recording(spec, 0);
    bool sedentary = false, active = false;
    for (const auto& a : rec.annotations) {
        sedentary = sedentary || regime_of(a.cls) == Regime::Sedentary;
        active = active || regime_of(a.cls) == Regime::Active;
    }
    CHECK(sedentary);
    CHECK(active);
}

} // TEST_SUITE
