#include "tshs/prompts.hpp"

#include "tshs/errors.hpp"

#include <cstdio>

namespace tshs {

namespace {

// Seconds resolution on the 12-hour clock without the AM/PM suffix, the form
// the timeline block uses for its per-bout lines.
std::string clock_12h(ClockTime t) {
    int64_t s = t.ms / 1000;
    int hour = static_cast<int>(s / 3600);
    int minute = static_cast<int>((s / 60) % 60);
    int sec = static_cast<int>(s % 60);
    int h12 = hour % 12;
    if (h12 == 0)
        h12 = 12;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%02d:%02d:%02d", h12, minute, sec);
    return buf;
}

} // namespace

std::string build_prompt(const HaystackSample& sample) {
    ClockTime start = ClockTime::of(sample.start_clock_ms);
    ClockTime end = start.plus(sample.context_ms());
    std::string out;
    out += "You are given accelerometer data in all three dimensions from a "
           "wrist-worn sensor. The recording spans from ";
    out += format_clock_s(start, true, true);
    out += " to ";
    out += format_clock_s(end, true, true);
    out += ".\n\nQuestion: ";
    out += sample.question;
    out += "\n\n[accelerometer data x/y/z axes]\n\n";
    out += "Instructions: Analyze the accelerometer data carefully. Think "
           "step-by-step about what the signal patterns indicate. Write your "
           "reasoning as a natural paragraph. End your response with "
           "\"Answer: <your answer>\"";
    return out;
}

std::string build_oracle_prompt(const HaystackSample& sample) {
    ClockTime start = ClockTime::of(sample.start_clock_ms);
    ClockTime end = start.plus(sample.context_ms());
    std::string out = "Activity Timeline (Ground Truth):\n";
    out += "Recording: ";
    out += format_clock_s(start, true, true);
    out += " -- ";
    out += format_clock_s(end, true, true);
    out += "\n";
    for (const auto& e : sample.timeline) {
        out += clock_12h(start.plus(e.start_ms));
        out += " -- ";
        out += clock_12h(start.plus(e.end_ms));
        out += ": ";
        out += class_name(e.cls);
        if (e.inserted)
            out += " [inserted]";
        out += "\n";
    }
    out += "\n";
    out += build_prompt(sample);
    return out;
}

std::string gold_answer_text(const HaystackSample& sample) {
    const Answer& a = sample.answer;
    switch (a.kind) {
    case AnswerKind::Bool:
        return a.flag ? "Yes." : "No.";
    case AnswerKind::Int:
        return std::to_string(a.count);
    case AnswerKind::Category:
        return capitalize(class_name(*a.category)) + ".";
    case AnswerKind::TimeRange:
        return format_clock_range(*a.range);
    case AnswerKind::Compound: {
        if (!a.flag)
            return "No.";
        if (!a.category)
            throw DataError("positive compound answer lacks a category");
        std::string text = "Yes, there is anomalous " + class_name(*a.category) + " activity ";
        if (a.range) {
            text += "from " + format_clock(ClockTime::of(a.range->start_ms)) + " to " +
                    format_clock(ClockTime::of(a.range->end_ms)) + ".";
        } else {
            Regime needle_regime = regime_of(*a.category);
            Regime bg = needle_regime == Regime::Sedentary ? Regime::Active : Regime::Sedentary;
            text += "in the " + regime_name(bg) + " background.";
        }
        return text;
    }
    }
    throw DataError("unknown answer kind");
}

} // namespace tshs
