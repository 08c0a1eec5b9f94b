#pragma once

#include "tshs/activity.hpp"
#include "tshs/clock.hpp"
#include "tshs/recording.hpp"
#include "tshs/templates.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tshs {

enum class AnswerKind : uint8_t { Bool, Int, Category, TimeRange, Compound };

const std::string& answer_kind_name(AnswerKind kind);
std::optional<AnswerKind> answer_kind_from_name(const std::string& name);
AnswerKind answer_kind_of(TaskFamily task);

struct Answer {
    AnswerKind kind = AnswerKind::Bool;
    bool flag = false; // Bool and Compound
    int64_t count = 0; // Int
    std::optional<ActivityClass> category;
    std::optional<ClockRange> range; // absolute clock of day

    static Answer yes_no(bool value);
    static Answer integer(int64_t value);
    static Answer of_category(ActivityClass cls);
    static Answer of_range(ClockRange range);
    static Answer compound(bool value, std::optional<ActivityClass> cls,
                           std::optional<ClockRange> range);

    bool operator==(const Answer&) const = default;
};

struct TimelineEntry {
    ActivityClass cls = ActivityClass::Sleep;
    int64_t start_ms = 0; // relative to the window
    int64_t end_ms = 0;
    bool inserted = false;
};

struct HaystackSample {
    std::string id;
    TaskFamily task = TaskFamily::Existence;
    double context_s = 0.0;
    double rate = 0.0;
    std::string split;
    int64_t index = 0;
    std::string participant;
    int64_t start_clock_ms = 0;
    Series3 series;
    std::vector<TimelineEntry> timeline;
    std::string question;
    int template_id = 0;
    Answer answer;
    std::string answer_text;
    std::map<std::string, std::string> slots;
    uint64_t seed = 0;
    std::string series_ref;
    std::string rationale;

    int64_t context_ms() const { return static_cast<int64_t>(context_s * 1000.0 + 0.5); }
    ClockTime clock_at_ms(int64_t rel_ms) const {
        return ClockTime::of(start_clock_ms).plus(rel_ms);
    }
};

// Sample index -> window-relative milliseconds at the sample's rate.
int64_t sample_to_ms(int64_t sample, double rate);

std::string capitalize(const std::string& s);

} // namespace tshs
