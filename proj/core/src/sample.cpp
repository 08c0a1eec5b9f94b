#include "tshs/sample.hpp"

#include "tshs/errors.hpp"

#include <array>
#include <cmath>

namespace tshs {

namespace {

const std::array<std::string, 5> kKindNames = {
    "boolean", "integer", "category", "time_range", "compound"};

} // namespace

const std::string& answer_kind_name(AnswerKind kind) {
    return kKindNames[static_cast<size_t>(kind)];
}

std::optional<AnswerKind> answer_kind_from_name(const std::string& name) {
    for (size_t i = 0; i < kKindNames.size(); ++i)
        if (kKindNames[i] == name)
            return static_cast<AnswerKind>(i);
    return std::nullopt;
}

AnswerKind answer_kind_of(TaskFamily task) {
    switch (task) {
    case TaskFamily::Existence:
    case TaskFamily::Ordering:
        return AnswerKind::Bool;
    case TaskFamily::Counting:
        return AnswerKind::Int;
    case TaskFamily::StateQuery:
    case TaskFamily::Antecedent:
        return AnswerKind::Category;
    case TaskFamily::Localization:
    case TaskFamily::Comparison:
    case TaskFamily::MultiHop:
        return AnswerKind::TimeRange;
    case TaskFamily::AnomalyDetection:
    case TaskFamily::AnomalyLocalization:
        return AnswerKind::Compound;
    }
    throw ConfigError("unknown task family");
}

Answer Answer::yes_no(bool value) {
    Answer a;
    a.kind = AnswerKind::Bool;
    a.flag = value;
    return a;
}

Answer Answer::integer(int64_t value) {
    Answer a;
    a.kind = AnswerKind::Int;
    a.count = value;
    return a;
}

Answer Answer::of_category(ActivityClass cls) {
    Answer a;
    a.kind = AnswerKind::Category;
    a.category = cls;
    return a;
}

Answer Answer::of_range(ClockRange range) {
    Answer a;
    a.kind = AnswerKind::TimeRange;
    a.range = range;
    return a;
}

Answer Answer::compound(bool value, std::optional<ActivityClass> cls,
                        std::optional<ClockRange> range) {
    Answer a;
    a.kind = AnswerKind::Compound;
    a.flag = value;
    a.category = cls;
    a.range = range;
    return a;
}

int64_t sample_to_ms(int64_t sample, double rate) {
    return std::llround(static_cast<double>(sample) * 1000.0 / rate);
}

std::string capitalize(const std::string& s) {
    std::string out = s;
    if (!out.empty() && out[0] >= 'a' && out[0] <= 'z')
        out[0] = static_cast<char>(out[0] - 'a' + 'A');
    return out;
}

} // namespace tshs
