#include "tshs/activity.hpp"

namespace tshs {

const std::array<std::string, kNumClasses>& class_names() {
    static const std::array<std::string, kNumClasses> names = {
        "sleep",     "sitting",        "standing",  "vehicle",
        "walking",   "mixed-activity", "bicycling", "manual-work",
        "sports",    "household-chores",
    };
    return names;
}

const std::string& class_name(ActivityClass cls) {
    return class_names()[static_cast<size_t>(cls)];
}

std::optional<ActivityClass> class_from_name(std::string_view name) {
    const auto& names = class_names();
    for (int i = 0; i < kNumClasses; ++i) {
        if (names[i] == name)
            return static_cast<ActivityClass>(i);
    }
    return std::nullopt;
}

const std::string& regime_name(Regime regime) {
    static const std::string sedentary = "sedentary";
    static const std::string active = "active";
    return regime == Regime::Sedentary ? sedentary : active;
}

std::vector<ActivityClass> classes_in_regime(Regime regime) {
    std::vector<ActivityClass> out;
    for (int i = 0; i < kNumClasses; ++i) {
        auto cls = static_cast<ActivityClass>(i);
        if (regime_of(cls) == regime)
            out.push_back(cls);
    }
    return out;
}

std::vector<ActivityClass> all_classes() {
    std::vector<ActivityClass> out;
    for (int i = 0; i < kNumClasses; ++i)
        out.push_back(static_cast<ActivityClass>(i));
    return out;
}

} // namespace tshs
