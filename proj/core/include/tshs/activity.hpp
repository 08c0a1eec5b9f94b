#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tshs {

// The ten canonical activity classes. Order is fixed: the first four form
// the sedentary regime, the remaining six the active regime.
enum class ActivityClass : uint8_t {
    Sleep = 0,
    Sitting,
    Standing,
    Vehicle,
    Walking,
    MixedActivity,
    Bicycling,
    ManualWork,
    Sports,
    HouseholdChores,
};

inline constexpr int kNumClasses = 10;
inline constexpr int kNumSedentary = 4;

enum class Regime : uint8_t { Sedentary = 0, Active = 1 };

const std::array<std::string, kNumClasses>& class_names();

const std::string& class_name(ActivityClass cls);
std::optional<ActivityClass> class_from_name(std::string_view name);

inline Regime regime_of(ActivityClass cls) {
    return static_cast<int>(cls) < kNumSedentary ? Regime::Sedentary : Regime::Active;
}

const std::string& regime_name(Regime regime);

std::vector<ActivityClass> classes_in_regime(Regime regime);
std::vector<ActivityClass> all_classes();

} // namespace tshs
