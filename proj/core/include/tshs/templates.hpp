#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tshs {

enum class TaskFamily : uint8_t {
    Existence = 0,
    Localization,
    Counting,
    Ordering,
    StateQuery,
    Antecedent,
    Comparison,
    MultiHop,
    AnomalyDetection,
    AnomalyLocalization,
};

inline constexpr int kNumTasks = 10;
inline constexpr int kTemplatesPerTask = 20;

const std::string& task_name(TaskFamily task);
std::optional<TaskFamily> task_from_name(const std::string& name);
std::array<TaskFamily, kNumTasks> all_tasks();

// Some families encode the question variant in the template line number.
//   ordering:    0-9 ask "before", 10-19 ask "after"
//   comparison:  0-4 longest bout, 5-9 shortest bout,
//                10-14 longest gap, 15-19 shortest gap
//   multi_hop:   0-9 look after the anchor, 10-19 look before it
bool ordering_template_asks_before(int template_id);
bool multihop_template_after(int template_id);

enum class ComparisonVariant { LongestBout, ShortestBout, LongestGap, ShortestGap };
ComparisonVariant comparison_template_variant(int template_id);
std::pair<int, int> comparison_template_range(ComparisonVariant variant);

class TemplatePack {
public:
    static TemplatePack builtin();

    const std::string& line(TaskFamily task, int template_id) const;
    // Replaces the whole family with 20 lines from a plain text file.
    void load_file(TaskFamily task, const std::filesystem::path& path);

private:
    std::array<std::vector<std::string>, kNumTasks> lines_;
};

// Substitutes {slot} markers; throws ConfigError on an unknown or unfilled slot.
std::string instantiate_template(const std::string& tmpl,
                                 const std::map<std::string, std::string>& slots);

const char* cardinal_word(int k); // 1 -> "one"
const char* ordinal_word(int k);  // 1 -> "first"

} // namespace tshs
