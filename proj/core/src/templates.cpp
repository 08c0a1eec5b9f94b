#include "tshs/templates.hpp"

#include "tshs/errors.hpp"

#include <fstream>
#include <utility>

namespace tshs {

namespace {

const std::array<std::string, kNumTasks> kTaskNames = {
    "existence",       "localization", "counting",   "ordering",
    "state_query",     "antecedent",   "comparison", "multi_hop",
    "anomaly_detection", "anomaly_localization",
};

const std::vector<std::string> kExistence = {
    "Is there any {activity} activity present in this recording?",
    "Does the participant engage in {activity} at any point during the recording?",
    "Can you find any period of {activity} in the data?",
    "Did the wearer perform any {activity} during this time span?",
    "Is {activity} among the activities captured in this recording?",
    "Was there at least one episode of {activity} in the signal?",
    "Does this accelerometer trace contain any {activity}?",
    "At any moment in the recording, was the participant engaged in {activity}?",
    "Judging from the signal, did any {activity} take place?",
    "Is a bout of {activity} present anywhere in this data?",
    "Does the recording include any stretch of {activity}?",
    "Was {activity} performed at some point in this recording?",
    "Do the sensor readings show any occurrence of {activity}?",
    "Is there evidence of {activity} anywhere in the trace?",
    "During the recorded period, did the participant ever do any {activity}?",
    "Can any interval of {activity} be found in this recording?",
    "Does any part of the signal correspond to {activity}?",
    "Did the participant spend any time on {activity} in this recording?",
    "Is at least one {activity} episode present in the data?",
    "Looking at the whole recording, is there any {activity} in it?",
};

const std::vector<std::string> kLocalization = {
    "When did the {activity} bout occur? Give the time range.",
    "At what time does the {activity} activity occur? State the start and end time.",
    "Locate the bout of {activity} in the recording and report its time span.",
    "Find the period of {activity} and give its beginning and end.",
    "During which time interval is the participant doing {activity}?",
    "Identify when the {activity} takes place, as a time range.",
    "What is the time span of the {activity} episode in this recording?",
    "Report the start and end times of the {activity} bout.",
    "Between which times does the {activity} occur?",
    "Pin down the interval covering the {activity} activity.",
    "When does the stretch of {activity} begin and end?",
    "Give the clock times bounding the {activity} episode.",
    "Over what interval do the sensor readings correspond to {activity}?",
    "State the time window during which {activity} happens.",
    "From when to when is the participant engaged in {activity}?",
    "Provide the time range of the {activity} present in the data.",
    "Determine the span of time occupied by the {activity} bout.",
    "What interval of the recording contains the {activity}?",
    "Mark out the {activity} episode by its start and end times.",
    "Specify when the {activity} activity starts and when it ends.",
};

const std::vector<std::string> kCounting = {
    "How many {activity} bouts occurred?",
    "Count the distinct episodes of {activity} in this data.",
    "How many times does the participant engage in {activity}?",
    "What is the number of {activity} bouts present?",
    "How many periods of {activity} can be found in the signal?",
    "Give the count of separate {activity} episodes.",
    "How many occurrences of {activity} does the recording contain?",
    "In total, how many distinct {activity} intervals are there?",
    "How many stretches of {activity} appear in the trace?",
    "State how many times {activity} shows up as a separate bout.",
    "How many individual episodes of {activity} are in the recording?",
    "Determine the number of times the wearer performed {activity}.",
    "Count how many {activity} bouts the data contains.",
    "How many separate intervals of {activity} are present?",
    "What count of {activity} episodes does the signal show?",
    "Tally the separate bouts of {activity} in this recording.",
    "How many distinct runs of {activity} occur?",
    "Report the number of {activity} bouts you can find.",
    "How often does {activity} occur as its own distinct bout?",
    "Across the whole recording, how many {activity} episodes are there?",
};

const std::vector<std::string> kOrdering = {
    // 0-9: before
    "Did {activity_a} occur before {activity_b}?",
    "Did the participant do {activity_a} before {activity_b}?",
    "In this recording, does {activity_a} come earlier than {activity_b}?",
    "Is the bout of {activity_a} located before the bout of {activity_b}?",
    "Does {activity_a} precede {activity_b} in the data?",
    "Did {activity_a} happen prior to {activity_b}?",
    "Is {activity_a} found earlier in the recording than {activity_b}?",
    "Does the episode of {activity_a} start before the episode of {activity_b}?",
    "Was {activity_a} performed before {activity_b} was?",
    "Looking at the timeline, does {activity_a} appear before {activity_b}?",
    // 10-19: after
    "Did {activity_a} occur after {activity_b}?",
    "Did the participant do {activity_a} after {activity_b}?",
    "In this recording, does {activity_a} come later than {activity_b}?",
    "Is the bout of {activity_a} located after the bout of {activity_b}?",
    "Does {activity_a} follow {activity_b} in the data?",
    "Did {activity_a} happen subsequent to {activity_b}?",
    "Is {activity_a} found later in the recording than {activity_b}?",
    "Does the episode of {activity_a} start after the episode of {activity_b}?",
    "Was {activity_a} performed after {activity_b} was?",
    "Looking at the timeline, does {activity_a} appear after {activity_b}?",
};

const std::vector<std::string> kStateQuery = {
    "What was the overall activity when the {event} activity occurred?",
    "During the {event} episode, what was the participant's dominant activity?",
    "When the {event} took place, what was the surrounding activity?",
    "Identify the global activity state at the time of the {event} bout.",
    "What broader activity was underway when the {event} happened?",
    "At the moment the {event} occurs, what is the prevailing activity?",
    "Which activity state surrounds the brief {event} episode?",
    "What was the participant mainly doing around the time of the {event}?",
    "Name the dominant activity during which the {event} bout appears.",
    "The {event} episode happens in the middle of which ongoing activity?",
    "What ongoing activity does the {event} interrupt?",
    "State the background activity at the time the {event} occurs.",
    "While the {event} was happening, what was the overall state of the participant?",
    "Which longer-running activity contains the {event} bout?",
    "What activity was in progress around the {event} episode?",
    "Determine the surrounding activity state for the {event} bout.",
    "What was the participant's main activity when the {event} showed up?",
    "Against what background activity does the {event} occur?",
    "Report the overall activity enclosing the {event} episode.",
    "Considering the stretch around it, what activity surrounds the {event}?",
};

const std::vector<std::string> kAntecedent = {
    "What activity occurred immediately before {target}?",
    "Looking at the sequence, what came before {target}?",
    "What was the participant doing right before the {target} episode?",
    "Name the activity that comes directly before the {target} in the recording.",
    "Just before the {target} began, what activity was underway?",
    "What activity leads directly into the bout of {target}?",
    "Identify the activity occurring immediately before the {target}.",
    "Right before the {target} episode, which activity was the wearer engaged in?",
    "Which activity ends just as the {target} begins?",
    "Determine what activity directly preceded the {target}.",
    "Before the {target} bout started, what was the participant doing?",
    "What comes immediately before the {target} in this recording?",
    "State the activity that directly precedes the {target} episode.",
    "Which activity was in progress just prior to the {target}?",
    "What did the wearer do immediately before the {target}?",
    "Report the activity happening right before the {target} starts.",
    "The {target} bout follows which activity?",
    "Immediately ahead of the {target} episode, which activity appears?",
    "Which activity transitions into the {target}?",
    "Looking just before the {target}, what activity is present?",
};

const std::vector<std::string> kComparison = {
    // 0-4: longest bout
    "What was the longest period with {activity}?",
    "Which bout of {activity} lasted the longest? Give its time range.",
    "Find the longest stretch of {activity} and state when it starts and ends.",
    "Among the {activity} bouts, which one has the greatest duration? Answer with its time range.",
    "Report the time span of the longest {activity} episode.",
    // 5-9: shortest bout
    "What was the shortest period with {activity}?",
    "Which bout of {activity} was the briefest? Give its time range.",
    "Find the shortest stretch of {activity} and state when it starts and ends.",
    "Among the {activity} bouts, which one has the smallest duration? Answer with its time range.",
    "Report the time span of the shortest {activity} episode.",
    // 10-14: longest gap
    "What was the longest period without {activity}?",
    "Which stretch free of {activity} lasted the longest? Give its time range.",
    "Find the longest interval containing no {activity} and state when it starts and ends.",
    "Among the periods with no {activity}, which has the greatest duration? Answer with its time range.",
    "Report the time span of the longest {activity}-free period.",
    // 15-19: shortest gap
    "What was the shortest period without {activity}?",
    "Which stretch free of {activity} was the briefest? Give its time range.",
    "Find the shortest interval containing no {activity} and state when it starts and ends.",
    "Among the periods with no {activity}, which has the smallest duration? Answer with its time range.",
    "Report the time span of the shortest {activity}-free period.",
};

const std::vector<std::string> kMultiHop = {
    // 0-9: after the anchor
    "When did the {k_ord} {target} bout occur after the {anchor}?",
    "Locate the {k_ord} {target} episode following the {anchor} bout and give its time range.",
    "After the {anchor}, when does the {k_ord} bout of {target} take place?",
    "Find the {anchor} bout, then report the time range of the {k_ord} {target} episode after it.",
    "Counting forward from the {anchor}, what is the time span of the {k_ord} {target} bout?",
    "What is the time range of the {k_ord} {target} episode that follows the {anchor} activity?",
    "Starting at the {anchor} bout and moving forward, when does the {k_ord} {target} occur?",
    "Report when the {k_ord} occurrence of {target} after the {anchor} begins and ends.",
    "Following the {anchor} episode, give the start and end times of the {k_ord} {target} bout.",
    "Identify the {k_ord} {target} bout later than the {anchor} and state its interval.",
    // 10-19: before the anchor, counting backwards
    "When did the {k_ord} {target} bout occur before the {anchor}?",
    "Locate the {k_ord} {target} episode preceding the {anchor} bout, counting backward, and give its time range.",
    "Before the {anchor}, when does the {k_ord} bout of {target} take place, counting back from it?",
    "Find the {anchor} bout, then report the time range of the {k_ord} {target} episode before it.",
    "Counting backward from the {anchor}, what is the time span of the {k_ord} {target} bout?",
    "What is the time range of the {k_ord} {target} episode that precedes the {anchor} activity, counting backwards?",
    "Starting at the {anchor} bout and moving backward, when does the {k_ord} {target} occur?",
    "Report when the {k_ord} occurrence of {target} before the {anchor} begins and ends.",
    "Working back from the {anchor} episode, give the start and end times of the {k_ord} {target} bout.",
    "Identify the {k_ord} {target} bout earlier than the {anchor} and state its interval.",
};

const std::vector<std::string> kAnomalyDetection = {
    "Is there an anomaly in this recording? If so, which activity is it?",
    "Does any activity here stand out as inconsistent with the rest? Name it if so.",
    "Is there an activity that does not fit the participant's overall pattern? If yes, which one?",
    "Looking at the whole recording, is any episode out of character? If yes, say which activity.",
    "Does the data contain an activity that breaks from the surrounding routine? Identify it if present.",
    "Is one of the activities anomalous given the context of the recording? If so, which?",
    "Can you spot an activity that seems out of place in this recording? Name it if you can.",
    "Is there any bout that clashes with the dominant behaviour in this window? If yes, which activity is it?",
    "Does anything in the signal look like an unusual activity for this stretch? Identify it if so.",
    "Among the activities recorded, is any one inconsistent with the others? If there is, name it.",
    "Is an out-of-pattern activity present in this data? If yes, state which activity.",
    "Does this recording include an episode that deviates from the dominant behaviour? Name the activity if so.",
    "Judging by the overall pattern, is any activity here anomalous? If so, which one?",
    "Is there a bout of activity that does not belong with the rest of the recording? Identify it if present.",
    "Do you see an activity inconsistent with the participant's behaviour in this window? If yes, which?",
    "Is any episode in the recording atypical relative to its surroundings? Name the activity if so.",
    "Does an activity occur here that is out of keeping with the rest of the data? If so, state it.",
    "Within this window, is there an activity that stands apart from the routine? Identify it if yes.",
    "Considering the dominant behaviour, does any bout look anomalous? If yes, which activity?",
    "Does the recording contain an activity episode that doesn't fit? Name it if it does.",
};

const std::vector<std::string> kAnomalyLocalization = {
    "Is there an anomaly in this recording, and if so, when did it occur?",
    "Does any activity break the participant's routine here? If yes, state which one and when it happens.",
    "Identify any out-of-place activity in this window, reporting the activity and its start and end times.",
    "Is an anomalous episode present in the data? If so, say which activity and over what interval.",
    "Can you find an activity inconsistent with the rest of the recording? Name it and localize it in time if so.",
    "Does this recording contain an atypical bout? If yes, give the activity and its time span.",
    "Is any episode out of character for this stretch? If so, report the activity and the time range it covers.",
    "Looking at the pattern overall, is there an anomaly? If yes, state the activity and when it occurs.",
    "Does an activity that doesn't belong appear in this window? Name it and give its interval if so.",
    "Is there a bout inconsistent with the surrounding behaviour? If yes, which activity and during which times?",
    "Spot any unusual activity in the recording; if present, answer with the activity and its time range.",
    "Does the data include an activity at odds with the routine? If so, identify it and when it takes place.",
    "Is something anomalous recorded here? If yes, say what activity and between which times.",
    "If any episode deviates from the dominant pattern, name the activity and report its start and end.",
    "Is an out-of-pattern bout present? If so, which activity is it and what interval does it span?",
    "Does any stretch of this signal capture an activity that doesn't fit? Name it and give the time window if yes.",
    "Check for an anomalous activity; if found, state the activity and the period it occupies.",
    "Is there an episode inconsistent with the rest? If yes, identify the activity and localize its time range.",
    "Within this recording, does an unusual bout occur? If so, report the activity and its timing.",
    "If the participant's routine is interrupted by an odd activity, name that activity and give its time span.",
};

} // namespace

const std::string& task_name(TaskFamily task) { return kTaskNames[static_cast<size_t>(task)]; }

std::optional<TaskFamily> task_from_name(const std::string& name) {
    for (int i = 0; i < kNumTasks; ++i)
        if (kTaskNames[static_cast<size_t>(i)] == name)
            return static_cast<TaskFamily>(i);
    return std::nullopt;
}

std::array<TaskFamily, kNumTasks> all_tasks() {
    std::array<TaskFamily, kNumTasks> tasks;
    for (int i = 0; i < kNumTasks; ++i)
        tasks[static_cast<size_t>(i)] = static_cast<TaskFamily>(i);
    return tasks;
}

bool ordering_template_asks_before(int template_id) { return template_id < 10; }

bool multihop_template_after(int template_id) { return template_id < 10; }

ComparisonVariant comparison_template_variant(int template_id) {
    return static_cast<ComparisonVariant>(template_id / 5);
}

std::pair<int, int> comparison_template_range(ComparisonVariant variant) {
    int lo = static_cast<int>(variant) * 5;
    return {lo, lo + 4};
}

TemplatePack TemplatePack::builtin() {
    TemplatePack pack;
    pack.lines_ = {kExistence,  kLocalization, kCounting,   kOrdering,  kStateQuery,
                   kAntecedent, kComparison,   kMultiHop,   kAnomalyDetection,
                   kAnomalyLocalization};
    for (const auto& family : pack.lines_)
        if (family.size() != kTemplatesPerTask)
            throw ConfigError("builtin template pack is malformed");
    return pack;
}

const std::string& TemplatePack::line(TaskFamily task, int template_id) const {
    const auto& family = lines_[static_cast<size_t>(task)];
    if (template_id < 0 || std::cmp_greater_equal(template_id, family.size()))
        throw ConfigError("template id out of range for " + task_name(task));
    return family[static_cast<size_t>(template_id)];
}

void TemplatePack::load_file(TaskFamily task, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("template file not readable: " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (!line.empty())
            lines.push_back(line);
    }
    if (lines.size() != kTemplatesPerTask)
        throw ConfigError("template file " + path.string() + " must contain exactly " +
                          std::to_string(kTemplatesPerTask) + " non-empty lines, found " +
                          std::to_string(lines.size()));
    lines_[static_cast<size_t>(task)] = std::move(lines);
}

std::string instantiate_template(const std::string& tmpl,
                                 const std::map<std::string, std::string>& slots) {
    std::string out;
    out.reserve(tmpl.size());
    size_t pos = 0;
    while (pos < tmpl.size()) {
        size_t open = tmpl.find('{', pos);
        if (open == std::string::npos) {
            out.append(tmpl, pos, std::string::npos);
            break;
        }
        out.append(tmpl, pos, open - pos);
        size_t close = tmpl.find('}', open);
        if (close == std::string::npos)
            throw ConfigError("unterminated slot in template: " + tmpl);
        std::string key = tmpl.substr(open + 1, close - open - 1);
        auto it = slots.find(key);
        if (it == slots.end())
            throw ConfigError("unfilled template slot '" + key + "' in: " + tmpl);
        out += it->second;
        pos = close + 1;
    }
    return out;
}

const char* cardinal_word(int k) {
    static const char* words[] = {"zero", "one", "two", "three", "four", "five"};
    if (k < 0 || k > 5)
        throw ConfigError("cardinal out of supported range");
    return words[k];
}

const char* ordinal_word(int k) {
    static const char* words[] = {"zeroth", "first", "second", "third", "fourth", "fifth"};
    if (k < 0 || k > 5)
        throw ConfigError("ordinal out of supported range");
    return words[k];
}

} // namespace tshs
