#include "tshs/consistency.hpp"

#include "tshs/errors.hpp"
#include "tshs/prompts.hpp"
#include "tshs/taskgen.hpp"
#include "tshs/templates.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>

namespace tshs {

namespace {

int64_t window_ms_of(const HaystackSample& s) {
    auto ctx = static_cast<int64_t>(std::llround(s.context_s * s.rate));
    return sample_to_ms(ctx, s.rate);
}

ActivityClass slot_class(const HaystackSample& s, const std::string& key) {
    auto it = s.slots.find(key);
    if (it == s.slots.end())
        throw DataError("missing slot \"" + key + "\"");
    auto cls = class_from_name(it->second);
    if (!cls)
        throw DataError("slot \"" + key + "\" names no activity class: " + it->second);
    return *cls;
}

std::vector<TimelineEntry> inserted_entries(const HaystackSample& s) {
    std::vector<TimelineEntry> out;
    for (const auto& e : s.timeline)
        if (e.inserted)
            out.push_back(e);
    std::sort(out.begin(), out.end(),
              [](const TimelineEntry& a, const TimelineEntry& b) { return a.start_ms < b.start_ms; });
    return out;
}

ClockRange abs_range(const HaystackSample& s, int64_t start_ms, int64_t end_ms) {
    return ClockRange{ClockTime::of(s.start_clock_ms + start_ms).ms,
                      ClockTime::of(s.start_clock_ms + end_ms).ms};
}

TimelineEntry unique_of(const std::vector<TimelineEntry>& entries, ActivityClass cls,
                        const std::string& what) {
    std::optional<TimelineEntry> found;
    for (const auto& e : entries) {
        if (e.cls != cls)
            continue;
        if (found)
            throw DataError("more than one inserted " + what + " bout");
        found = e;
    }
    if (!found)
        throw DataError("no inserted " + what + " bout");
    return *found;
}

Answer recompute_comparison(const HaystackSample& s) {
    ActivityClass cls = slot_class(s, "activity");
    auto variant = comparison_template_variant(s.template_id);
    std::vector<TimelineEntry> bouts;
    for (const auto& e : inserted_entries(s))
        if (e.cls == cls)
            bouts.push_back(e);
    if (bouts.size() < 2)
        throw DataError("comparison needs at least two inserted bouts");

    auto pick = [](std::vector<std::pair<int64_t, int64_t>> spans, bool longest) {
        if (spans.empty())
            throw DataError("no candidate spans");
        std::pair<int64_t, int64_t> best = spans[0];
        int ties = 0;
        for (size_t i = 1; i < spans.size(); ++i) {
            int64_t d = spans[i].second - spans[i].first;
            int64_t bd = best.second - best.first;
            if (d == bd)
                ++ties;
            if (longest ? d > bd : d < bd) {
                best = spans[i];
                ties = 0;
            }
        }
        // Ties elsewhere in the list are fine; a tie with the winner is not.
        for (const auto& sp : spans)
            if (sp != best && sp.second - sp.first == best.second - best.first)
                throw DataError("extremum span is not unique");
        return best;
    };

    std::vector<std::pair<int64_t, int64_t>> spans;
    if (variant == ComparisonVariant::LongestBout || variant == ComparisonVariant::ShortestBout) {
        for (const auto& b : bouts)
            spans.push_back({b.start_ms, b.end_ms});
        auto best = pick(spans, variant == ComparisonVariant::LongestBout);
        return Answer::of_range(abs_range(s, best.first, best.second));
    }
    int64_t prev = 0;
    for (const auto& b : bouts) {
        if (b.start_ms > prev)
            spans.push_back({prev, b.start_ms});
        prev = b.end_ms;
    }
    int64_t win = window_ms_of(s);
    if (win > prev)
        spans.push_back({prev, win});
    auto best = pick(spans, variant == ComparisonVariant::LongestGap);
    return Answer::of_range(abs_range(s, best.first, best.second));
}

Answer recompute_multihop(const HaystackSample& s) {
    ActivityClass anchor_cls = slot_class(s, "anchor");
    ActivityClass target_cls = slot_class(s, "target");
    auto kit = s.slots.find("k_value");
    if (kit == s.slots.end())
        throw DataError("missing slot \"k_value\"");
    int64_t k = std::stoll(kit->second);
    if (k < 1)
        throw DataError("k_value must be positive");
    auto ins = inserted_entries(s);
    TimelineEntry anchor = unique_of(ins, anchor_cls, "anchor");
    bool after = multihop_template_after(s.template_id);
    std::vector<TimelineEntry> side;
    for (const auto& e : ins) {
        if (e.cls != target_cls)
            continue;
        if (after ? e.start_ms >= anchor.end_ms : e.end_ms <= anchor.start_ms)
            side.push_back(e);
    }
    if (!after)
        std::reverse(side.begin(), side.end()); // nearest to the anchor first
    if (std::cmp_greater(k, side.size()))
        throw DataError("fewer target bouts than the asked ordinal");
    const TimelineEntry& gold = side[static_cast<size_t>(k - 1)];
    return Answer::of_range(abs_range(s, gold.start_ms, gold.end_ms));
}

Answer recompute_anomaly(const HaystackSample& s, bool localize) {
    std::optional<Regime> bg;
    for (const auto& e : s.timeline) {
        if (e.inserted)
            continue;
        Regime r = regime_of(e.cls);
        if (bg && *bg != r)
            throw DataError("background mixes regimes");
        bg = r;
    }
    if (!bg)
        throw DataError("timeline has no background entries");
    std::vector<TimelineEntry> hits;
    for (const auto& e : inserted_entries(s))
        if (regime_of(e.cls) != *bg)
            hits.push_back(e);
    if (hits.empty())
        return Answer::compound(false, std::nullopt, std::nullopt);
    if (hits.size() > 1)
        throw DataError("more than one cross-regime insertion");
    std::optional<ClockRange> range;
    if (localize)
        range = abs_range(s, hits[0].start_ms, hits[0].end_ms);
    return Answer::compound(true, hits[0].cls, range);
}

} // namespace

Answer recompute_gold(const HaystackSample& s) {
    auto ins = inserted_entries(s);
    switch (s.task) {
    case TaskFamily::Existence: {
        ActivityClass cls = slot_class(s, "activity");
        bool found = std::any_of(ins.begin(), ins.end(),
                                 [&](const TimelineEntry& e) { return e.cls == cls; });
        return Answer::yes_no(found);
    }
    case TaskFamily::Localization: {
        TimelineEntry e = unique_of(ins, slot_class(s, "activity"), "target");
        return Answer::of_range(abs_range(s, e.start_ms, e.end_ms));
    }
    case TaskFamily::Counting: {
        ActivityClass cls = slot_class(s, "activity");
        auto n = std::count_if(ins.begin(), ins.end(),
                               [&](const TimelineEntry& e) { return e.cls == cls; });
        return Answer::integer(n);
    }
    case TaskFamily::Ordering: {
        TimelineEntry a = unique_of(ins, slot_class(s, "activity_a"), "first-named");
        TimelineEntry b = unique_of(ins, slot_class(s, "activity_b"), "second-named");
        bool a_first = a.start_ms < b.start_ms;
        bool before = ordering_template_asks_before(s.template_id);
        return Answer::yes_no(before ? a_first : !a_first);
    }
    case TaskFamily::StateQuery: {
        TimelineEntry needle = unique_of(ins, slot_class(s, "event"), "event");
        std::optional<ActivityClass> left;
        std::optional<ActivityClass> right;
        for (const auto& e : s.timeline) {
            if (e.inserted)
                continue;
            if (e.end_ms == needle.start_ms)
                left = e.cls;
            if (e.start_ms == needle.end_ms)
                right = e.cls;
        }
        if (!left || !right || *left != *right)
            throw DataError("event needle is not interior to one state region");
        return Answer::of_category(*left);
    }
    case TaskFamily::Antecedent: {
        TimelineEntry t = unique_of(ins, slot_class(s, "target"), "target");
        const TimelineEntry* cause = nullptr;
        for (const auto& e : ins) {
            if (e.end_ms > t.start_ms)
                continue;
            if (!cause || e.end_ms > cause->end_ms)
                cause = &e;
        }
        if (!cause)
            throw DataError("no inserted bout precedes the target");
        return Answer::of_category(cause->cls);
    }
    case TaskFamily::Comparison:
        return recompute_comparison(s);
    case TaskFamily::MultiHop:
        return recompute_multihop(s);
    case TaskFamily::AnomalyDetection:
        return recompute_anomaly(s, false);
    case TaskFamily::AnomalyLocalization:
        return recompute_anomaly(s, true);
    }
    throw DataError("unknown task family");
}

std::vector<std::string> check_sample(const HaystackSample& s, const TemplatePack* templates,
                                      const TaskConfig* cfg) {
    std::vector<std::string> problems;
    auto flag = [&](const std::string& p) { problems.push_back(s.id + ": " + p); };

    if (s.context_s <= 0.0 || s.rate <= 0.0) {
        flag("nonpositive context or rate");
        return problems;
    }
    if (s.template_id < 0 || s.template_id >= kTemplatesPerTask)
        flag("template id out of range");
    if (s.answer.kind != answer_kind_of(s.task))
        flag("answer kind does not match the task");

    int64_t win = window_ms_of(s);
    if (s.timeline.empty()) {
        flag("empty timeline");
        return problems;
    }
    int64_t cursor = 0;
    bool shape_ok = true;
    for (const auto& e : s.timeline) {
        if (e.start_ms != cursor || e.end_ms <= e.start_ms) {
            shape_ok = false;
            break;
        }
        cursor = e.end_ms;
    }
    if (!shape_ok || cursor != win)
        flag("timeline does not tile the window");

    if (cfg) {
        auto ctx = static_cast<int64_t>(std::llround(s.context_s * s.rate));
        auto [lo, hi] = needle_len_bounds(*cfg, ctx);
        for (const auto& e : s.timeline) {
            if (!e.inserted)
                continue;
            auto len = static_cast<int64_t>(
                std::llround(static_cast<double>(e.end_ms - e.start_ms) * s.rate / 1000.0));
            if (len < lo || len > hi) {
                flag("inserted bout of " + std::to_string(len) +
                     " samples outside the configured needle range");
                break;
            }
        }
    }

    if (templates) {
        try {
            auto expect = instantiate_template(templates->line(s.task, s.template_id), s.slots);
            if (expect != s.question)
                flag("question text does not match its template");
        } catch (const std::exception& e) {
            flag(std::string("template check failed: ") + e.what());
        }
    }

    try {
        Answer redo = recompute_gold(s);
        if (!(redo == s.answer))
            flag("stored gold answer disagrees with the timeline");
    } catch (const std::exception& e) {
        flag(std::string("gold recomputation failed: ") + e.what());
    }

    try {
        if (gold_answer_text(s) != s.answer_text)
            flag("answer text does not match the gold answer");
    } catch (const std::exception& e) {
        flag(std::string("answer text check failed: ") + e.what());
    }

    return problems;
}

} // namespace tshs
