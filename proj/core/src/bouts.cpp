#include "tshs/bouts.hpp"

#include "tshs/errors.hpp"
#include "tshs/rng.hpp"

#include <algorithm>
#include <utility>

namespace tshs {

namespace {

std::vector<Annotation> sorted_annotations(const Recording& rec) {
    std::vector<Annotation> anns = rec.annotations;
    std::sort(anns.begin(), anns.end(),
              [](const Annotation& a, const Annotation& b) { return a.start < b.start; });
    return anns;
}

} // namespace

std::vector<Bout> class_runs(const Recording& rec) {
    std::vector<Bout> runs;
    for (const auto& a : sorted_annotations(rec)) {
        if (a.end <= a.start)
            continue;
        if (!runs.empty() && runs.back().cls == a.cls && runs.back().end == a.start)
            runs.back().end = a.end;
        else
            runs.push_back({&rec, a.start, a.end, a.cls});
    }
    return runs;
}

std::vector<std::pair<int64_t, int64_t>> annotated_runs(const Recording& rec) {
    std::vector<std::pair<int64_t, int64_t>> runs;
    for (const auto& a : sorted_annotations(rec)) {
        if (a.end <= a.start)
            continue;
        if (!runs.empty() && runs.back().second == a.start)
            runs.back().second = a.end;
        else
            runs.emplace_back(a.start, a.end);
    }
    return runs;
}

std::vector<std::pair<int64_t, int64_t>> regime_runs(const Recording& rec, Regime regime) {
    std::vector<std::pair<int64_t, int64_t>> runs;
    for (const auto& a : sorted_annotations(rec)) {
        if (a.end <= a.start || regime_of(a.cls) != regime)
            continue;
        if (!runs.empty() && runs.back().second == a.start)
            runs.back().second = a.end;
        else
            runs.emplace_back(a.start, a.end);
    }
    return runs;
}

Series3 crop_series(const Recording& rec, int64_t start, int64_t length) {
    if (start < 0 || start + length > rec.length())
        throw DataError("crop outside recording bounds");
    Series3 out;
    for (int c = 0; c < 3; ++c)
        out[c].assign(rec.channels[c].begin() + start, rec.channels[c].begin() + start + length);
    return out;
}

BoutIndex BoutIndex::build(const Corpus& corpus, const std::set<std::string>& participants) {
    BoutIndex index;
    for (const auto& rec : corpus.recordings) {
        if (!participants.contains(rec.participant_id))
            continue;
        for (const auto& run : class_runs(rec))
            index.by_class_[static_cast<size_t>(run.cls)].push_back(run);
    }
    for (auto& list : index.by_class_) {
        std::sort(list.begin(), list.end(), [](const Bout& a, const Bout& b) {
            if (a.length() != b.length())
                return a.length() < b.length();
            if (a.rec->participant_id != b.rec->participant_id)
                return a.rec->participant_id < b.rec->participant_id;
            return a.start < b.start;
        });
    }
    return index;
}

namespace {

bool passes(const Bout& b, const BoutFilter& f) {
    if (f.only_participant && b.rec->participant_id != *f.only_participant)
        return false;
    if (f.exclude_participant && b.rec->participant_id == *f.exclude_participant)
        return false;
    return true;
}

} // namespace

bool BoutIndex::has_needle(ActivityClass cls, int64_t min_len, const BoutFilter& filter) const {
    for (const auto& b : bouts_of(cls))
        if (b.length() >= min_len && passes(b, filter))
            return true;
    return false;
}

int64_t BoutIndex::longest_bout(ActivityClass cls, const BoutFilter& filter) const {
    int64_t best = 0;
    for (const auto& b : bouts_of(cls))
        if (passes(b, filter))
            best = std::max(best, b.length());
    return best;
}

NeedleCrop BoutIndex::sample_needle(ActivityClass cls, int64_t length, Rng& rng,
                                    const BoutFilter& filter) const {
    const auto& list = bouts_of(cls);
    // Lists are sorted by length, so the qualifying bouts form a suffix.
    auto first = std::lower_bound(list.begin(), list.end(), length,
                                  [](const Bout& b, int64_t len) { return b.length() < len; });
    std::vector<const Bout*> eligible;
    for (auto it = first; it != list.end(); ++it)
        if (passes(*it, filter))
            eligible.push_back(&*it);
    if (eligible.empty())
        throw NeedleUnavailable("no " + class_name(cls) + " bout of at least " +
                                std::to_string(length) + " samples available");
    const Bout* bout = eligible[rng.below(eligible.size())];
    int64_t offset = bout->start + static_cast<int64_t>(rng.below(
                                       static_cast<uint64_t>(bout->length() - length + 1)));
    return {crop_series(*bout->rec, offset, length), bout->rec->participant_id, offset};
}

std::optional<ActivityClass> majority_label(const Recording& rec, int64_t start, int64_t end,
                                            double threshold, double* coverage) {
    if (end <= start || start < 0 || end > rec.length())
        return std::nullopt;
    int64_t counts[kNumClasses] = {};
    for (const auto& a : rec.annotations) {
        int64_t lo = std::max(start, a.start);
        int64_t hi = std::min(end, a.end);
        if (hi > lo)
            counts[static_cast<size_t>(a.cls)] += hi - lo;
    }
    int best = 0;
    for (int k = 1; k < kNumClasses; ++k)
        if (counts[k] > counts[best])
            best = k;
    double frac = static_cast<double>(counts[best]) / static_cast<double>(end - start);
    if (coverage)
        *coverage = frac;
    if (frac >= threshold && counts[best] > 0)
        return static_cast<ActivityClass>(best);
    return std::nullopt;
}

ClassifSlice slice_classification(const Corpus& corpus, const std::set<std::string>& participants,
                                  int64_t window_len, int64_t budget, double threshold,
                                  uint64_t seed) {
    if (window_len <= 0)
        throw ConfigError("window length must be positive");
    ClassifSlice slice;
    for (const auto& id : participants) {
        const Recording* rec = corpus.find(id);
        if (!rec)
            throw DataError("participant '" + id + "' not in corpus");
        int64_t tiles = rec->length() / window_len;
        for (int64_t w = 0; w < tiles; ++w) {
            int64_t start = w * window_len;
            double coverage = 0.0;
            if (auto label = majority_label(*rec, start, start + window_len, threshold, &coverage))
                slice.windows.push_back({id, start, window_len, *label, coverage});
        }
    }
    if (budget >= 0 && std::cmp_greater(slice.windows.size(), budget)) {
        Rng rng(hash_combine(seed, 0x534c494345ULL));
        rng.shuffle(slice.windows);
        slice.windows.resize(static_cast<size_t>(budget));
        slice.method = "random";
    } else {
        slice.method = "full";
    }
    return slice;
}

} // namespace tshs
