#pragma once

#include "tshs/recording.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace tshs {

class Rng;

struct Bout {
    const Recording* rec = nullptr;
    int64_t start = 0;
    int64_t end = 0;
    ActivityClass cls = ActivityClass::Sleep;

    int64_t length() const { return end - start; }
};

// Maximal same-class runs, with adjacent equal-class annotations merged.
std::vector<Bout> class_runs(const Recording& rec);

// Maximal stretches where every sample is annotated (any class).
std::vector<std::pair<int64_t, int64_t>> annotated_runs(const Recording& rec);

// Maximal stretches annotated entirely with classes of one regime.
std::vector<std::pair<int64_t, int64_t>> regime_runs(const Recording& rec, Regime regime);

Series3 crop_series(const Recording& rec, int64_t start, int64_t length);

struct NeedleCrop {
    Series3 data;
    std::string participant;
    int64_t source_start = 0;
};

struct BoutFilter {
    const std::string* only_participant = nullptr;
    const std::string* exclude_participant = nullptr;
};

class BoutIndex {
public:
    static BoutIndex build(const Corpus& corpus, const std::set<std::string>& participants);

    const std::vector<Bout>& bouts_of(ActivityClass cls) const {
        return by_class_[static_cast<size_t>(cls)];
    }

    // True if some bout of cls passing the filter has at least min_len samples.
    bool has_needle(ActivityClass cls, int64_t min_len, const BoutFilter& filter = {}) const;

    int64_t longest_bout(ActivityClass cls, const BoutFilter& filter = {}) const;

    // Uniform choice among long-enough bouts, then a uniform crop offset.
    // Throws NeedleUnavailable naming the class and length when none qualify.
    NeedleCrop sample_needle(ActivityClass cls, int64_t length, Rng& rng,
                             const BoutFilter& filter = {}) const;

private:
    std::array<std::vector<Bout>, kNumClasses> by_class_;
};

// Label of the window iff one class covers at least `threshold` of it
// (inclusive). Unannotated samples dilute every class's share. `coverage`
// receives the winning class's fraction even when below threshold.
std::optional<ActivityClass> majority_label(const Recording& rec, int64_t start, int64_t end,
                                            double threshold = 0.6,
                                            double* coverage = nullptr);

struct ClassifWindow {
    std::string participant;
    int64_t start = 0;
    int64_t length = 0;
    ActivityClass label = ActivityClass::Sleep;
    double coverage = 0.0;
};

struct ClassifSlice {
    std::vector<ClassifWindow> windows;
    std::string method; // "full" when the pool fits the budget, else "random"
};

// Non-overlapping tiled windows over each participant's recording, labelled by
// majority vote; pools larger than the budget are cut to a seeded shuffle
// prefix.
ClassifSlice slice_classification(const Corpus& corpus, const std::set<std::string>& participants,
                                  int64_t window_len, int64_t budget, double threshold,
                                  uint64_t seed);

} // namespace tshs
