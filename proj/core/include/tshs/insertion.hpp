#pragma once

#include "tshs/recording.hpp"

#include <cstdint>
#include <vector>

namespace tshs {

class Rng;

struct BlendSpec {
    // Ramp width in samples; -1 picks min(25, needle_len / 4). 0 is a hard cut.
    int64_t window = -1;
    bool align = true;

    int64_t effective_window(int64_t needle_len) const;
};

// Half-cosine ramp: 0 at t=0, 1 at t=w. Requires w >= 1 and t in [0, w].
double blend_weight(int64_t t, int64_t w);

// Shift each channel so the needle's mean matches the target region's mean.
void mean_align(Series3& needle, const Series3& target);

struct InsertionSpan {
    int64_t start = 0;
    int64_t end = 0;
    int64_t blend_window = 0;
};

// Overwrite background[pos .. pos+len) with the needle, mean-aligned to the
// replaced region and cross-faded at both edges.
InsertionSpan insert_needle(Series3& background, Series3 needle, int64_t pos,
                            const BlendSpec& blend = {});

// Non-overlapping start positions for the given lengths, in order, keeping
// `min_gap` samples between insertions and `margin_frac` of the window clear
// at each end. Uniform over all feasible layouts; throws PlacementInfeasible
// when the lengths cannot fit.
std::vector<int64_t> place_bouts(int64_t background_len, const std::vector<int64_t>& lengths,
                                 int64_t min_gap, double margin_frac, Rng& rng);

} // namespace tshs
