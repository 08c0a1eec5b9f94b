#include "tshs/insertion.hpp"

#include "tshs/errors.hpp"
#include "tshs/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace tshs {

int64_t BlendSpec::effective_window(int64_t needle_len) const {
    if (window >= 0)
        return std::min(window, needle_len / 2);
    return std::min<int64_t>(25, needle_len / 4);
}

double blend_weight(int64_t t, int64_t w) {
    if (w < 1)
        throw DataError("blend window must be at least 1 sample");
    if (t < 0 || t > w)
        throw DataError("blend offset outside [0, w]");
    // cos(pi/2) is not exactly zero in floating point, so pin the points the
    // ramp is defined by.
    if (t == 0)
        return 0.0;
    if (t == w)
        return 1.0;
    if (2 * t == w)
        return 0.5;
    return 0.5 * (1.0 - std::cos(std::numbers::pi * static_cast<double>(t) / static_cast<double>(w)));
}

namespace {

// Same ramp but total outside the window: 1 past the end, 0 before the start.
double ramp(int64_t t, int64_t w) {
    if (w <= 0 || t >= w)
        return 1.0;
    if (t <= 0)
        return 0.0;
    return blend_weight(t, w);
}

} // namespace

void mean_align(Series3& needle, const Series3& target) {
    for (int c = 0; c < 3; ++c) {
        if (needle[c].empty() || target[c].empty())
            throw DataError("mean alignment over an empty channel");
        double needle_sum = 0.0, target_sum = 0.0;
        for (float v : needle[c])
            needle_sum += v;
        for (float v : target[c])
            target_sum += v;
        double shift = target_sum / static_cast<double>(target[c].size()) -
                       needle_sum / static_cast<double>(needle[c].size());
        // Diffuse the per-element rounding error forward so the channel sum
        // lands within one rounding step of the target, not n of them.
        double carry = 0.0;
        for (float& v : needle[c]) {
            double want = static_cast<double>(v) + shift + carry;
            float got = static_cast<float>(want);
            carry = want - static_cast<double>(got);
            v = got;
        }
    }
}

InsertionSpan insert_needle(Series3& background, Series3 needle, int64_t pos,
                            const BlendSpec& blend) {
    auto len = static_cast<int64_t>(needle[0].size());
    if (needle[1].size() != needle[0].size() || needle[2].size() != needle[0].size())
        throw DataError("needle channels differ in length");
    if (len == 0)
        throw DataError("empty needle");
    if (pos < 0 || pos + len > static_cast<int64_t>(background[0].size()))
        throw DataError("insertion outside background bounds");

    if (blend.align) {
        Series3 target;
        for (int c = 0; c < 3; ++c)
            target[c].assign(background[c].begin() + pos, background[c].begin() + pos + len);
        mean_align(needle, target);
    }

    int64_t w = blend.effective_window(len);
    for (int c = 0; c < 3; ++c) {
        for (int64_t t = 0; t < len; ++t) {
            double alpha = std::min(ramp(t, w), ramp(len - 1 - t, w));
            float bg = background[c][static_cast<size_t>(pos + t)];
            background[c][static_cast<size_t>(pos + t)] =
                static_cast<float>((1.0 - alpha) * bg + alpha * needle[c][static_cast<size_t>(t)]);
        }
    }
    return {pos, pos + len, w};
}

std::vector<int64_t> place_bouts(int64_t background_len, const std::vector<int64_t>& lengths,
                                 int64_t min_gap, double margin_frac, Rng& rng) {
    auto n = static_cast<int64_t>(lengths.size());
    if (n == 0)
        return {};
    int64_t total = 0;
    for (int64_t l : lengths) {
        if (l <= 0)
            throw PlacementInfeasible("non-positive bout length");
        total += l;
    }
    auto margin = static_cast<int64_t>(std::floor(margin_frac * static_cast<double>(background_len)));
    int64_t slack = background_len - 2 * margin - total - (n - 1) * min_gap;
    if (slack < 0)
        throw PlacementInfeasible("cannot fit " + std::to_string(n) + " bouts totalling " +
                                  std::to_string(total) + " samples into " +
                                  std::to_string(background_len));

    // Uniform layout via a random weak composition of the slack: n distinct
    // draws from [0, slack + n - 1] sorted give the cumulative extra gaps.
    std::set<int64_t> draws;
    auto bound = static_cast<uint64_t>(slack + n);
    while (std::cmp_less(draws.size(), n))
        draws.insert(static_cast<int64_t>(rng.below(bound)));

    std::vector<int64_t> positions;
    positions.reserve(static_cast<size_t>(n));
    int64_t prev_draw = -1;
    int64_t cursor = margin;
    size_t i = 0;
    for (int64_t d : draws) {
        int64_t extra = d - prev_draw - 1;
        prev_draw = d;
        cursor += extra;
        positions.push_back(cursor);
        cursor += lengths[i++] + min_gap;
    }
    return positions;
}

} // namespace tshs
