#include "tshs/detect.hpp"

#include "tshs/errors.hpp"
#include "tshs/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace tshs {

namespace {

constexpr uint64_t kDetectTrainTag = 0x44545241ULL;
constexpr uint64_t kDetectTestTag = 0x44544553ULL;

struct WindowSampler {
    std::vector<const Recording*> recs;
    std::vector<int64_t> cum_offsets; // cumulative feasible start counts
    std::map<const Recording*, std::vector<Bout>> runs;
    int64_t window_len;

    WindowSampler(const Corpus& corpus, int64_t win) : window_len(win) {
        int64_t cum = 0;
        for (const auto& rec : corpus.recordings) {
            int64_t feasible = rec.length() - win + 1;
            if (feasible <= 0)
                continue;
            recs.push_back(&rec);
            cum += feasible;
            cum_offsets.push_back(cum);
            runs.emplace(&rec, class_runs(rec));
        }
        if (recs.empty())
            throw DataError("no recording long enough for the requested window");
    }

    std::pair<const Recording*, int64_t> sample(Rng& rng) const {
        auto pick = static_cast<int64_t>(rng.below(static_cast<uint64_t>(cum_offsets.back())));
        size_t idx = static_cast<size_t>(
            std::upper_bound(cum_offsets.begin(), cum_offsets.end(), pick) - cum_offsets.begin());
        int64_t base = idx == 0 ? 0 : cum_offsets[idx - 1];
        return {recs[idx], pick - base};
    }

    // Class run fully covering [start, end), if any.
    const Bout* covering_run(const Recording* rec, int64_t start, int64_t end) const {
        for (const auto& run : runs.at(rec)) {
            if (run.start <= start && run.end >= end)
                return &run;
            if (run.start > start)
                break;
        }
        return nullptr;
    }
};

void fill_row(Matrix& m, int64_t row, const Series3& window) {
    auto win = static_cast<int64_t>(window[0].size());
    for (int c = 0; c < 3; ++c)
        std::copy(window[c].begin(), window[c].end(),
                  m.data.begin() + row * m.cols + static_cast<int64_t>(c) * win);
}

void build_rows(const BoutIndex& index, const DetectSetSpec& spec,
                const WindowSampler& sampler, uint64_t tag, int count, Matrix& out_x,
                std::vector<int>& out_y) {
    int64_t win = spec.window_len;
    out_x = Matrix(count, 3 * win);
    out_y.assign(static_cast<size_t>(count), 0);
    for (int i = 0; i < count; ++i) {
        Rng rng(hash_combine(hash_combine(spec.seed, tag), static_cast<uint64_t>(i)));
        bool positive = (i % 2) == 0;
        out_y[static_cast<size_t>(i)] = positive ? 1 : 0;

        if (!positive) {
            auto [rec, off] = sampler.sample(rng);
            fill_row(out_x, i, crop_series(*rec, off, win));
            continue;
        }

        bool done = false;
        for (int attempt = 0; attempt < spec.max_tries && !done; ++attempt) {
            auto [rec, off] = sampler.sample(rng);
            double frac = rng.uniform(spec.needle_lo, spec.needle_hi);
            auto needle_len =
                std::max<int64_t>(1, static_cast<int64_t>(std::llround(frac * static_cast<double>(win))));
            int64_t pos;
            try {
                pos = place_bouts(win, {needle_len}, 0, spec.margin_frac, rng)[0];
            } catch (const PlacementInfeasible&) {
                continue;
            }
            const Bout* run = sampler.covering_run(rec, off + pos, off + pos + needle_len);
            if (!run)
                continue;
            BoutFilter filter;
            filter.exclude_participant = &rec->participant_id;
            if (!index.has_needle(run->cls, needle_len, filter))
                continue;
            NeedleCrop crop = index.sample_needle(run->cls, needle_len, rng, filter);
            Series3 window = crop_series(*rec, off, win);
            insert_needle(window, std::move(crop.data), pos, spec.blend);
            fill_row(out_x, i, window);
            done = true;
        }
        if (!done)
            throw DataError("could not build a positive detectability window after " +
                            std::to_string(spec.max_tries) + " tries");
    }
}

} // namespace

DetectSet build_detectability_set(const Corpus& corpus, const BoutIndex& index,
                                  const DetectSetSpec& spec) {
    if (spec.window_len <= 0)
        throw ConfigError("detectability window length must be positive");
    WindowSampler sampler(corpus, spec.window_len);
    DetectSet set;
    build_rows(index, spec, sampler, kDetectTrainTag, spec.train_windows, set.train_x,
               set.train_y);
    build_rows(index, spec, sampler, kDetectTestTag, spec.test_windows, set.test_x,
               set.test_y);
    return set;
}

DetectReport run_detectability(const Corpus& corpus, const DetectabilityConfig& config) {
    std::set<std::string> everyone;
    for (const auto& rec : corpus.recordings)
        everyone.insert(rec.participant_id);
    BoutIndex index = BoutIndex::build(corpus, everyone);

    DetectReport report;
    report.pass = true;
    for (double ctx : config.contexts_s) {
        DetectSetSpec spec;
        spec.window_len = static_cast<int64_t>(std::llround(ctx * config.rate));
        spec.train_windows = config.train_windows;
        spec.test_windows = config.test_windows;
        spec.needle_lo = config.needle_lo;
        spec.needle_hi = config.needle_hi;
        spec.margin_frac = config.margin_frac;
        spec.seed = hash_combine(config.seed, static_cast<uint64_t>(spec.window_len));

        ContextDetectReport ctx_report;
        ctx_report.context_s = ctx;

        DetectSet blended = build_detectability_set(corpus, index, spec);
        Gbdt model = Gbdt::fit(blended.train_x, blended.train_y, config.gbdt);
        ctx_report.auc_blended = mann_whitney_auc(model.predict_prob(blended.test_x), blended.test_y);

        DetectSetSpec raw_spec = spec;
        raw_spec.blend.align = false;
        raw_spec.blend.window = 0;
        DetectSet raw = build_detectability_set(corpus, index, raw_spec);
        Gbdt raw_model = Gbdt::fit(raw.train_x, raw.train_y, config.gbdt);
        ctx_report.auc_control = mann_whitney_auc(raw_model.predict_prob(raw.test_x), raw.test_y);

        ctx_report.pass_blended =
            ctx_report.auc_blended >= config.auc_lo && ctx_report.auc_blended <= config.auc_hi;
        ctx_report.pass_control = ctx_report.auc_control >= config.control_min;
        report.pass = report.pass && ctx_report.pass_blended && ctx_report.pass_control;
        report.contexts.push_back(ctx_report);
    }
    return report;
}

} // namespace tshs
