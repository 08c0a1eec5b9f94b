#include "tshs/taskgen.hpp"

#include "tshs/clock.hpp"
#include "tshs/errors.hpp"
#include "tshs/insertion.hpp"
#include "tshs/prompts.hpp"
#include "tshs/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <utility>

namespace tshs {

BackgroundSampler BackgroundSampler::build(const Corpus& corpus,
                                           const std::set<std::string>& participants,
                                           int64_t window_len, BackgroundKind kind) {
    if (kind == BackgroundKind::Mixed)
        throw ConfigError("mixed backgrounds are assembled, not sampled");
    BackgroundSampler out;
    for (const auto& rec : corpus.recordings) {
        if (!participants.contains(rec.participant_id))
            continue;
        auto add_runs = [&](const std::vector<std::pair<int64_t, int64_t>>& runs, Regime regime) {
            for (const auto& [s, e] : runs) {
                int64_t count = e - s - window_len + 1;
                if (count <= 0)
                    continue;
                out.slots_.push_back({&rec, s, count, regime});
                out.total_ += count;
                out.cum_.push_back(out.total_);
            }
        };
        if (kind == BackgroundKind::Any) {
            add_runs(annotated_runs(rec), Regime::Sedentary);
        } else {
            add_runs(regime_runs(rec, Regime::Sedentary), Regime::Sedentary);
            add_runs(regime_runs(rec, Regime::Active), Regime::Active);
        }
    }
    return out;
}

BackgroundSampler::Draw BackgroundSampler::sample(Rng& rng) const {
    if (total_ == 0)
        throw DataError("no feasible background window for this context length");
    int64_t r = static_cast<int64_t>(rng.below(static_cast<uint64_t>(total_)));
    auto it = std::upper_bound(cum_.begin(), cum_.end(), r);
    size_t i = static_cast<size_t>(it - cum_.begin());
    int64_t base = i == 0 ? 0 : cum_[i - 1];
    const Slot& slot = slots_[i];
    return Draw{slot.rec, slot.run_start + (r - base), slot.regime};
}

std::set<ActivityClass> classes_in_window(const Recording& rec, int64_t start, int64_t end) {
    std::set<ActivityClass> out;
    for (const auto& a : rec.annotations) {
        if (a.end <= start || a.start >= end)
            continue;
        out.insert(a.cls);
    }
    return out;
}

std::string context_label(double context_s) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%gs", context_s);
    return buf;
}

std::pair<int64_t, int64_t> needle_len_bounds(const TaskConfig& cfg, int64_t ctx) {
    auto lo = static_cast<int64_t>(std::ceil(cfg.needle_lo * static_cast<double>(ctx)));
    auto hi = static_cast<int64_t>(std::floor(cfg.needle_hi * static_cast<double>(ctx)));
    lo = std::max<int64_t>(1, lo);
    hi = std::max<int64_t>(1, hi);
    if (lo > hi)
        lo = hi;
    return {lo, hi};
}

namespace {

constexpr int kMaxAttempts = 50;
constexpr int64_t kJoinBlend = 10; // crossfade width at assembly joins, samples

// Window-relative segment in samples; the working form of a timeline entry.
struct Seg {
    ActivityClass cls;
    int64_t s;
    int64_t e;
    bool inserted;

    int64_t length() const { return e - s; }
};

struct Draft {
    Series3 series;
    std::string participant;
    int64_t start_clock_ms = 0;
    std::vector<Seg> base;
    std::vector<Seg> inserted;
    std::set<ActivityClass> present;
    Regime bg_regime = Regime::Sedentary;
    int template_id = 0;
    std::map<std::string, std::string> slots;
    Answer answer;
};

int64_t draw_len(Rng& rng, const TaskConfig& cfg, int64_t ctx) {
    auto [lo, hi] = needle_len_bounds(cfg, ctx);
    auto len = static_cast<int64_t>(
        std::llround(rng.uniform(cfg.needle_lo, cfg.needle_hi) * static_cast<double>(ctx)));
    return std::clamp(len, lo, hi);
}

std::vector<ActivityClass> exclude(const std::vector<ActivityClass>& pool,
                                   const std::set<ActivityClass>& avoid) {
    std::vector<ActivityClass> out;
    for (auto cls : pool)
        if (!avoid.contains(cls))
            out.push_back(cls);
    return out;
}

std::vector<ActivityClass> pick_distinct(std::vector<ActivityClass> pool, size_t n, Rng& rng) {
    if (pool.size() < n)
        throw PlacementInfeasible("not enough candidate classes");
    rng.shuffle(pool);
    pool.resize(n);
    return pool;
}

std::vector<Seg> background_segments(const Recording& rec, int64_t off, int64_t ctx) {
    std::vector<Seg> out;
    for (const auto& run : class_runs(rec)) {
        int64_t s = std::max(run.start, off);
        int64_t e = std::min(run.end, off + ctx);
        if (s < e)
            out.push_back({run.cls, s - off, e - off, false});
    }
    return out;
}

Draft from_background(const BackgroundSampler& bg, Rng& rng, int64_t ctx) {
    auto draw = bg.sample(rng);
    const Recording& rec = *draw.rec;
    Draft d;
    d.series = crop_series(rec, draw.offset, ctx);
    d.participant = rec.participant_id;
    d.start_clock_ms =
        ClockTime::of(rec.start_clock_ms + sample_to_ms(draw.offset, rec.rate)).ms;
    d.base = background_segments(rec, draw.offset, ctx);
    for (const auto& seg : d.base)
        d.present.insert(seg.cls);
    d.bg_regime = draw.regime;
    return d;
}

// Sample cross-participant needles for each (position, length, class) triple
// and blend them into the draft's series.
void insert_all(Draft& d, const GenInputs& in, Rng& rng, const std::vector<int64_t>& positions,
                const std::vector<int64_t>& lengths, const std::vector<ActivityClass>& classes) {
    BoutFilter filter;
    filter.exclude_participant = &d.participant;
    for (size_t i = 0; i < positions.size(); ++i) {
        NeedleCrop crop = in.index->sample_needle(classes[i], lengths[i], rng, filter);
        insert_needle(d.series, std::move(crop.data), positions[i], BlendSpec{});
        d.inserted.push_back({classes[i], positions[i], positions[i] + lengths[i], true});
    }
}

ClockRange abs_range(const Draft& d, int64_t s, int64_t e, double rate) {
    return ClockRange{ClockTime::of(d.start_clock_ms + sample_to_ms(s, rate)).ms,
                      ClockTime::of(d.start_clock_ms + sample_to_ms(e, rate)).ms};
}

const Seg& find_inserted(const Draft& d, ActivityClass cls) {
    for (const auto& seg : d.inserted)
        if (seg.cls == cls)
            return seg;
    throw DataError("inserted segment not found");
}

// Existence and localization share their construction: pick a regime, insert
// the target plus same-regime distractor classes none of which occur in the
// background. A negative existence sample inserts only the distractors and
// asks about the held-out class.
Draft gen_presence(const GenInputs& in, const TaskConfig& cfg, Rng& rng, int64_t ctx,
                   int64_t index, bool localization) {
    Draft d = from_background(*in.any_bg, rng, ctx);
    bool positive = localization || index % 2 == 0;
    Regime regime = rng.coin() ? Regime::Active : Regime::Sedentary;
    auto pool = exclude(classes_in_regime(regime), d.present);
    if (pool.size() < 2) {
        regime = regime == Regime::Active ? Regime::Sedentary : Regime::Active;
        pool = exclude(classes_in_regime(regime), d.present);
        if (pool.size() < 2)
            throw PlacementInfeasible("background covers too many classes");
    }
    auto want = rng.range(cfg.distractors_lo, cfg.distractors_hi);
    auto dcount = std::min<int64_t>(want, static_cast<int64_t>(pool.size()) - 1);
    auto chosen = pick_distinct(pool, static_cast<size_t>(dcount) + 1, rng);
    ActivityClass asked = chosen[0];
    std::vector<ActivityClass> ins(chosen.begin() + (positive ? 0 : 1), chosen.end());
    rng.shuffle(ins);
    std::vector<int64_t> lengths;
    for (size_t i = 0; i < ins.size(); ++i)
        lengths.push_back(draw_len(rng, cfg, ctx));
    auto positions = place_bouts(ctx, lengths, min_gap_samples(ctx), cfg.margin_frac, rng);
    insert_all(d, in, rng, positions, lengths, ins);
    d.template_id = static_cast<int>(rng.below(kTemplatesPerTask));
    d.slots["activity"] = class_name(asked);
    if (localization) {
        const Seg& target = find_inserted(d, asked);
        d.answer = Answer::of_range(abs_range(d, target.s, target.e, in.rate));
    } else {
        d.answer = Answer::yes_no(positive);
    }
    return d;
}

Draft gen_counting(const GenInputs& in, const TaskConfig& cfg, Rng& rng, int64_t ctx) {
    Draft d = from_background(*in.any_bg, rng, ctx);
    auto pool = exclude(all_classes(), d.present);
    if (pool.empty())
        throw PlacementInfeasible("background covers every class");
    ActivityClass target = pool[rng.below(pool.size())];
    auto n = rng.range(cfg.bouts_lo, cfg.bouts_hi);
    std::vector<int64_t> lengths;
    for (int64_t i = 0; i < n; ++i)
        lengths.push_back(draw_len(rng, cfg, ctx));
    auto positions = place_bouts(ctx, lengths, min_gap_samples(ctx), cfg.margin_frac, rng);
    insert_all(d, in, rng, positions, lengths,
               std::vector<ActivityClass>(static_cast<size_t>(n), target));
    d.template_id = static_cast<int>(rng.below(kTemplatesPerTask));
    d.slots["activity"] = class_name(target);
    d.answer = Answer::integer(n);
    return d;
}

Draft gen_ordering(const GenInputs& in, const TaskConfig& cfg, Rng& rng, int64_t ctx,
                   int64_t index) {
    Draft d = from_background(*in.any_bg, rng, ctx);
    auto pool = exclude(all_classes(), d.present);
    auto pair = pick_distinct(pool, 2, rng);
    ActivityClass a = pair[0];
    ActivityClass b = pair[1];
    d.template_id = static_cast<int>(rng.below(kTemplatesPerTask));
    bool yes = index % 2 == 0;
    bool a_first = ordering_template_asks_before(d.template_id) ? yes : !yes;
    std::vector<int64_t> lengths = {draw_len(rng, cfg, ctx), draw_len(rng, cfg, ctx)};
    auto positions = place_bouts(ctx, lengths, min_gap_samples(ctx), cfg.margin_frac, rng);
    std::vector<ActivityClass> classes = a_first ? std::vector<ActivityClass>{a, b}
                                                 : std::vector<ActivityClass>{b, a};
    insert_all(d, in, rng, positions, lengths, classes);
    d.slots["activity_a"] = class_name(a);
    d.slots["activity_b"] = class_name(b);
    d.answer = Answer::yes_no(yes);
    return d;
}

// Appends `len` samples of `cls` drawn from one participant's bouts,
// crossfading a short overlap at every join so seams stay smooth.
void append_material(Series3& out, const GenInputs& in, ActivityClass cls,
                     const std::string& participant, int64_t len, Rng& rng,
                     const Recording** first_rec, int64_t* first_sample) {
    std::vector<const Bout*> mine;
    for (const auto& b : in.index->bouts_of(cls))
        if (b.rec->participant_id == participant)
            mine.push_back(&b);
    if (mine.empty())
        throw NeedleUnavailable("no " + class_name(cls) + " bout for " + participant);
    int64_t rem = len;
    while (rem > 0) {
        const Bout& b = *mine[rng.below(mine.size())];
        int64_t chunk = std::min(rem, b.length());
        int64_t off = b.start + rng.range(0, b.length() - chunk);
        int64_t have = static_cast<int64_t>(out[0].size());
        int64_t lead = std::min({kJoinBlend, off - b.start, have});
        Series3 crop = crop_series(*b.rec, off - lead, lead + chunk);
        if (first_rec && *first_rec == nullptr) {
            *first_rec = b.rec;
            *first_sample = off;
        }
        for (int c = 0; c < 3; ++c) {
            auto& dst = out[c];
            const auto& src = crop[c];
            for (int64_t i = 0; i < lead; ++i) {
                double alpha =
                    0.5 * (1.0 - std::cos(std::numbers::pi * static_cast<double>(i + 1) /
                                          static_cast<double>(lead + 1)));
                auto& sample = dst[static_cast<size_t>(have - lead + i)];
                sample = static_cast<float>((1.0 - alpha) * sample +
                                            alpha * static_cast<double>(src[static_cast<size_t>(i)]));
            }
            dst.insert(dst.end(), src.begin() + lead, src.end());
        }
        rem -= chunk;
    }
}

Draft gen_state_query(const GenInputs& in, const TaskConfig& cfg, Rng& rng, int64_t ctx) {
    auto n_states = rng.range(cfg.states_lo, cfg.states_hi);
    std::vector<std::string> parts(in.participants->begin(), in.participants->end());
    if (parts.empty())
        throw DataError("empty participant pool");
    const std::string participant = parts[rng.below(parts.size())];

    BoutFilter only;
    only.only_participant = &participant;
    std::vector<ActivityClass> avail;
    for (auto cls : all_classes())
        if (in.index->has_needle(cls, 1, only))
            avail.push_back(cls);
    auto states = pick_distinct(avail, static_cast<size_t>(n_states), rng);

    // Region shares: everyone gets the floor, the rest is split at random.
    double spare = 1.0 - cfg.min_state_frac * static_cast<double>(n_states);
    std::vector<double> u(static_cast<size_t>(n_states));
    double usum = 0.0;
    for (auto& x : u) {
        x = rng.uniform();
        usum += x;
    }
    std::vector<int64_t> lengths;
    int64_t assigned = 0;
    for (int64_t i = 0; i < n_states; ++i) {
        double frac = cfg.min_state_frac + (usum > 0.0 ? spare * u[static_cast<size_t>(i)] / usum : 0.0);
        auto l = static_cast<int64_t>(std::floor(frac * static_cast<double>(ctx)));
        lengths.push_back(std::max<int64_t>(1, l));
        assigned += lengths.back();
    }
    for (int64_t i = 0; assigned < ctx; i = (i + 1) % n_states, ++assigned)
        ++lengths[static_cast<size_t>(i)];
    while (assigned > ctx) { // floors can only undershoot, but stay safe
        for (auto& l : lengths)
            if (assigned > ctx && l > 1) {
                --l;
                --assigned;
            }
    }

    Draft d;
    d.participant = participant;
    const Recording* first_rec = nullptr;
    int64_t first_sample = 0;
    int64_t cursor = 0;
    for (int64_t i = 0; i < n_states; ++i) {
        auto len = lengths[static_cast<size_t>(i)];
        append_material(d.series, in, states[static_cast<size_t>(i)], participant, len, rng,
                        &first_rec, &first_sample);
        d.base.push_back({states[static_cast<size_t>(i)], cursor, cursor + len, false});
        cursor += len;
    }
    d.start_clock_ms =
        ClockTime::of(first_rec->start_clock_ms + sample_to_ms(first_sample, first_rec->rate)).ms;
    d.present.insert(states.begin(), states.end());

    auto pool = exclude(all_classes(), d.present);
    if (pool.empty())
        throw PlacementInfeasible("no class left for the event needle");
    ActivityClass event = pool[rng.below(pool.size())];
    int64_t nlen = draw_len(rng, cfg, ctx);
    auto margin = static_cast<int64_t>(std::floor(cfg.margin_frac * static_cast<double>(ctx)));

    // The needle must sit strictly inside a single region and clear of the
    // window margins.
    struct Slot {
        size_t region;
        int64_t lo;
        int64_t hi;
    };
    std::vector<Slot> feasible;
    for (size_t i = 0; i < d.base.size(); ++i) {
        int64_t lo = std::max(d.base[i].s + 1, margin);
        int64_t hi = std::min(d.base[i].e - nlen - 1, ctx - margin - nlen);
        if (lo <= hi)
            feasible.push_back({i, lo, hi});
    }
    if (feasible.empty())
        throw PlacementInfeasible("no region can hold the event needle");
    const Slot slot = feasible[rng.below(feasible.size())];
    int64_t pos = rng.range(slot.lo, slot.hi);

    BoutFilter cross;
    cross.exclude_participant = &participant;
    NeedleCrop crop = in.index->sample_needle(event, nlen, rng, cross);
    insert_needle(d.series, std::move(crop.data), pos, BlendSpec{});
    d.inserted.push_back({event, pos, pos + nlen, true});

    d.template_id = static_cast<int>(rng.below(kTemplatesPerTask));
    d.slots["event"] = class_name(event);
    d.answer = Answer::of_category(d.base[slot.region].cls);
    return d;
}

Draft gen_antecedent(const GenInputs& in, const TaskConfig& cfg, Rng& rng, int64_t ctx) {
    Draft d = from_background(*in.any_bg, rng, ctx);
    auto pool = exclude(all_classes(), d.present);
    auto pair = pick_distinct(pool, 2, rng);
    ActivityClass cause = pair[0];
    ActivityClass target = pair[1];
    int64_t len_a = draw_len(rng, cfg, ctx);
    int64_t len_t = draw_len(rng, cfg, ctx);
    int64_t combined = len_a + cfg.adjacency_gap + len_t;
    auto anchor = place_bouts(ctx, {combined}, min_gap_samples(ctx), cfg.margin_frac, rng)[0];
    insert_all(d, in, rng, {anchor, anchor + len_a + cfg.adjacency_gap}, {len_a, len_t},
               {cause, target});
    d.template_id = static_cast<int>(rng.below(kTemplatesPerTask));
    d.slots["target"] = class_name(target);
    d.answer = Answer::of_category(cause);
    return d;
}

Draft gen_comparison(const GenInputs& in, const TaskConfig& cfg, Rng& rng, int64_t ctx,
                     double rate) {
    Draft d = from_background(*in.any_bg, rng, ctx);
    auto pool = exclude(all_classes(), d.present);
    if (pool.empty())
        throw PlacementInfeasible("background covers every class");
    ActivityClass target = pool[rng.below(pool.size())];

    auto [blo, bhi] = needle_len_bounds(cfg, ctx);
    auto min_diff =
        std::max<int64_t>(1, static_cast<int64_t>(std::floor(cfg.min_diff_frac *
                                                             static_cast<double>(ctx))));
    auto n = rng.range(cfg.bouts_lo, cfg.bouts_hi);
    while (n > cfg.bouts_lo && blo + (n - 1) * min_diff > bhi)
        --n;
    if (blo + (n - 1) * min_diff > bhi)
        throw DataError("context too short for distinct comparison bouts");
    int64_t max_extra = bhi - blo - (n - 1) * min_diff;

    std::vector<int64_t> extras;
    for (int64_t i = 0; i < n; ++i)
        extras.push_back(static_cast<int64_t>(
            std::llround(rng.uniform() * static_cast<double>(max_extra))));
    std::sort(extras.begin(), extras.end());
    std::vector<int64_t> lengths;
    for (int64_t i = 0; i < n; ++i)
        lengths.push_back(blo + i * min_diff + extras[static_cast<size_t>(i)]);
    rng.shuffle(lengths);

    // Gap questions need a unique extremum, so redraw layouts until every
    // uncovered stretch (window edges included) has a distinct length.
    std::vector<int64_t> positions;
    for (int attempt = 0;; ++attempt) {
        positions = place_bouts(ctx, lengths, min_gap_samples(ctx), cfg.margin_frac, rng);
        std::vector<int64_t> gaps;
        int64_t prev = 0;
        for (size_t i = 0; i < positions.size(); ++i) {
            gaps.push_back(positions[i] - prev);
            prev = positions[i] + lengths[i];
        }
        gaps.push_back(ctx - prev);
        std::erase(gaps, 0);
        std::sort(gaps.begin(), gaps.end());
        if (std::adjacent_find(gaps.begin(), gaps.end()) == gaps.end())
            break;
        if (attempt >= 20)
            throw PlacementInfeasible("could not draw distinct gaps");
    }

    insert_all(d, in, rng, positions, lengths,
               std::vector<ActivityClass>(static_cast<size_t>(n), target));
    d.template_id = static_cast<int>(rng.below(kTemplatesPerTask));
    d.slots["activity"] = class_name(target);

    auto variant = comparison_template_variant(d.template_id);
    int64_t gs = 0;
    int64_t ge = 0;
    if (variant == ComparisonVariant::LongestBout || variant == ComparisonVariant::ShortestBout) {
        bool longest = variant == ComparisonVariant::LongestBout;
        const Seg* best = nullptr;
        for (const auto& seg : d.inserted) {
            if (!best || (longest ? seg.length() > best->length()
                                  : seg.length() < best->length()))
                best = &seg;
        }
        gs = best->s;
        ge = best->e;
    } else {
        bool longest = variant == ComparisonVariant::LongestGap;
        int64_t prev = 0;
        std::optional<std::pair<int64_t, int64_t>> best;
        auto consider = [&](int64_t s, int64_t e) {
            if (e <= s)
                return;
            if (!best || (longest ? e - s > best->second - best->first
                                  : e - s < best->second - best->first))
                best = {s, e};
        };
        for (const auto& seg : d.inserted) {
            consider(prev, seg.s);
            prev = seg.e;
        }
        consider(prev, ctx);
        gs = best->first;
        ge = best->second;
    }
    d.answer = Answer::of_range(abs_range(d, gs, ge, rate));
    return d;
}

Draft gen_multihop(const GenInputs& in, const TaskConfig& cfg, Rng& rng, int64_t ctx,
                   double rate) {
    Draft d = from_background(*in.any_bg, rng, ctx);
    auto pool = exclude(all_classes(), d.present);
    auto pair = pick_distinct(pool, 2, rng);
    ActivityClass anchor = pair[0];
    ActivityClass target = pair[1];
    auto k = static_cast<int64_t>(rng.weighted(cfg.k_weights)) + 1;
    auto opp = rng.range(0, cfg.opposite_distractors_hi);
    d.template_id = static_cast<int>(rng.below(kTemplatesPerTask));
    bool after = multihop_template_after(d.template_id);

    std::vector<ActivityClass> layout;
    for (int64_t i = 0; i < (after ? opp : k); ++i)
        layout.push_back(target);
    layout.push_back(anchor);
    for (int64_t i = 0; i < (after ? k : opp); ++i)
        layout.push_back(target);

    std::vector<int64_t> lengths;
    for (size_t i = 0; i < layout.size(); ++i)
        lengths.push_back(draw_len(rng, cfg, ctx));
    auto positions = place_bouts(ctx, lengths, min_gap_samples(ctx), cfg.margin_frac, rng);
    insert_all(d, in, rng, positions, lengths, layout);

    const Seg& gold = after ? d.inserted[static_cast<size_t>(opp + k)] : d.inserted[0];
    d.slots["anchor"] = class_name(anchor);
    d.slots["target"] = class_name(target);
    d.slots["k"] = cardinal_word(static_cast<int>(k));
    d.slots["k_ord"] = ordinal_word(static_cast<int>(k));
    d.slots["k_value"] = std::to_string(k);
    d.answer = Answer::of_range(abs_range(d, gold.s, gold.e, rate));
    return d;
}

Draft gen_anomaly(const GenInputs& in, const TaskConfig& cfg, Rng& rng, int64_t ctx,
                  int64_t index, bool localize, double rate) {
    Draft d = from_background(*in.pure_bg, rng, ctx);
    bool positive = index % 2 == 0;
    Regime bg = d.bg_regime;
    Regime other = bg == Regime::Sedentary ? Regime::Active : Regime::Sedentary;

    auto want = rng.range(cfg.distractors_lo, cfg.distractors_hi);
    auto fresh = exclude(classes_in_regime(bg), d.present);
    rng.shuffle(fresh);
    std::vector<ActivityClass> distractors;
    for (auto cls : fresh) {
        if (std::cmp_less(distractors.size(), want))
            distractors.push_back(cls);
    }
    if (std::cmp_less(distractors.size(), want)) {
        auto seen = classes_in_regime(bg);
        std::erase_if(seen, [&](ActivityClass c) {
            return std::find(distractors.begin(), distractors.end(), c) != distractors.end();
        });
        rng.shuffle(seen);
        for (auto cls : seen)
            if (std::cmp_less(distractors.size(), want))
                distractors.push_back(cls);
    }
    if (distractors.empty())
        throw PlacementInfeasible("no distractor classes available");

    auto anomalies = classes_in_regime(other);
    ActivityClass anomaly = anomalies[rng.below(anomalies.size())];

    std::vector<ActivityClass> ins = distractors;
    if (positive)
        ins.push_back(anomaly);
    rng.shuffle(ins);
    std::vector<int64_t> lengths;
    for (size_t i = 0; i < ins.size(); ++i)
        lengths.push_back(draw_len(rng, cfg, ctx));
    auto positions = place_bouts(ctx, lengths, min_gap_samples(ctx), cfg.margin_frac, rng);
    insert_all(d, in, rng, positions, lengths, ins);
    d.template_id = static_cast<int>(rng.below(kTemplatesPerTask));

    if (!positive) {
        d.answer = Answer::compound(false, std::nullopt, std::nullopt);
    } else {
        const Seg* hit = nullptr;
        for (const auto& seg : d.inserted)
            if (regime_of(seg.cls) != bg)
                hit = &seg;
        std::optional<ClockRange> range;
        if (localize)
            range = abs_range(d, hit->s, hit->e, rate);
        d.answer = Answer::compound(true, hit->cls, range);
    }
    return d;
}

std::vector<Seg> carve(const std::vector<Seg>& base, const std::vector<Seg>& ins) {
    std::vector<Seg> out;
    for (const auto& b : base) {
        std::vector<Seg> pieces{b};
        for (const auto& iv : ins) {
            std::vector<Seg> next;
            for (const auto& p : pieces) {
                if (iv.e <= p.s || iv.s >= p.e) {
                    next.push_back(p);
                    continue;
                }
                if (iv.s > p.s)
                    next.push_back({p.cls, p.s, iv.s, false});
                if (iv.e < p.e)
                    next.push_back({p.cls, iv.e, p.e, false});
            }
            pieces = std::move(next);
        }
        out.insert(out.end(), pieces.begin(), pieces.end());
    }
    return out;
}

HaystackSample finalize(Draft&& d, const GenInputs& in, TaskFamily task, double context_s,
                        const std::string& split, int64_t index, uint64_t seed, int64_t ctx) {
    auto segs = carve(d.base, d.inserted);
    segs.insert(segs.end(), d.inserted.begin(), d.inserted.end());
    std::sort(segs.begin(), segs.end(), [](const Seg& a, const Seg& b) { return a.s < b.s; });
    int64_t cursor = 0;
    for (const auto& seg : segs) {
        if (seg.s != cursor)
            throw DataError("timeline gap at sample " + std::to_string(cursor));
        cursor = seg.e;
    }
    if (cursor != ctx)
        throw DataError("timeline does not cover the window");

    HaystackSample s;
    s.task = task;
    s.context_s = context_s;
    s.rate = in.rate;
    s.split = split;
    s.index = index;
    s.participant = d.participant;
    s.start_clock_ms = d.start_clock_ms;
    s.template_id = d.template_id;
    s.seed = seed;
    s.slots = d.slots;
    s.answer = d.answer;
    for (const auto& seg : segs)
        s.timeline.push_back({seg.cls, sample_to_ms(seg.s, in.rate), sample_to_ms(seg.e, in.rate),
                              seg.inserted});
    s.question = instantiate_template(in.templates->line(task, d.template_id), d.slots);
    s.answer_text = gold_answer_text(s);
    char idx[16];
    std::snprintf(idx, sizeof(idx), "%06lld", static_cast<long long>(index));
    s.id = task_name(task) + "_" + context_label(context_s) + "_" + split + "_" + idx;
    s.series_ref = "series/" + s.id + ".tshs";
    s.series = std::move(d.series);
    return s;
}

} // namespace

HaystackSample generate_sample(const GenInputs& in, const TaskConfig& cfg, TaskFamily task,
                               double context_s, const std::string& split, int64_t index,
                               uint64_t seed) {
    validate_task_config(cfg, task);
    auto ctx = static_cast<int64_t>(std::llround(context_s * in.rate));
    if (ctx < 16)
        throw ConfigError("context of " + std::to_string(ctx) + " samples is too short");
    Rng rng(seed);
    std::string last_error;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        try {
            Draft d;
            switch (task) {
            case TaskFamily::Existence:
                d = gen_presence(in, cfg, rng, ctx, index, false);
                break;
            case TaskFamily::Localization:
                d = gen_presence(in, cfg, rng, ctx, index, true);
                break;
            case TaskFamily::Counting:
                d = gen_counting(in, cfg, rng, ctx);
                break;
            case TaskFamily::Ordering:
                d = gen_ordering(in, cfg, rng, ctx, index);
                break;
            case TaskFamily::StateQuery:
                d = gen_state_query(in, cfg, rng, ctx);
                break;
            case TaskFamily::Antecedent:
                d = gen_antecedent(in, cfg, rng, ctx);
                break;
            case TaskFamily::Comparison:
                d = gen_comparison(in, cfg, rng, ctx, in.rate);
                break;
            case TaskFamily::MultiHop:
                d = gen_multihop(in, cfg, rng, ctx, in.rate);
                break;
            case TaskFamily::AnomalyDetection:
                d = gen_anomaly(in, cfg, rng, ctx, index, false, in.rate);
                break;
            case TaskFamily::AnomalyLocalization:
                d = gen_anomaly(in, cfg, rng, ctx, index, true, in.rate);
                break;
            }
            return finalize(std::move(d), in, task, context_s, split, index, seed, ctx);
        } catch (const NeedleUnavailable& e) {
            last_error = e.what();
        } catch (const PlacementInfeasible& e) {
            last_error = e.what();
        }
    }
    throw DataError("gave up generating " + task_name(task) + " sample (context " +
                    context_label(context_s) + ", split " + split + ", index " +
                    std::to_string(index) + ") after " + std::to_string(kMaxAttempts) +
                    " attempts; last problem: " + last_error);
}

} // namespace tshs
