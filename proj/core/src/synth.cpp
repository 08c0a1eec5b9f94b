#include "tshs/synth.hpp"

#include "tshs/clock.hpp"
#include "tshs/rng.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace tshs {

namespace {

// amplitude, freq band (Hz), noise sd. Ordered by class index. Sedentary
// classes sit near the baseline; active classes oscillate visibly.
constexpr ClassSignal kClassSignals[kNumClasses] = {
    {0.02f, 0.10f, 0.30f, 0.010f}, // sleep
    {0.05f, 0.20f, 0.50f, 0.020f}, // sitting
    {0.08f, 0.30f, 0.70f, 0.030f}, // standing
    {0.15f, 1.50f, 3.00f, 0.080f}, // vehicle
    {0.50f, 1.50f, 2.50f, 0.100f}, // walking
    {0.40f, 0.80f, 1.80f, 0.150f}, // mixed-activity
    {0.55f, 1.00f, 2.00f, 0.120f}, // bicycling
    {0.45f, 0.50f, 1.50f, 0.180f}, // manual-work
    {0.80f, 2.00f, 3.50f, 0.220f}, // sports
    {0.30f, 0.70f, 1.40f, 0.130f}, // household-chores
};

constexpr uint64_t kSynthTag = 0x53594e5448ULL;

double log_uniform(Rng& rng, double lo, double hi) {
    return std::exp(rng.uniform(std::log(lo), std::log(hi)));
}

} // namespace

const ClassSignal& class_signal(ActivityClass cls) {
    return kClassSignals[static_cast<size_t>(cls)];
}

std::string synth_participant_id(int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "P%03d", index);
    return buf;
}

Recording synth_recording(const SynthSpec& spec, int index) {
    Rng rng(hash_string(hash_combine(spec.seed, kSynthTag), synth_participant_id(index)));

    Recording rec;
    rec.participant_id = synth_participant_id(index);
    rec.rate = spec.rate;
    rec.start_clock_ms = (rng.next_u64() % static_cast<uint64_t>(kMsPerDay / 1000)) * 1000;

    auto total = static_cast<int64_t>(std::llround(spec.minutes * 60.0 * spec.rate));
    for (auto& ch : rec.channels)
        ch.assign(static_cast<size_t>(total), 0.0f);

    float bias[3];
    for (float& b : bias) {
        double mag = rng.uniform(spec.bias_lo, spec.bias_hi);
        b = static_cast<float>(rng.coin() ? mag : -mag);
    }

    int64_t t = 0;
    while (t < total) {
        Regime regime = rng.coin() ? Regime::Sedentary : Regime::Active;
        auto block_len =
            static_cast<int64_t>(std::llround(log_uniform(rng, spec.block_lo_s, spec.block_hi_s) * spec.rate));
        int64_t block_end = std::min(t + block_len, total);
        const auto& pool = classes_in_regime(regime);
        while (t < block_end) {
            ActivityClass cls = pool[rng.below(pool.size())];
            auto bout_len =
                static_cast<int64_t>(std::llround(log_uniform(rng, spec.bout_lo_s, spec.bout_hi_s) * spec.rate));
            int64_t bout_end = std::min(t + bout_len, block_end);
            if (bout_end <= t)
                bout_end = t + 1;

            const ClassSignal& sig = class_signal(cls);
            double freq = rng.uniform(sig.freq_lo, sig.freq_hi);
            double omega = 2.0 * std::numbers::pi * freq / spec.rate;
            double phase[3];
            for (double& p : phase)
                p = rng.uniform(0.0, 2.0 * std::numbers::pi);
            for (int c = 0; c < 3; ++c) {
                auto& ch = rec.channels[c];
                for (int64_t i = t; i < bout_end; ++i) {
                    double v = bias[c] + sig.amplitude * std::sin(omega * static_cast<double>(i) + phase[c]) +
                               sig.noise_sd * rng.normal();
                    ch[static_cast<size_t>(i)] = static_cast<float>(v);
                }
            }
            if (spec.unannotated_frac <= 0.0 || rng.uniform() >= spec.unannotated_frac)
                rec.annotations.push_back({t, bout_end, cls});
            t = bout_end;
        }
    }
    return rec;
}

Corpus synth_corpus(const SynthSpec& spec) {
    Corpus corpus;
    corpus.recordings.reserve(static_cast<size_t>(spec.participants));
    for (int i = 0; i < spec.participants; ++i)
        corpus.recordings.push_back(synth_recording(spec, i));
    return corpus;
}

} // namespace tshs
