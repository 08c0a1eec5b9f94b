#pragma once

#include "tshs/recording.hpp"

#include <cstdint>

namespace tshs {

// Signal shape for one activity class. Amplitude and noise are global, not
// per participant; the only participant-specific term is a constant bias per
// channel. Mean alignment must remove everything participant-specific, so any
// other cross-participant variation would leak into the detectability check.
struct ClassSignal {
    float amplitude;
    float freq_lo;
    float freq_hi;
    float noise_sd;
};

const ClassSignal& class_signal(ActivityClass cls);

struct SynthSpec {
    int participants = 12;
    double minutes = 20.0;
    double rate = 100.0;
    uint64_t seed = 1;

    // Per-channel baseline offset: sign is a coin flip, magnitude is uniform
    // in [bias_lo, bias_hi]. Emulates mounting differences that land the
    // gravity component on different axes, so magnitudes sit near 1 g and
    // cross-participant steps are blunt.
    double bias_lo = 0.6;
    double bias_hi = 0.8;

    // Timeline structure: same-regime blocks subdivided into class bouts.
    double block_lo_s = 300.0;
    double block_hi_s = 900.0;
    double bout_lo_s = 10.0;
    double bout_hi_s = 600.0;

    // Fraction of bouts left without an annotation span.
    double unannotated_frac = 0.0;
};

std::string synth_participant_id(int index);

Recording synth_recording(const SynthSpec& spec, int index);

Corpus synth_corpus(const SynthSpec& spec);

} // namespace tshs
