#pragma once

#include "tshs/bouts.hpp"
#include "tshs/gbdt.hpp"
#include "tshs/insertion.hpp"
#include "tshs/recording.hpp"

#include <cstdint>
#include <vector>

namespace tshs {

// Windows are flattened channel-major (x then y then z) into one feature row.
struct DetectSet {
    Matrix train_x;
    std::vector<int> train_y;
    Matrix test_x;
    std::vector<int> test_y;
};

struct DetectSetSpec {
    int64_t window_len = 0;
    int train_windows = 5000;
    int test_windows = 500;
    double needle_lo = 0.02;
    double needle_hi = 0.08;
    double margin_frac = 0.02;
    BlendSpec blend;
    uint64_t seed = 77;
    int max_tries = 200;
};

// Positives carry one same-activity needle from another participant; the
// needle span stays inside a single class run of the background.
DetectSet build_detectability_set(const Corpus& corpus, const BoutIndex& index,
                                  const DetectSetSpec& spec);

struct DetectabilityConfig {
    std::vector<double> contexts_s = {2.0, 3.0};
    double rate = 100.0;
    int train_windows = 5000;
    int test_windows = 500;
    double needle_lo = 0.02;
    double needle_hi = 0.08;
    double margin_frac = 0.02;
    uint64_t seed = 77;
    GbdtParams gbdt;
    double auc_lo = 0.45;
    double auc_hi = 0.55;
    double control_min = 0.70;
};

struct ContextDetectReport {
    double context_s = 0.0;
    double auc_blended = 0.0;
    double auc_control = 0.0;
    bool pass_blended = false;
    bool pass_control = false;
};

struct DetectReport {
    std::vector<ContextDetectReport> contexts;
    bool pass = false;
};

// Per context: fit on blended insertions (expect chance AUC) and on raw
// unaligned hard-cut insertions (expect clearly detectable).
DetectReport run_detectability(const Corpus& corpus, const DetectabilityConfig& config);

} // namespace tshs
