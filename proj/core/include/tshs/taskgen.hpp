#pragma once

#include "tshs/bouts.hpp"
#include "tshs/recording.hpp"
#include "tshs/sample.hpp"
#include "tshs/task_config.hpp"
#include "tshs/templates.hpp"

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace tshs {

class Rng;

// Uniform draw over every feasible (recording, start offset) pair for a given
// window length, restricted to fully annotated stretches ("any") or to
// stretches covered by a single activity regime ("pure").
class BackgroundSampler {
public:
    struct Draw {
        const Recording* rec = nullptr;
        int64_t offset = 0;
        Regime regime = Regime::Sedentary; // meaningful for pure windows only
    };

    static BackgroundSampler build(const Corpus& corpus, const std::set<std::string>& participants,
                                   int64_t window_len, BackgroundKind kind);

    bool empty() const { return total_ == 0; }
    int64_t feasible_windows() const { return total_; }
    Draw sample(Rng& rng) const;

private:
    struct Slot {
        const Recording* rec;
        int64_t run_start;
        int64_t count;
        Regime regime;
    };
    std::vector<Slot> slots_;
    std::vector<int64_t> cum_;
    int64_t total_ = 0;
};

// Classes of all annotations overlapping [start, end).
std::set<ActivityClass> classes_in_window(const Recording& rec, int64_t start, int64_t end);

// "2.56s", "10s", ... as used in sample ids.
std::string context_label(double context_s);

// Inclusive needle length bounds in samples for a context of ctx samples.
std::pair<int64_t, int64_t> needle_len_bounds(const TaskConfig& cfg, int64_t ctx);

struct GenInputs {
    const Corpus* corpus = nullptr;
    const BoutIndex* index = nullptr; // built over the same split participants
    const TemplatePack* templates = nullptr;
    const BackgroundSampler* any_bg = nullptr;  // for this context length
    const BackgroundSampler* pure_bg = nullptr; // likewise
    const std::set<std::string>* participants = nullptr;
    double rate = 50.0;
};

// Builds one fully populated sample (series included, series_ref set, blob not
// written). Deterministic in `seed`; `index` parity balances yes/no families.
HaystackSample generate_sample(const GenInputs& in, const TaskConfig& cfg, TaskFamily task,
                               double context_s, const std::string& split, int64_t index,
                               uint64_t seed);

} // namespace tshs
