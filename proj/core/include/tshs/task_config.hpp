#pragma once

#include "tshs/templates.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>

namespace tshs {

enum class BackgroundKind : uint8_t {
    Any,   // any fully annotated window
    Mixed, // multi-state window assembled from 2..5 activity regions
    Pure,  // window drawn from a single activity regime
};

const char* background_kind_name(BackgroundKind kind);
std::optional<BackgroundKind> background_kind_from_name(const std::string& name);

// Knobs for one task family. Fractions are relative to the context length in
// samples. Only the fields a family uses are meaningful for it.
struct TaskConfig {
    double needle_lo = 0.02;
    double needle_hi = 0.10;
    BackgroundKind background = BackgroundKind::Any;
    int distractors_lo = 1;
    int distractors_hi = 3;
    int bouts_lo = 1; // counting bouts / comparison bouts
    int bouts_hi = 5;
    double min_diff_frac = 0.02;               // comparison pairwise duration gap
    std::array<double, 3> k_weights = {0.4, 0.4, 0.2}; // multi-hop K = 1..3
    int opposite_distractors_hi = 2;           // multi-hop, uniform 0..hi
    int64_t adjacency_gap = 10;                // antecedent, in samples
    int states_lo = 2;                         // state query regions
    int states_hi = 5;
    double min_state_frac = 0.20;
    double margin_frac = 0.02; // keep-out at both window edges
};

TaskConfig default_task_config(TaskFamily task);

// Minimum spacing between inserted bouts: a fixed fraction of the context,
// capped at 100 samples so hour-scale windows don't demand huge gaps.
int64_t min_gap_samples(int64_t context_len);

void validate_task_config(const TaskConfig& cfg, TaskFamily task);

} // namespace tshs
