#include "tshs/task_config.hpp"

#include "tshs/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tshs {

const char* background_kind_name(BackgroundKind kind) {
    switch (kind) {
    case BackgroundKind::Any: return "any";
    case BackgroundKind::Mixed: return "mixed";
    case BackgroundKind::Pure: return "pure";
    }
    return "?";
}

std::optional<BackgroundKind> background_kind_from_name(const std::string& name) {
    for (BackgroundKind kind : {BackgroundKind::Any, BackgroundKind::Mixed, BackgroundKind::Pure})
        if (name == background_kind_name(kind))
            return kind;
    return std::nullopt;
}

TaskConfig default_task_config(TaskFamily task) {
    TaskConfig cfg;
    switch (task) {
    case TaskFamily::Existence:
    case TaskFamily::Localization:
        cfg.needle_lo = 0.02;
        cfg.needle_hi = 0.10;
        break;
    case TaskFamily::Counting:
        cfg.needle_lo = 0.02;
        cfg.needle_hi = 0.08;
        cfg.bouts_lo = 1;
        cfg.bouts_hi = 5;
        break;
    case TaskFamily::Ordering:
        cfg.needle_lo = 0.02;
        cfg.needle_hi = 0.10;
        cfg.distractors_lo = 0;
        cfg.distractors_hi = 0;
        break;
    case TaskFamily::StateQuery:
        cfg.needle_lo = 0.01;
        cfg.needle_hi = 0.05;
        cfg.background = BackgroundKind::Mixed;
        break;
    case TaskFamily::Antecedent:
        cfg.needle_lo = 0.02;
        cfg.needle_hi = 0.08;
        break;
    case TaskFamily::Comparison:
        cfg.needle_lo = 0.02;
        cfg.needle_hi = 0.08;
        cfg.bouts_lo = 2;
        cfg.bouts_hi = 4;
        break;
    case TaskFamily::MultiHop:
        cfg.needle_lo = 0.02;
        cfg.needle_hi = 0.06;
        break;
    case TaskFamily::AnomalyDetection:
    case TaskFamily::AnomalyLocalization:
        cfg.needle_lo = 0.03;
        cfg.needle_hi = 0.15;
        cfg.background = BackgroundKind::Pure;
        break;
    }
    return cfg;
}

int64_t min_gap_samples(int64_t context_len) {
    auto frac = static_cast<int64_t>(std::floor(0.02 * static_cast<double>(context_len)));
    return std::min<int64_t>(frac, 100);
}

void validate_task_config(const TaskConfig& cfg, TaskFamily task) {
    auto fail = [&](const std::string& what) {
        throw ConfigError(task_name(task) + " config: " + what);
    };
    if (!(cfg.needle_lo > 0.0) || !(cfg.needle_hi < 1.0) || cfg.needle_lo > cfg.needle_hi)
        fail("needle fraction range must satisfy 0 < lo <= hi < 1");
    if (cfg.distractors_lo < 0 || cfg.distractors_lo > cfg.distractors_hi)
        fail("bad distractor range");
    if (cfg.bouts_lo < 1 || cfg.bouts_lo > cfg.bouts_hi)
        fail("bad bout count range");
    if (!(cfg.min_diff_frac > 0.0))
        fail("min_diff_frac must be positive");
    double wsum = cfg.k_weights[0] + cfg.k_weights[1] + cfg.k_weights[2];
    if (std::abs(wsum - 1.0) > 1e-9)
        fail("k_weights must sum to 1");
    if (cfg.opposite_distractors_hi < 0)
        fail("opposite_distractors_hi must be >= 0");
    if (cfg.adjacency_gap < 0)
        fail("adjacency_gap must be >= 0");
    if (cfg.states_lo < 2 || cfg.states_lo > cfg.states_hi || cfg.states_hi > 10)
        fail("state count range must lie in [2, 10]");
    if (!(cfg.min_state_frac > 0.0) ||
        cfg.min_state_frac * static_cast<double>(cfg.states_hi) > 1.0 + 1e-12)
        fail("min_state_frac infeasible for states_hi regions");
    if (cfg.margin_frac < 0.0 || cfg.margin_frac >= 0.5)
        fail("margin_frac must lie in [0, 0.5)");
}

} // namespace tshs
