#pragma once

#include "tshs/sample.hpp"
#include "tshs/task_config.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tshs {

enum class RangeRule : uint8_t { Iou, AbsTolerance };

struct ScoreRule {
    RangeRule kind = RangeRule::Iou;
    double iou_threshold = 0.5;
    double abs_tolerance_s = 10.0;
};

enum class ParseStatus : uint8_t { Ok, MissingMarker, Unparseable };

struct ParsedAnswer {
    ParseStatus status = ParseStatus::MissingMarker;
    Answer value;
    std::string payload; // text after the last "Answer:" marker
};

// Text after the last "Answer:" marker, whitespace-trimmed.
std::optional<std::string> answer_payload(const std::string& transcript);

ParsedAnswer parse_answer(const std::string& transcript, AnswerKind kind);

// Overlap-over-union of two clock ranges on the circular day.
double range_iou(const ClockRange& gold, const ClockRange& pred);

bool range_matches(const ClockRange& gold, const ClockRange& pred, const ScoreRule& rule);

bool score_sample(const ParsedAnswer& pred, const Answer& gold, const ScoreRule& rule);

struct SampleScore {
    std::string id;
    TaskFamily task = TaskFamily::Existence;
    double context_s = 0.0;
    ParseStatus status = ParseStatus::MissingMarker;
    bool correct = false;
    std::optional<ActivityClass> pred_category;
    std::optional<ActivityClass> gold_category;
};

SampleScore score_one(const HaystackSample& gold, const std::string& transcript,
                      const ScoreRule& rule);

struct BaselineResult {
    double pct = 0.0;
    bool closed_form = false;
    double ci_lo = 0.0; // 95% interval, Monte-Carlo results only
    double ci_hi = 0.0;
    int trials = 0;
};

// Chance accuracy for a guesser that knows the answer format but not the
// data. Boolean, integer and category tasks have exact values; time-range and
// compound tasks are simulated under the active rule.
BaselineResult random_baseline(TaskFamily task, const TaskConfig& cfg, int n_mc, uint64_t seed,
                               const ScoreRule& rule);

// Always-simulated variant, used to cross-check the closed forms and to probe
// alternative rules at a specific window length.
BaselineResult monte_carlo_baseline(TaskFamily task, const TaskConfig& cfg, int n_mc,
                                    uint64_t seed, const ScoreRule& rule, double context_s);

// Unweighted mean of per-class F1 over the classes appearing in `golds`.
// Labels are small nonnegative ints; negative predictions mean "no parse" and
// can never match. 0/0 ratios count as 0.
double macro_f1(const std::vector<int>& preds, const std::vector<int>& golds);
double balanced_accuracy(const std::vector<int>& preds, const std::vector<int>& golds);

struct CellScore {
    TaskFamily task = TaskFamily::Existence;
    double context_s = 0.0;
    int total = 0;
    int correct = 0;
    int missing_marker = 0;
    int unparseable = 0;
    double accuracy_pct = 0.0;
    std::optional<double> macro_f1;
    std::optional<double> balanced_acc;
};

struct ScoreReport {
    std::vector<CellScore> cells; // task-major, context-minor
    std::map<TaskFamily, BaselineResult> baselines;
    std::vector<std::string> warnings;
    std::vector<double> contexts;
    std::vector<TaskFamily> tasks;
};

ScoreReport aggregate(const std::vector<SampleScore>& scores,
                      const std::vector<TaskFamily>& tasks, const std::vector<double>& contexts,
                      const std::map<TaskFamily, TaskConfig>& configs, const ScoreRule& rule,
                      int n_mc, uint64_t seed);

// Plain-text table: one task per row, one context per column, a random
// baseline column, and an unweighted average row.
std::string render_report(const ScoreReport& report);

} // namespace tshs
