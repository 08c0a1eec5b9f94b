#pragma once

#include "tshs/config.hpp"
#include "tshs/detect.hpp"
#include "tshs/recording.hpp"
#include "tshs/sample.hpp"
#include "tshs/scoring.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace tshs {

// Canonical split order; also the iteration order of every per-split loop.
const std::vector<std::string>& split_names();

// Corpus per the run config: synthesized or loaded from a CSV directory,
// then decimated to cfg.rate.
Corpus load_corpus(const RunConfig& cfg);

SplitAssignment make_splits(const RunConfig& cfg, const Corpus& corpus);

// Question templates: the built-in pack, with any per-family overrides found
// in cfg.templates_dir ("<task>.txt").
TemplatePack load_templates(const RunConfig& cfg);

struct PlanCell {
    TaskFamily task;
    double context_s = 0.0;
    std::string split;
    int64_t count = 0;
};

// Flattened generation plan: task-major, then context, then split.
std::vector<PlanCell> plan_dataset(const RunConfig& cfg);
int64_t plan_total(const std::vector<PlanCell>& plan);

struct GenStats {
    int64_t samples = 0;
    double wall_s = 0.0;
};

// generate: every sample of the plan; series blobs plus samples.jsonl plus
// effective_config.json under cfg.out_dir. The JSONL is sorted by id, so its
// bytes do not depend on the worker count.
GenStats run_generate(const RunConfig& cfg);

// index: persists the per-split bout inventory as bout_index.json.
void run_index(const RunConfig& cfg);

// validate: the insertion-detectability experiment; detect_report.json.
DetectReport run_validate(const RunConfig& cfg);

struct SliceStats {
    std::map<std::string, int64_t> windows; // per split
};

// slice: activity-classification windows, classification_<split>.jsonl each.
SliceStats run_slice(const RunConfig& cfg);

std::vector<HaystackSample> load_samples(const std::filesystem::path& jsonl);

// score: transcripts JSONL ({"sample_id": ..., "transcript": ...}) against
// the stored golds; writes report.json and report.txt next to the samples.
ScoreReport run_score(const RunConfig& cfg, const std::filesystem::path& transcripts);

struct CheckResult {
    int64_t samples = 0;
    std::vector<std::string> problems;
};

// Re-audit of an emitted dataset: records reloaded from disk, golds
// recomputed from each record's own timeline, questions re-instantiated,
// series blobs re-read and length-checked.
CheckResult check_dataset(const RunConfig& cfg);

} // namespace tshs
