#pragma once

#include "tshs/config.hpp"
#include "tshs/sample.hpp"

#include <cstdint>
#include <string>

namespace tshs {

struct AnnotationRequest {
    std::string sample_id;
    std::string prompt;
    std::string plot_svg; // empty unless the endpoint takes images
    std::string model;
    std::string endpoint;
};

// Prompt carries everything needed to explain a known answer: the activity
// timeline, bout boundaries, per-channel statistics, the question, and the
// gold answer. Requires the series to be loaded.
AnnotationRequest build_cot_request(const HaystackSample& sample, const AnnotateConfig& cfg);

enum class AnnotateOutcome : uint8_t {
    Ok,
    Skipped,         // rationale already present and force not set
    NetworkError,    // transport failed after all attempts
    StatusError,     // non-success HTTP status after all attempts
    EmptyCompletion, // response parsed but no usable text
};

const std::string& annotate_outcome_name(AnnotateOutcome outcome);

struct AnnotateStats {
    int64_t annotated = 0;
    int64_t skipped = 0;
    int64_t failed = 0;
};

// Fills empty rationale fields of <out_dir>/samples.jsonl in place via an
// atomic rewrite. Every other byte of every record survives unchanged;
// failures leave their sample's rationale empty. Attempts are logged to
// <out_dir>/annotate_audit.jsonl with credentials redacted.
AnnotateStats annotate_dataset(const RunConfig& cfg);

} // namespace tshs
