#pragma once

#include "tshs/sample.hpp"

#include <string>

namespace tshs {

// The question prompt sent to a model under evaluation. The signal itself is
// attached by the caller; the placeholder line marks where it goes.
std::string build_prompt(const HaystackSample& sample);

// Same prompt with a ground-truth activity timeline block prepended, used for
// text-only upper-bound runs.
std::string build_oracle_prompt(const HaystackSample& sample);

// Canonical rendering of the gold answer, matching what the scorer parses.
std::string gold_answer_text(const HaystackSample& sample);

} // namespace tshs
