#pragma once

#include "tshs/sample.hpp"
#include "tshs/task_config.hpp"

#include <string>
#include <vector>

namespace tshs {

class TemplatePack;

// Re-derives the gold answer of a serialized sample from its timeline, slots
// and template id alone. Throws DataError when the record is too malformed to
// evaluate.
Answer recompute_gold(const HaystackSample& sample);

// Structural checks plus gold recomputation. Optional arguments enable the
// question-text and needle-length checks. Returns human-readable problems;
// empty means self-consistent.
std::vector<std::string> check_sample(const HaystackSample& sample,
                                      const TemplatePack* templates = nullptr,
                                      const TaskConfig* cfg = nullptr);

} // namespace tshs
