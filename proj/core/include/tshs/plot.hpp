#pragma once

#include "tshs/sample.hpp"

#include <string>

namespace tshs {

inline constexpr int kPlotPointBudget = 10'000; // per trace, after decimation

// Standalone SVG with the three channels stacked and a clock-time axis.
// Output bytes are a pure function of the sample.
std::string render_plot(const HaystackSample& sample);

} // namespace tshs
