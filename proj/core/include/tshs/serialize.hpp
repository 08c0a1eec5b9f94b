#pragma once

#include "tshs/recording.hpp"
#include "tshs/sample.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace tshs {

// Binary series container: magic "TSHS", u16 version, u8 channel count,
// f32 sampling rate, u64 length, then channel-major f32 samples, all
// little-endian.
inline constexpr uint16_t kBlobVersion = 1;

void write_series_blob(const std::filesystem::path& path, const Series3& series, double rate);

struct SeriesBlob {
    Series3 series;
    double rate = 0.0;
};

SeriesBlob read_series_blob(const std::filesystem::path& path);

// JSON record for one sample, series stored out of line via series_ref.
nlohmann::json sample_to_json(const HaystackSample& sample);
HaystackSample sample_from_json(const nlohmann::json& j);

nlohmann::json answer_to_json(const Answer& answer);
Answer answer_from_json(const nlohmann::json& j);

// One sorted-key compact line, the only JSON shape the dataset files use.
std::string canonical_line(const nlohmann::json& j);

uint64_t derive_sample_seed(uint64_t master, TaskFamily task, double context_s,
                            const std::string& split, int64_t index);

// Write via temp file + rename so partial output never lands under the final
// name.
void atomic_write(const std::filesystem::path& path, std::string_view content);

} // namespace tshs
