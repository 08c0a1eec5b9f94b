#pragma once

#include "tshs/activity.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace tshs {

// Three acceleration channels (x, y, z) of equal length, in g units.
using Series3 = std::array<std::vector<float>, 3>;

// Half-open span [start, end) of sample indices carrying one activity class.
struct Annotation {
    int64_t start = 0;
    int64_t end = 0;
    ActivityClass cls = ActivityClass::Sleep;
};

// One participant's sensor stream. Immutable after load; safe to share
// across threads.
struct Recording {
    std::string participant_id;
    Series3 channels;
    double rate = 0.0;         // samples per second
    int64_t start_clock_ms = 0; // wall-clock ms since midnight of sample 0
    std::vector<Annotation> annotations; // sorted, non-overlapping

    int64_t length() const { return static_cast<int64_t>(channels[0].size()); }
};

struct Corpus {
    std::vector<Recording> recordings;

    const Recording* find(const std::string& participant_id) const;
    std::vector<std::string> participant_ids() const;
};

// raw annotation label -> canonical class.
struct LabelMap {
    std::map<std::string, ActivityClass> mapping;

    // Two-column text file: raw_label<TAB>class, one pair per line.
    static LabelMap load(const std::filesystem::path& path);
    // Identity map over the ten canonical class names.
    static LabelMap identity();
};

// CSV schema: header `time,x,y,z,annotation`; `time` is ISO-8601 or integer
// milliseconds; one row per sample at a uniform rate. Throws DataError on
// malformed rows, unknown labels, or non-monotonic timestamps.
Recording load_recording(const std::filesystem::path& path, const LabelMap& map);

// Writes the same CSV schema; load(save(rec)) round-trips losslessly.
void save_recording(const Recording& rec, const std::filesystem::path& path);

// Strided decimation to target_rate. Requires target_rate <= rec.rate and an
// integer decimation factor.
Recording resample(const Recording& rec, double target_rate);

struct SplitAssignment {
    std::set<std::string> train;
    std::set<std::string> val;
    std::set<std::string> test;
    uint64_t seed = 0;

    const std::set<std::string>& ids(const std::string& split) const;
};

struct SplitCounts {
    int train = 0;
    int val = 0;
    int test = 0;
};

// Uniform random partition of the ids, deterministic per seed. Counts must
// sum to |ids|.
SplitAssignment split_participants(const std::set<std::string>& ids, SplitCounts counts,
                                   uint64_t seed);

} // namespace tshs
