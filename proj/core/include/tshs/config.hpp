#pragma once

#include "tshs/detect.hpp"
#include "tshs/scoring.hpp"
#include "tshs/synth.hpp"
#include "tshs/task_config.hpp"
#include "tshs/templates.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace tshs {

struct CountSpec {
    int64_t train = 1000;
    int64_t val = 150;
    int64_t test = 150;

    int64_t of(const std::string& split) const;
};

// Participants per split. Zeroes mean "derive proportionally" with the
// benchmark's 100:25:26 ratio.
struct SplitSpec {
    int train = 0;
    int val = 0;
    int test = 0;

    bool proportional() const { return train == 0 && val == 0 && test == 0; }
};

struct CorpusConfig {
    enum class Kind { Synth, Csv } kind = Kind::Synth;
    SynthSpec synth;
    std::string dir;       // csv corpus directory
    std::string label_map; // optional raw-label mapping file
};

struct ScoringConfig {
    ScoreRule rule;
    int n_mc = 100'000;
};

struct ClassifConfig {
    double window_s = 10.0;
    int64_t train = 80'000;
    int64_t val = 15'000;
    int64_t test = 15'000;
    double threshold = 0.6;

    int64_t budget_of(const std::string& split) const;
};

struct AnnotateConfig {
    std::string endpoint;
    std::string model;
    std::string credential_env = "TSHS_API_KEY";
    std::string response_pointer = "/choices/0/message/content";
    double rps = 1.0;
    int concurrency = 2;
    int max_attempts = 3;
    bool force = false;
    bool send_plot = false;
};

struct RunConfig {
    uint64_t seed = 1;
    std::string out_dir = "out";
    double rate = 50.0;
    std::vector<double> contexts = {2.56, 10.0, 100.0, 900.0, 3600.0, 7200.0};
    std::vector<TaskFamily> tasks;
    CountSpec counts;
    SplitSpec splits;
    CorpusConfig corpus;
    std::map<TaskFamily, TaskConfig> task_configs; // fully resolved
    ScoringConfig scoring;
    std::string templates_dir;
    int jobs = 0; // 0 = hardware concurrency
    ClassifConfig classification;
    DetectabilityConfig detect;
    AnnotateConfig annotate;
};

RunConfig default_run_config();

// Strict: unknown keys anywhere are configuration errors.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

// Defaults resolved; suitable for the emitted effective-config audit file.
nlohmann::json run_config_to_json(const RunConfig& cfg);

} // namespace tshs
