#include "tshs/config.hpp"

#include "tshs/errors.hpp"

#include <fstream>
#include <set>

namespace tshs {

int64_t CountSpec::of(const std::string& split) const {
    if (split == "train")
        return train;
    if (split == "val")
        return val;
    if (split == "test")
        return test;
    throw ConfigError("unknown split: " + split);
}

int64_t ClassifConfig::budget_of(const std::string& split) const {
    if (split == "train")
        return train;
    if (split == "val")
        return val;
    if (split == "test")
        return test;
    throw ConfigError("unknown split: " + split);
}

RunConfig default_run_config() {
    RunConfig cfg;
    auto tasks = all_tasks();
    cfg.tasks = {tasks.begin(), tasks.end()};
    for (auto task : cfg.tasks)
        cfg.task_configs[task] = default_task_config(task);
    return cfg;
}

namespace {

void expect_keys(const nlohmann::json& j, const std::string& where,
                 const std::set<std::string>& allowed) {
    if (!j.is_object())
        throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!allowed.contains(key))
            throw ConfigError("unknown key \"" + key + "\" in " + where);
    }
}

template <typename T>
void read_to(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key))
        out = j.at(key).get<T>();
}

void parse_counts(const nlohmann::json& j, CountSpec& out) {
    expect_keys(j, "counts", {"train", "val", "test"});
    read_to(j, "train", out.train);
    read_to(j, "val", out.val);
    read_to(j, "test", out.test);
    if (out.train <= 0 || out.val <= 0 || out.test <= 0)
        throw ConfigError("counts must be positive");
}

void parse_splits(const nlohmann::json& j, SplitSpec& out) {
    expect_keys(j, "splits", {"train", "val", "test"});
    read_to(j, "train", out.train);
    read_to(j, "val", out.val);
    read_to(j, "test", out.test);
    if (out.train < 0 || out.val < 0 || out.test < 0)
        throw ConfigError("split participant counts cannot be negative");
}

void parse_synth(const nlohmann::json& j, SynthSpec& out) {
    expect_keys(j, "corpus.synth",
                {"participants", "minutes", "rate", "seed", "bias_lo", "bias_hi", "block_lo_s",
                 "block_hi_s", "bout_lo_s", "bout_hi_s", "unannotated_frac"});
    read_to(j, "participants", out.participants);
    read_to(j, "minutes", out.minutes);
    read_to(j, "rate", out.rate);
    read_to(j, "seed", out.seed);
    read_to(j, "bias_lo", out.bias_lo);
    read_to(j, "bias_hi", out.bias_hi);
    read_to(j, "block_lo_s", out.block_lo_s);
    read_to(j, "block_hi_s", out.block_hi_s);
    read_to(j, "bout_lo_s", out.bout_lo_s);
    read_to(j, "bout_hi_s", out.bout_hi_s);
    read_to(j, "unannotated_frac", out.unannotated_frac);
    if (out.participants < 2)
        throw ConfigError("synth corpus needs at least 2 participants");
}

void parse_corpus(const nlohmann::json& j, CorpusConfig& out) {
    expect_keys(j, "corpus", {"kind", "synth", "dir", "label_map"});
    std::string kind = "synth";
    read_to(j, "kind", kind);
    if (kind == "synth") {
        out.kind = CorpusConfig::Kind::Synth;
    } else if (kind == "csv") {
        out.kind = CorpusConfig::Kind::Csv;
    } else {
        throw ConfigError("corpus.kind must be \"synth\" or \"csv\"");
    }
    if (j.contains("synth"))
        parse_synth(j.at("synth"), out.synth);
    read_to(j, "dir", out.dir);
    read_to(j, "label_map", out.label_map);
    if (out.kind == CorpusConfig::Kind::Csv && out.dir.empty())
        throw ConfigError("corpus.kind \"csv\" requires corpus.dir");
}

void parse_task_config(const nlohmann::json& j, const std::string& where, TaskConfig& out) {
    expect_keys(j, where,
                {"needle_lo", "needle_hi", "background", "distractors_lo", "distractors_hi",
                 "bouts_lo", "bouts_hi", "min_diff_frac", "k_weights", "opposite_distractors_hi",
                 "adjacency_gap", "states_lo", "states_hi", "min_state_frac", "margin_frac"});
    read_to(j, "needle_lo", out.needle_lo);
    read_to(j, "needle_hi", out.needle_hi);
    if (j.contains("background")) {
        auto bg = background_kind_from_name(j.at("background").get<std::string>());
        if (!bg)
            throw ConfigError(where + ".background must be any|mixed|pure");
        out.background = *bg;
    }
    read_to(j, "distractors_lo", out.distractors_lo);
    read_to(j, "distractors_hi", out.distractors_hi);
    read_to(j, "bouts_lo", out.bouts_lo);
    read_to(j, "bouts_hi", out.bouts_hi);
    read_to(j, "min_diff_frac", out.min_diff_frac);
    if (j.contains("k_weights")) {
        auto w = j.at("k_weights").get<std::vector<double>>();
        if (w.size() != 3)
            throw ConfigError(where + ".k_weights needs exactly 3 entries");
        out.k_weights = {w[0], w[1], w[2]};
    }
    read_to(j, "opposite_distractors_hi", out.opposite_distractors_hi);
    read_to(j, "adjacency_gap", out.adjacency_gap);
    read_to(j, "states_lo", out.states_lo);
    read_to(j, "states_hi", out.states_hi);
    read_to(j, "min_state_frac", out.min_state_frac);
    read_to(j, "margin_frac", out.margin_frac);
}

void parse_scoring(const nlohmann::json& j, ScoringConfig& out) {
    expect_keys(j, "scoring", {"rule", "iou_threshold", "abs_tolerance_s", "n_mc"});
    if (j.contains("rule")) {
        std::string rule = j.at("rule").get<std::string>();
        if (rule == "iou")
            out.rule.kind = RangeRule::Iou;
        else if (rule == "abs")
            out.rule.kind = RangeRule::AbsTolerance;
        else
            throw ConfigError("scoring.rule must be \"iou\" or \"abs\"");
    }
    read_to(j, "iou_threshold", out.rule.iou_threshold);
    read_to(j, "abs_tolerance_s", out.rule.abs_tolerance_s);
    read_to(j, "n_mc", out.n_mc);
    if (out.rule.iou_threshold <= 0.0 || out.rule.iou_threshold > 1.0)
        throw ConfigError("scoring.iou_threshold must lie in (0, 1]");
}

void parse_classification(const nlohmann::json& j, ClassifConfig& out) {
    expect_keys(j, "classification", {"window_s", "train", "val", "test", "threshold"});
    read_to(j, "window_s", out.window_s);
    read_to(j, "train", out.train);
    read_to(j, "val", out.val);
    read_to(j, "test", out.test);
    read_to(j, "threshold", out.threshold);
    if (out.window_s <= 0.0)
        throw ConfigError("classification.window_s must be positive");
    if (out.threshold <= 0.0 || out.threshold > 1.0)
        throw ConfigError("classification.threshold must lie in (0, 1]");
}

void parse_detect(const nlohmann::json& j, DetectabilityConfig& out) {
    expect_keys(j, "detect",
                {"contexts_s", "rate", "train_windows", "test_windows", "needle_lo", "needle_hi",
                 "margin_frac", "seed", "auc_lo", "auc_hi", "control_min"});
    read_to(j, "contexts_s", out.contexts_s);
    read_to(j, "rate", out.rate);
    read_to(j, "train_windows", out.train_windows);
    read_to(j, "test_windows", out.test_windows);
    read_to(j, "needle_lo", out.needle_lo);
    read_to(j, "needle_hi", out.needle_hi);
    read_to(j, "margin_frac", out.margin_frac);
    read_to(j, "seed", out.seed);
    read_to(j, "auc_lo", out.auc_lo);
    read_to(j, "auc_hi", out.auc_hi);
    read_to(j, "control_min", out.control_min);
}

void parse_annotate(const nlohmann::json& j, AnnotateConfig& out) {
    expect_keys(j, "annotate",
                {"endpoint", "model", "credential_env", "response_pointer", "rps", "concurrency",
                 "max_attempts", "force", "send_plot"});
    read_to(j, "endpoint", out.endpoint);
    read_to(j, "model", out.model);
    read_to(j, "credential_env", out.credential_env);
    read_to(j, "response_pointer", out.response_pointer);
    read_to(j, "rps", out.rps);
    read_to(j, "concurrency", out.concurrency);
    read_to(j, "max_attempts", out.max_attempts);
    read_to(j, "force", out.force);
    read_to(j, "send_plot", out.send_plot);
    if (out.rps <= 0.0)
        throw ConfigError("annotate.rps must be positive");
    if (out.concurrency < 1)
        throw ConfigError("annotate.concurrency must be at least 1");
}

} // namespace

RunConfig run_config_from_json(const nlohmann::json& j) {
    RunConfig cfg = default_run_config();
    expect_keys(j, "config",
                {"seed", "out_dir", "rate", "contexts", "tasks", "counts", "splits", "corpus",
                 "task_overrides", "scoring", "templates_dir", "jobs", "classification", "detect",
                 "annotate"});
    read_to(j, "seed", cfg.seed);
    read_to(j, "out_dir", cfg.out_dir);
    read_to(j, "rate", cfg.rate);
    read_to(j, "contexts", cfg.contexts);
    if (j.contains("tasks")) {
        cfg.tasks.clear();
        for (const auto& name : j.at("tasks")) {
            auto task = task_from_name(name.get<std::string>());
            if (!task)
                throw ConfigError("unknown task: " + name.get<std::string>());
            cfg.tasks.push_back(*task);
        }
        if (cfg.tasks.empty())
            throw ConfigError("tasks list cannot be empty");
    }
    if (j.contains("counts"))
        parse_counts(j.at("counts"), cfg.counts);
    if (j.contains("splits"))
        parse_splits(j.at("splits"), cfg.splits);
    if (j.contains("corpus"))
        parse_corpus(j.at("corpus"), cfg.corpus);
    if (j.contains("task_overrides")) {
        if (!j.at("task_overrides").is_object())
            throw ConfigError("task_overrides must be an object keyed by task name");
        for (const auto& [name, body] : j.at("task_overrides").items()) {
            auto task = task_from_name(name);
            if (!task)
                throw ConfigError("task_overrides names unknown task: " + name);
            parse_task_config(body, "task_overrides." + name, cfg.task_configs[*task]);
        }
    }
    if (j.contains("scoring"))
        parse_scoring(j.at("scoring"), cfg.scoring);
    read_to(j, "templates_dir", cfg.templates_dir);
    read_to(j, "jobs", cfg.jobs);
    if (j.contains("classification"))
        parse_classification(j.at("classification"), cfg.classification);
    if (j.contains("detect"))
        parse_detect(j.at("detect"), cfg.detect);
    if (j.contains("annotate"))
        parse_annotate(j.at("annotate"), cfg.annotate);

    if (cfg.rate <= 0.0)
        throw ConfigError("rate must be positive");
    if (cfg.contexts.empty())
        throw ConfigError("contexts cannot be empty");
    for (double c : cfg.contexts)
        if (c <= 0.0)
            throw ConfigError("context lengths must be positive");
    if (cfg.jobs < 0)
        throw ConfigError("jobs cannot be negative");
    for (const auto& [task, tc] : cfg.task_configs)
        validate_task_config(tc, task);
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config is not valid JSON: " + std::string(e.what()));
    }
    return run_config_from_json(j);
}

nlohmann::json run_config_to_json(const RunConfig& cfg) {
    nlohmann::json j;
    j["seed"] = cfg.seed;
    j["out_dir"] = cfg.out_dir;
    j["rate"] = cfg.rate;
    j["contexts"] = cfg.contexts;
    auto tasks = nlohmann::json::array();
    for (auto t : cfg.tasks)
        tasks.push_back(task_name(t));
    j["tasks"] = tasks;
    j["counts"] = {{"train", cfg.counts.train}, {"val", cfg.counts.val}, {"test", cfg.counts.test}};
    j["splits"] = {{"train", cfg.splits.train}, {"val", cfg.splits.val}, {"test", cfg.splits.test}};
    nlohmann::json corpus;
    corpus["kind"] = cfg.corpus.kind == CorpusConfig::Kind::Synth ? "synth" : "csv";
    corpus["synth"] = {{"participants", cfg.corpus.synth.participants},
                       {"minutes", cfg.corpus.synth.minutes},
                       {"rate", cfg.corpus.synth.rate},
                       {"seed", cfg.corpus.synth.seed},
                       {"bias_lo", cfg.corpus.synth.bias_lo},
                       {"bias_hi", cfg.corpus.synth.bias_hi},
                       {"block_lo_s", cfg.corpus.synth.block_lo_s},
                       {"block_hi_s", cfg.corpus.synth.block_hi_s},
                       {"bout_lo_s", cfg.corpus.synth.bout_lo_s},
                       {"bout_hi_s", cfg.corpus.synth.bout_hi_s},
                       {"unannotated_frac", cfg.corpus.synth.unannotated_frac}};
    corpus["dir"] = cfg.corpus.dir;
    corpus["label_map"] = cfg.corpus.label_map;
    j["corpus"] = corpus;
    nlohmann::json overrides;
    for (const auto& [task, tc] : cfg.task_configs) {
        nlohmann::json t;
        t["needle_lo"] = tc.needle_lo;
        t["needle_hi"] = tc.needle_hi;
        t["background"] = background_kind_name(tc.background);
        t["distractors_lo"] = tc.distractors_lo;
        t["distractors_hi"] = tc.distractors_hi;
        t["bouts_lo"] = tc.bouts_lo;
        t["bouts_hi"] = tc.bouts_hi;
        t["min_diff_frac"] = tc.min_diff_frac;
        t["k_weights"] = tc.k_weights;
        t["opposite_distractors_hi"] = tc.opposite_distractors_hi;
        t["adjacency_gap"] = tc.adjacency_gap;
        t["states_lo"] = tc.states_lo;
        t["states_hi"] = tc.states_hi;
        t["min_state_frac"] = tc.min_state_frac;
        t["margin_frac"] = tc.margin_frac;
        overrides[task_name(task)] = t;
    }
    j["task_overrides"] = overrides;
    j["scoring"] = {{"rule", cfg.scoring.rule.kind == RangeRule::Iou ? "iou" : "abs"},
                    {"iou_threshold", cfg.scoring.rule.iou_threshold},
                    {"abs_tolerance_s", cfg.scoring.rule.abs_tolerance_s},
                    {"n_mc", cfg.scoring.n_mc}};
    j["templates_dir"] = cfg.templates_dir;
    j["jobs"] = cfg.jobs;
    j["classification"] = {{"window_s", cfg.classification.window_s},
                           {"train", cfg.classification.train},
                           {"val", cfg.classification.val},
                           {"test", cfg.classification.test},
                           {"threshold", cfg.classification.threshold}};
    j["detect"] = {{"contexts_s", cfg.detect.contexts_s},
                   {"rate", cfg.detect.rate},
                   {"train_windows", cfg.detect.train_windows},
                   {"test_windows", cfg.detect.test_windows},
                   {"needle_lo", cfg.detect.needle_lo},
                   {"needle_hi", cfg.detect.needle_hi},
                   {"margin_frac", cfg.detect.margin_frac},
                   {"seed", cfg.detect.seed},
                   {"auc_lo", cfg.detect.auc_lo},
                   {"auc_hi", cfg.detect.auc_hi},
                   {"control_min", cfg.detect.control_min}};
    j["annotate"] = {{"endpoint", cfg.annotate.endpoint},
                     {"model", cfg.annotate.model},
                     {"credential_env", cfg.annotate.credential_env},
                     {"response_pointer", cfg.annotate.response_pointer},
                     {"rps", cfg.annotate.rps},
                     {"concurrency", cfg.annotate.concurrency},
                     {"max_attempts", cfg.annotate.max_attempts},
                     {"force", cfg.annotate.force},
                     {"send_plot", cfg.annotate.send_plot}};
    return j;
}

} // namespace tshs
