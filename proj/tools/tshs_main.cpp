#include "tshs/annotate.hpp"
#include "tshs/config.hpp"
#include "tshs/errors.hpp"
#include "tshs/runner.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <string>
#include <vector>

using nlohmann::json;
using namespace tshs;

namespace {

void emit_error(const char* kind, const std::string& message) {
    json j;
    j["error"] = {{"kind", kind}, {"message", message}};
    fprintf(stderr, "%s\n", j.dump().c_str());
}

std::vector<std::string> split_csv(const std::string& csv) {
    std::vector<std::string> out;
    size_t pos = 0;
    while (pos <= csv.size()) {
        size_t comma = csv.find(',', pos);
        if (comma == std::string::npos)
            comma = csv.size();
        std::string item = csv.substr(pos, comma - pos);
        if (!item.empty())
            out.push_back(item);
        pos = comma + 1;
    }
    return out;
}

int run(int argc, char** argv) {
    CLI::App app{"time-series haystack benchmark toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string rule;
    std::string transcripts;
    std::string tasks_csv;
    std::string contexts_csv;
    int64_t seed = -1;
    int jobs = -1;

    app.add_option("--config", config_path, "run configuration JSON file");
    app.add_option("--seed", seed, "master seed override");
    app.add_option("--tasks", tasks_csv, "comma-separated task subset override");
    app.add_option("--contexts", contexts_csv, "comma-separated context lengths in seconds");
    app.add_option("--out", out_dir, "output directory override");
    app.add_option("--jobs", jobs, "worker threads, 0 means all cores");
    app.add_option("--rule", rule, "time-range scoring rule: iou or abs");

    CLI::App* c_index = app.add_subcommand("index", "persist the per-split bout inventory");
    CLI::App* c_gen = app.add_subcommand("generate", "emit the sample dataset");
    CLI::App* c_val = app.add_subcommand("validate", "run the insertion-detectability check");
    CLI::App* c_slice = app.add_subcommand("slice", "emit activity-classification windows");
    CLI::App* c_score = app.add_subcommand("score", "score model transcripts against the golds");
    c_score->add_option("--transcripts", transcripts, "JSONL of {sample_id, transcript}")
        ->required();
    CLI::App* c_ann = app.add_subcommand("annotate", "fetch chain-of-thought rationales");
    for (CLI::App* sub : {c_index, c_gen, c_val, c_slice, c_score, c_ann})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0)
            return app.exit(e);
        emit_error("config", e.what());
        return 2;
    }

    RunConfig cfg = config_path.empty() ? default_run_config() : load_run_config(config_path);
    if (seed >= 0)
        cfg.seed = static_cast<uint64_t>(seed);
    if (!out_dir.empty())
        cfg.out_dir = out_dir;
    if (jobs >= 0)
        cfg.jobs = jobs;
    if (!tasks_csv.empty()) {
        cfg.tasks.clear();
        for (const std::string& name : split_csv(tasks_csv)) {
            auto task = task_from_name(name);
            if (!task)
                throw ConfigError("unknown task \"" + name + "\"");
            cfg.tasks.push_back(*task);
        }
        if (cfg.tasks.empty())
            throw ConfigError("--tasks selected no tasks");
    }
    if (!contexts_csv.empty()) {
        cfg.contexts.clear();
        for (const std::string& item : split_csv(contexts_csv)) {
            double v = 0.0;
            try {
                v = std::stod(item);
            } catch (const std::exception&) {
                throw ConfigError("bad context length \"" + item + "\"");
            }
            if (v <= 0.0)
                throw ConfigError("context lengths must be positive, got " + item);
            cfg.contexts.push_back(v);
        }
    }
    if (!rule.empty()) {
        if (rule == "iou")
            cfg.scoring.rule.kind = RangeRule::Iou;
        else if (rule == "abs")
            cfg.scoring.rule.kind = RangeRule::AbsTolerance;
        else
            throw ConfigError("--rule must be iou or abs, got \"" + rule + "\"");
    }

    if (*c_index) {
        run_index(cfg);
        printf("wrote %s/bout_index.json\n", cfg.out_dir.c_str());
    } else if (*c_gen) {
        GenStats stats = run_generate(cfg);
        printf("generated %lld samples in %.1f s -> %s/samples.jsonl\n",
               static_cast<long long>(stats.samples), stats.wall_s, cfg.out_dir.c_str());
    } else if (*c_val) {
        DetectReport rep = run_validate(cfg);
        for (const ContextDetectReport& c : rep.contexts)
            printf("context %gs: blended AUC %.4f (%s), control AUC %.4f (%s)\n", c.context_s,
                   c.auc_blended, c.pass_blended ? "pass" : "FAIL", c.auc_control,
                   c.pass_control ? "pass" : "FAIL");
        printf("wrote %s/detect_report.json\n", cfg.out_dir.c_str());
        if (!rep.pass)
            throw DataError("insertion detectability is out of band; see detect_report.json");
    } else if (*c_slice) {
        SliceStats stats = run_slice(cfg);
        for (const auto& [split, n] : stats.windows)
            printf("%s: %lld windows\n", split.c_str(), static_cast<long long>(n));
        printf("wrote %s/classification_<split>.jsonl\n", cfg.out_dir.c_str());
    } else if (*c_score) {
        ScoreReport rep = run_score(cfg, transcripts);
        fputs(render_report(rep).c_str(), stdout);
        printf("wrote %s/report.json and report.txt\n", cfg.out_dir.c_str());
    } else if (*c_ann) {
        AnnotateStats stats = annotate_dataset(cfg);
        printf("annotated %lld, skipped %lld, failed %lld\n",
               static_cast<long long>(stats.annotated), static_cast<long long>(stats.skipped),
               static_cast<long long>(stats.failed));
        if (stats.failed > 0)
            throw DataError(std::to_string(stats.failed) + " samples could not be annotated");
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ConfigError& e) {
        emit_error("config", e.what());
        return 2;
    } catch (const DataError& e) {
        emit_error("data", e.what());
        return 3;
    } catch (const std::exception& e) {
        emit_error("internal", e.what());
        return 1;
    }
}
