#include "tshs/runner.hpp"

#include "tshs/errors.hpp"
#include "tshs/serialize.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>

using namespace tshs;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    fs::path p = fs::temp_directory_path() / "tshs_runner_tests" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

RunConfig mini_config(const fs::path& out) {
    RunConfig cfg = default_run_config();
    cfg.seed = 11;
    cfg.out_dir = out.string();
    cfg.tasks = {TaskFamily::Existence, TaskFamily::Counting};
    cfg.contexts = {2.56, 10.0};
    cfg.counts = {4, 2, 2};
    cfg.corpus.synth.participants = 8;
    cfg.corpus.synth.minutes = 40.0;
    cfg.corpus.synth.rate = 50.0;
    cfg.splits = {4, 2, 2}; // two participants per held-out split keeps every class stocked
    cfg.jobs = 2;
    return cfg;
}

} // namespace

TEST_SUITE("runner") {

TEST_CASE("the default plan covers the whole grid") {
    RunConfig cfg = default_run_config();
    auto plan = plan_dataset(cfg);
    // 10 tasks x 6 contexts x 3 splits
    CHECK(plan.size() == 180);
    CHECK(plan_total(plan) == 78'000);
    // task-major, then context, then split
    CHECK(plan[0].task == TaskFamily::Existence);
    CHECK(plan[0].context_s == 2.56);
    CHECK(plan[0].split == "train");
    CHECK(plan[0].count == 1000);
    CHECK(plan[1].split == "val");
    CHECK(plan[1].count == 150);
    CHECK(plan[2].split == "test");
    CHECK(plan[3].context_s == 10.0);
    CHECK(plan[18].task == TaskFamily::Localization);
}

TEST_CASE("proportional splits follow the 100:25:26 ratio") {
    RunConfig cfg = mini_config(fresh_dir("splits"));
    cfg.splits = {};
    cfg.corpus.synth.participants = 12;
    Corpus corpus = load_corpus(cfg);
    SplitAssignment splits = make_splits(cfg, corpus);
    CHECK(splits.train.size() == 8);
    CHECK(splits.val.size() == 2);
    CHECK(splits.test.size() == 2);
    // disjoint and exhaustive
    std::set<std::string> all;
    all.insert(splits.train.begin(), splits.train.end());
    all.insert(splits.val.begin(), splits.val.end());
    all.insert(splits.test.begin(), splits.test.end());
    CHECK(all.size() == 12);

    SplitAssignment again = make_splits(cfg, corpus);
    CHECK(again.train == splits.train);
    CHECK(again.test == splits.test);

    cfg.seed = 999;
    SplitAssignment moved = make_splits(cfg, corpus);
    CHECK(moved.train != splits.train); // 1 in C(12,4) chance collision at most

    // explicit counts win over the ratio
    cfg.splits = {6, 3, 3};
    SplitAssignment manual = make_splits(cfg, corpus);
    CHECK(manual.train.size() == 6);
    CHECK(manual.val.size() == 3);
    CHECK(manual.test.size() == 3);
}

TEST_CASE("tiny pools still get one participant per split") {
    RunConfig cfg = mini_config(fresh_dir("splits3"));
    cfg.splits = {};
    cfg.corpus.synth.participants = 3;
    Corpus corpus = load_corpus(cfg);
    SplitAssignment splits = make_splits(cfg, corpus);
    CHECK(splits.train.size() == 1);
    CHECK(splits.val.size() == 1);
    CHECK(splits.test.size() == 1);
}

TEST_CASE("load_corpus decimates to the run rate") {
    RunConfig cfg = mini_config(fresh_dir("corpus"));
    cfg.corpus.synth.rate = 100.0;
    cfg.corpus.synth.minutes = 2.0;
    cfg.rate = 50.0;
    Corpus corpus = load_corpus(cfg);
    REQUIRE(corpus.recordings.size() == 8);
    for (const auto& rec : corpus.recordings) {
        CHECK(rec.rate == 50.0);
        CHECK(rec.length() == 6'000); // 2 min at 50 Hz
    }
}

TEST_CASE("template overrides load from the templates dir") {
    fs::path dir = fresh_dir("templates");
    {
        std::ofstream f(dir / "counting.txt");
        for (int i = 0; i < 20; ++i)
            f << "Custom counting question " << i << " about {activity}?\n";
    }
    RunConfig cfg = mini_config(fresh_dir("templates_out"));
    cfg.templates_dir = dir.string();
    TemplatePack pack = load_templates(cfg);
    CHECK(pack.line(TaskFamily::Counting, 3) == "Custom counting question 3 about {activity}?");
    // untouched families keep the builtin text
    CHECK(pack.line(TaskFamily::Existence, 0) ==
          TemplatePack::builtin().line(TaskFamily::Existence, 0));
}

TEST_CASE("generate emits a complete, self-consistent dataset") {
    fs::path out = fresh_dir("gen");
    RunConfig cfg = mini_config(out);
    GenStats stats = run_generate(cfg);
    CHECK(stats.samples == 2 * 2 * 8);

    CHECK(fs::exists(out / "effective_config.json"));
    auto samples = load_samples(out / "samples.jsonl");
    REQUIRE(samples.size() == 32);

    // sorted by id, unique
    for (size_t i = 1; i < samples.size(); ++i)
        CHECK(samples[i - 1].id < samples[i].id);

    // per-cell counts match the plan
    std::map<std::string, int> cells;
    for (const auto& s : samples)
        ++cells[task_name(s.task) + "|" + std::to_string(s.context_s) + "|" + s.split];
    CHECK(cells.size() == 12);
    CHECK(cells.at("existence|2.560000|train") == 4);
    CHECK(cells.at("existence|10.000000|val") == 2);
    CHECK(cells.at("counting|10.000000|test") == 2);

    // every series blob exists and matches the context length
    for (const auto& s : samples) {
        fs::path blob = out / s.series_ref;
        REQUIRE(fs::exists(blob));
        SeriesBlob b = read_series_blob(blob);
        CHECK(b.rate == 50.0);
        CHECK(b.series[0].size() == static_cast<size_t>(std::llround(s.context_s * 50.0)));
    }

    CheckResult audit = check_dataset(cfg);
    CHECK(audit.samples == 32);
    CHECK(audit.problems.empty());
}

TEST_CASE("dataset bytes do not depend on the worker count") {
    fs::path out1 = fresh_dir("jobs1");
    fs::path out4 = fresh_dir("jobs4");
    RunConfig cfg1 = mini_config(out1);
    cfg1.tasks = {TaskFamily::Existence};
    cfg1.jobs = 1;
    RunConfig cfg4 = mini_config(out4);
    cfg4.tasks = {TaskFamily::Existence};
    cfg4.jobs = 4;
    run_generate(cfg1);
    run_generate(cfg4);
    CHECK(slurp(out1 / "samples.jsonl") == slurp(out4 / "samples.jsonl"));
    for (const auto& entry : fs::directory_iterator(out1 / "series")) {
        fs::path other = out4 / "series" / entry.path().filename();
        REQUIRE(fs::exists(other));
        CHECK(slurp(entry.path()) == slurp(other));
    }
}

TEST_CASE("index writes the per-split bout inventory") {
    fs::path out = fresh_dir("index");
    RunConfig cfg = mini_config(out);
    run_index(cfg);
    auto j = nlohmann::json::parse(slurp(out / "bout_index.json"));
    CHECK(j.at("rate") == 50.0);
    for (const char* split : {"train", "val", "test"}) {
        const auto& js = j.at("splits").at(split);
        CHECK(js.at("participants").is_array());
        CHECK(js.at("classes").size() == 10);
        // synthetic participants sleep a lot; the inventory must notice
        const auto& sleep = js.at("classes").at("sleep");
        CHECK(sleep.at("count").get<int64_t>() >= 0);
        CHECK(sleep.at("total_samples").get<int64_t>() >= sleep.at("longest").get<int64_t>());
        CHECK(sleep.at("bouts").size() == sleep.at("count").get<size_t>());
    }
}

TEST_CASE("slice emits labeled windows under the budget") {
    fs::path out = fresh_dir("slice");
    RunConfig cfg = mini_config(out);
    cfg.classification.train = 50; // force the random path for train
    SliceStats stats = run_slice(cfg);
    CHECK(stats.windows.at("train") == 50);
    CHECK(stats.windows.at("val") > 0);

    auto summary = nlohmann::json::parse(slurp(out / "classification_summary.json"));
    CHECK(summary.at("train").at("method") == "random");
    CHECK(summary.at("val").at("method") == "full");
    CHECK(summary.at("train").at("windows") == 50);

    std::ifstream f(out / "classification_train.jsonl");
    std::string line;
    int64_t lines = 0;
    while (std::getline(f, line)) {
        if (line.empty())
            continue;
        ++lines;
        auto j = nlohmann::json::parse(line);
        CHECK(j.at("length") == 500);
        CHECK(j.at("coverage").get<double>() >= 0.6);
        CHECK(class_from_name(j.at("label").get<std::string>()).has_value());
        CHECK(j.at("start").get<int64_t>() >= 0);
    }
    CHECK(lines == 50);
}

TEST_CASE("score round-trips gold transcripts at 100 percent") {
    fs::path out = fresh_dir("score");
    RunConfig cfg = mini_config(out);
    run_generate(cfg);
    auto samples = load_samples(out / "samples.jsonl");

    fs::path transcripts = out / "transcripts.jsonl";
    {
        std::ofstream f(transcripts);
        for (size_t i = 0; i < samples.size(); ++i) {
            if (i == 0)
                continue; // one sample goes unanswered
            nlohmann::json j = {{"sample_id", samples[i].id},
                                {"transcript",
                                 "Let me look closely. Answer: " + samples[i].answer_text}};
            f << j.dump() << "\n";
        }
        nlohmann::json stray = {{"sample_id", "nonexistent_000000"},
                                {"transcript", "Answer: Yes."}};
        f << stray.dump() << "\n";
    }

    ScoreReport rep = run_score(cfg, transcripts);
    int total = 0;
    int correct = 0;
    for (const auto& cell : rep.cells) {
        total += cell.total;
        correct += cell.correct;
    }
    CHECK(total == 31);
    CHECK(correct == 31);
    REQUIRE(rep.warnings.size() >= 2);
    bool saw_missing = false;
    bool saw_unknown = false;
    for (const auto& w : rep.warnings) {
        saw_missing |= w.find("no transcript") != std::string::npos;
        saw_unknown |= w.find("matched no sample id") != std::string::npos;
    }
    CHECK(saw_missing);
    CHECK(saw_unknown);
    CHECK(fs::exists(out / "report.json"));
    CHECK(fs::exists(out / "report.txt"));
    auto rj = nlohmann::json::parse(slurp(out / "report.json"));
    CHECK(rj.contains("cells"));
    CHECK(rj.contains("baselines"));
}

TEST_CASE("malformed transcript lines are data errors") {
    fs::path out = fresh_dir("score_bad");
    RunConfig cfg = mini_config(out);
    cfg.tasks = {TaskFamily::Existence};
    cfg.contexts = {2.56};
    run_generate(cfg);
    fs::path transcripts = out / "transcripts.jsonl";
    {
        std::ofstream f(transcripts);
        f << R"({"sample": "wrong-shape"})" << "\n";
    }
    CHECK_THROWS_AS(run_score(cfg, transcripts), DataError);
    CHECK_THROWS_AS(run_score(cfg, out / "absent.jsonl"), DataError);
}

TEST_CASE("check_dataset flags tampering") {
    fs::path out = fresh_dir("tamper");
    RunConfig cfg = mini_config(out);
    cfg.tasks = {TaskFamily::Existence};
    cfg.contexts = {2.56};
    run_generate(cfg);

    // flip one gold answer on disk
    auto samples = load_samples(out / "samples.jsonl");
    std::string buf;
    for (size_t i = 0; i < samples.size(); ++i) {
        auto j = sample_to_json(samples[i]);
        if (i == 0)
            j["answer_text"] = samples[i].answer_text == "Yes." ? "No." : "Yes.";
        buf += canonical_line(j);
        buf += '\n';
    }
    atomic_write(out / "samples.jsonl", buf);

    CheckResult audit = check_dataset(cfg);
    CHECK(audit.samples == 8);
    CHECK_FALSE(audit.problems.empty());
}

} // TEST_SUITE
