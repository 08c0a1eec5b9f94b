#include "tshs/runner.hpp"

#include "tshs/bouts.hpp"
#include "tshs/consistency.hpp"
#include "tshs/errors.hpp"
#include "tshs/rng.hpp"
#include "tshs/serialize.hpp"
#include "tshs/synth.hpp"
#include "tshs/taskgen.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>
#include <utility>

namespace fs = std::filesystem;
using nlohmann::json;

namespace tshs {

const std::vector<std::string>& split_names() {
    static const std::vector<std::string> names = {"train", "val", "test"};
    return names;
}

namespace {

Corpus corpus_at_rate(const RunConfig& cfg, double rate) {
    Corpus corpus;
    if (cfg.corpus.kind == CorpusConfig::Kind::Synth) {
        corpus = synth_corpus(cfg.corpus.synth);
    } else {
        if (cfg.corpus.dir.empty())
            throw ConfigError("corpus.dir is required for a csv corpus");
        LabelMap map = cfg.corpus.label_map.empty() ? LabelMap::identity()
                                                    : LabelMap::load(cfg.corpus.label_map);
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(cfg.corpus.dir))
            if (entry.is_regular_file() && entry.path().extension() == ".csv")
                files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        if (files.empty())
            throw DataError("no .csv recordings under " + cfg.corpus.dir);
        for (const auto& f : files)
            corpus.recordings.push_back(load_recording(f, map));
    }
    for (auto& rec : corpus.recordings)
        if (rec.rate != rate)
            rec = resample(rec, rate);
    return corpus;
}

std::string join_problems(const std::vector<std::string>& problems, size_t limit = 20) {
    std::string msg;
    for (size_t i = 0; i < problems.size() && i < limit; ++i) {
        msg += "\n  ";
        msg += problems[i];
    }
    if (problems.size() > limit)
        msg += "\n  ... " + std::to_string(problems.size() - limit) + " more";
    return msg;
}

json report_to_json(const ScoreReport& rep) {
    json j;
    j["contexts"] = rep.contexts;
    json tasks = json::array();
    for (TaskFamily t : rep.tasks)
        tasks.push_back(task_name(t));
    j["tasks"] = tasks;
    json cells = json::array();
    for (const CellScore& c : rep.cells) {
        json jc;
        jc["task"] = task_name(c.task);
        jc["context_s"] = c.context_s;
        jc["total"] = c.total;
        jc["correct"] = c.correct;
        jc["missing_marker"] = c.missing_marker;
        jc["unparseable"] = c.unparseable;
        jc["accuracy_pct"] = c.accuracy_pct;
        if (c.macro_f1)
            jc["macro_f1"] = *c.macro_f1;
        if (c.balanced_acc)
            jc["balanced_accuracy"] = *c.balanced_acc;
        cells.push_back(std::move(jc));
    }
    j["cells"] = std::move(cells);
    json baselines = json::object();
    for (const auto& [task, b] : rep.baselines) {
        json jb;
        jb["pct"] = b.pct;
        jb["closed_form"] = b.closed_form;
        if (!b.closed_form) {
            jb["ci_lo"] = b.ci_lo;
            jb["ci_hi"] = b.ci_hi;
            jb["trials"] = b.trials;
        }
        baselines[task_name(task)] = std::move(jb);
    }
    j["baselines"] = std::move(baselines);
    j["warnings"] = rep.warnings;
    return j;
}

} // namespace

Corpus load_corpus(const RunConfig& cfg) {
    return corpus_at_rate(cfg, cfg.rate);
}

SplitAssignment make_splits(const RunConfig& cfg, const Corpus& corpus) {
    std::set<std::string> ids;
    for (const auto& rec : corpus.recordings)
        ids.insert(rec.participant_id);
    SplitCounts counts{cfg.splits.train, cfg.splits.val, cfg.splits.test};
    if (cfg.splits.proportional()) {
        int n = static_cast<int>(ids.size());
        if (n < 3)
            throw DataError("need at least 3 participants for the three splits, have " +
                            std::to_string(n));
        counts.train = std::max(1, static_cast<int>(llround(n * 100.0 / 151.0)));
        counts.val = std::max(1, static_cast<int>(llround(n * 25.0 / 151.0)));
        counts.test = n - counts.train - counts.val;
        if (counts.test < 1) {
            counts.train -= 1 - counts.test;
            counts.test = 1;
        }
    }
    return split_participants(ids, counts, hash_string(cfg.seed, "participant-split"));
}

TemplatePack load_templates(const RunConfig& cfg) {
    TemplatePack pack = TemplatePack::builtin();
    if (!cfg.templates_dir.empty()) {
        for (TaskFamily task : all_tasks()) {
            fs::path p = fs::path(cfg.templates_dir) / (task_name(task) + ".txt");
            if (fs::exists(p))
                pack.load_file(task, p);
        }
    }
    return pack;
}

std::vector<PlanCell> plan_dataset(const RunConfig& cfg) {
    std::vector<PlanCell> plan;
    for (TaskFamily task : cfg.tasks)
        for (double ctx : cfg.contexts)
            for (const std::string& split : split_names())
                plan.push_back({task, ctx, split, cfg.counts.of(split)});
    return plan;
}

int64_t plan_total(const std::vector<PlanCell>& plan) {
    return std::accumulate(plan.begin(), plan.end(), int64_t{0},
                           [](int64_t acc, const PlanCell& c) { return acc + c.count; });
}

GenStats run_generate(const RunConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    Corpus corpus = load_corpus(cfg);
    SplitAssignment splits = make_splits(cfg, corpus);
    TemplatePack templates = load_templates(cfg);

    fs::path out = cfg.out_dir;
    fs::create_directories(out / "series");
    atomic_write(out / "effective_config.json", run_config_to_json(cfg).dump(2) + "\n");

    struct SplitEnv {
        std::set<std::string> participants;
        BoutIndex index;
        std::vector<BackgroundSampler> any_bg;  // one per context
        std::vector<BackgroundSampler> pure_bg;
    };
    std::map<std::string, SplitEnv> env;
    for (const std::string& split : split_names()) {
        SplitEnv se;
        se.participants = splits.ids(split);
        se.index = BoutIndex::build(corpus, se.participants);
        for (double ctx_s : cfg.contexts) {
            int64_t len = llround(ctx_s * cfg.rate);
            se.any_bg.push_back(
                BackgroundSampler::build(corpus, se.participants, len, BackgroundKind::Any));
            se.pure_bg.push_back(
                BackgroundSampler::build(corpus, se.participants, len, BackgroundKind::Pure));
        }
        env.emplace(split, std::move(se));
    }

    struct Job {
        const PlanCell* cell;
        int64_t index;
        size_t ctx_idx;
    };
    std::vector<PlanCell> plan = plan_dataset(cfg);
    std::vector<Job> jobs;
    for (const PlanCell& cell : plan) {
        size_t ctx_idx = std::find(cfg.contexts.begin(), cfg.contexts.end(), cell.context_s) -
                         cfg.contexts.begin();
        for (int64_t i = 0; i < cell.count; ++i)
            jobs.push_back({&cell, i, ctx_idx});
    }

    std::vector<std::string> lines(jobs.size());
    std::vector<std::string> ids(jobs.size());
    std::atomic<size_t> next{0};
    std::mutex fail_mu;
    std::vector<std::string> problems;
    std::exception_ptr first_error;

    auto work = [&] {
        for (;;) {
            size_t k = next.fetch_add(1);
            if (k >= jobs.size())
                return;
            {
                std::lock_guard lk(fail_mu);
                if (first_error)
                    return;
            }
            const Job& job = jobs[k];
            const PlanCell& cell = *job.cell;
            try {
                const SplitEnv& se = env.at(cell.split);
                GenInputs in;
                in.corpus = &corpus;
                in.index = &se.index;
                in.templates = &templates;
                in.any_bg = &se.any_bg[job.ctx_idx];
                in.pure_bg = &se.pure_bg[job.ctx_idx];
                in.participants = &se.participants;
                in.rate = cfg.rate;
                const TaskConfig& tcfg = cfg.task_configs.at(cell.task);
                uint64_t seed =
                    derive_sample_seed(cfg.seed, cell.task, cell.context_s, cell.split, job.index);
                HaystackSample sample = generate_sample(in, tcfg, cell.task, cell.context_s,
                                                        cell.split, job.index, seed);
                std::vector<std::string> probs = check_sample(sample, &templates, &tcfg);
                write_series_blob(out / sample.series_ref, sample.series, cfg.rate);
                lines[k] = canonical_line(sample_to_json(sample));
                ids[k] = sample.id;
                if (!probs.empty()) {
                    std::lock_guard lk(fail_mu);
                    for (const std::string& p : probs)
                        problems.push_back(sample.id + ": " + p);
                }
            } catch (...) {
                std::lock_guard lk(fail_mu);
                if (!first_error)
                    first_error = std::current_exception();
            }
        }
    };

    int workers = cfg.jobs > 0 ? cfg.jobs : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, workers);
    workers = static_cast<int>(std::min<size_t>(workers, std::max<size_t>(jobs.size(), 1)));
    std::vector<std::thread> pool;
    for (int i = 0; i < workers; ++i)
        pool.emplace_back(work);
    for (auto& t : pool)
        t.join();
    if (first_error)
        std::rethrow_exception(first_error);
    if (!problems.empty())
        throw DataError("generated dataset failed its self-check:" + join_problems(problems));

    std::vector<size_t> order(jobs.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return ids[a] < ids[b]; });
    std::string buf;
    for (size_t k : order) {
        buf += lines[k];
        buf += '\n';
    }
    atomic_write(out / "samples.jsonl", buf);

    GenStats stats;
    stats.samples = static_cast<int64_t>(jobs.size());
    stats.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return stats;
}

void run_index(const RunConfig& cfg) {
    Corpus corpus = load_corpus(cfg);
    SplitAssignment splits = make_splits(cfg, corpus);
    json root;
    root["rate"] = cfg.rate;
    json jsplits = json::object();
    for (const std::string& split : split_names()) {
        const std::set<std::string>& participants = splits.ids(split);
        BoutIndex index = BoutIndex::build(corpus, participants);
        json js;
        js["participants"] = std::vector<std::string>(participants.begin(), participants.end());
        json classes = json::object();
        for (int c = 0; c < kNumClasses; ++c) {
            ActivityClass cls = static_cast<ActivityClass>(c);
            const std::vector<Bout>& bouts = index.bouts_of(cls);
            int64_t total = 0;
            int64_t longest = 0;
            json list = json::array();
            for (const Bout& b : bouts) {
                total += b.length();
                longest = std::max(longest, b.length());
                list.push_back({{"participant", b.rec->participant_id},
                                {"start", b.start},
                                {"end", b.end}});
            }
            classes[class_name(cls)] = {{"count", bouts.size()},
                                        {"total_samples", total},
                                        {"longest", longest},
                                        {"bouts", std::move(list)}};
        }
        js["classes"] = std::move(classes);
        jsplits[split] = std::move(js);
    }
    root["splits"] = std::move(jsplits);
    fs::create_directories(cfg.out_dir);
    atomic_write(fs::path(cfg.out_dir) / "bout_index.json", root.dump(2) + "\n");
}

DetectReport run_validate(const RunConfig& cfg) {
    Corpus corpus = corpus_at_rate(cfg, cfg.detect.rate);
    DetectReport rep = run_detectability(corpus, cfg.detect);
    json j;
    j["pass"] = rep.pass;
    json contexts = json::array();
    for (const ContextDetectReport& c : rep.contexts) {
        contexts.push_back({{"context_s", c.context_s},
                            {"auc_blended", c.auc_blended},
                            {"auc_control", c.auc_control},
                            {"pass_blended", c.pass_blended},
                            {"pass_control", c.pass_control}});
    }
    j["contexts"] = std::move(contexts);
    j["band"] = {{"lo", cfg.detect.auc_lo}, {"hi", cfg.detect.auc_hi}};
    j["control_min"] = cfg.detect.control_min;
    fs::create_directories(cfg.out_dir);
    atomic_write(fs::path(cfg.out_dir) / "detect_report.json", j.dump(2) + "\n");
    return rep;
}

SliceStats run_slice(const RunConfig& cfg) {
    Corpus corpus = load_corpus(cfg);
    SplitAssignment splits = make_splits(cfg, corpus);
    fs::path out = cfg.out_dir;
    fs::create_directories(out);
    int64_t window_len = llround(cfg.classification.window_s * cfg.rate);
    SliceStats stats;
    json summary = json::object();
    for (const std::string& split : split_names()) {
        uint64_t seed = hash_string(hash_string(cfg.seed, "slice"), split);
        ClassifSlice slice =
            slice_classification(corpus, splits.ids(split), window_len,
                                 cfg.classification.budget_of(split),
                                 cfg.classification.threshold, seed);
        std::string buf;
        for (const ClassifWindow& w : slice.windows) {
            json j;
            j["participant"] = w.participant;
            j["start"] = w.start;
            j["length"] = w.length;
            j["label"] = class_name(w.label);
            j["coverage"] = w.coverage;
            buf += canonical_line(j);
            buf += '\n';
        }
        atomic_write(out / ("classification_" + split + ".jsonl"), buf);
        summary[split] = {{"windows", slice.windows.size()}, {"method", slice.method}};
        stats.windows[split] = static_cast<int64_t>(slice.windows.size());
    }
    atomic_write(out / "classification_summary.json", summary.dump(2) + "\n");
    return stats;
}

std::vector<HaystackSample> load_samples(const fs::path& jsonl) {
    std::ifstream in(jsonl, std::ios::binary);
    if (!in)
        throw DataError("cannot open " + jsonl.string());
    std::vector<HaystackSample> samples;
    std::string line;
    int64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw DataError(jsonl.string() + ":" + std::to_string(lineno) + ": invalid JSON");
        samples.push_back(sample_from_json(j));
    }
    return samples;
}

ScoreReport run_score(const RunConfig& cfg, const fs::path& transcripts_path) {
    fs::path out = cfg.out_dir;
    std::vector<HaystackSample> samples = load_samples(out / "samples.jsonl");

    std::ifstream in(transcripts_path, std::ios::binary);
    if (!in)
        throw DataError("cannot open " + transcripts_path.string());
    std::map<std::string, std::string> transcripts;
    std::string line;
    int64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("sample_id") ||
            !j.contains("transcript"))
            throw DataError(transcripts_path.string() + ":" + std::to_string(lineno) +
                            ": expected {\"sample_id\", \"transcript\"}");
        transcripts[j.at("sample_id").get<std::string>()] =
            j.at("transcript").get<std::string>();
    }

    std::vector<SampleScore> scores;
    scores.reserve(samples.size());
    std::set<std::string> known;
    int64_t missing = 0;
    for (const HaystackSample& s : samples) {
        known.insert(s.id);
        auto it = transcripts.find(s.id);
        if (it == transcripts.end()) {
            ++missing;
            continue;
        }
        scores.push_back(score_one(s, it->second, cfg.scoring.rule));
    }
    int64_t unknown = 0;
    for (const auto& [id, _] : transcripts)
        if (!known.count(id))
            ++unknown;

    ScoreReport rep = aggregate(scores, cfg.tasks, cfg.contexts, cfg.task_configs,
                                cfg.scoring.rule, cfg.scoring.n_mc, cfg.seed);
    if (missing > 0)
        rep.warnings.push_back(std::to_string(missing) + " samples had no transcript");
    if (unknown > 0)
        rep.warnings.push_back(std::to_string(unknown) + " transcripts matched no sample id");

    atomic_write(out / "report.json", report_to_json(rep).dump(2) + "\n");
    atomic_write(out / "report.txt", render_report(rep));
    return rep;
}

CheckResult check_dataset(const RunConfig& cfg) {
    fs::path out = cfg.out_dir;
    std::vector<HaystackSample> samples = load_samples(out / "samples.jsonl");
    TemplatePack templates = load_templates(cfg);
    CheckResult res;
    res.samples = static_cast<int64_t>(samples.size());
    std::set<std::string> seen;
    for (const HaystackSample& s : samples) {
        if (!seen.insert(s.id).second)
            res.problems.push_back(s.id + ": duplicate id");
        const TaskConfig* tcfg = nullptr;
        auto it = cfg.task_configs.find(s.task);
        if (it != cfg.task_configs.end())
            tcfg = &it->second;
        for (const std::string& p : check_sample(s, &templates, tcfg))
            res.problems.push_back(s.id + ": " + p);
        fs::path blob = out / s.series_ref;
        if (!fs::exists(blob)) {
            res.problems.push_back(s.id + ": missing series blob " + s.series_ref);
            continue;
        }
        try {
            SeriesBlob b = read_series_blob(blob);
            int64_t want = llround(s.context_s * s.rate);
            int64_t got = static_cast<int64_t>(b.series[0].size());
            if (got != want)
                res.problems.push_back(s.id + ": blob holds " + std::to_string(got) +
                                       " samples, expected " + std::to_string(want));
            if (b.rate != s.rate)
                res.problems.push_back(s.id + ": blob rate " + std::to_string(b.rate) +
                                       " != sample rate " + std::to_string(s.rate));
        } catch (const std::exception& e) {
            res.problems.push_back(s.id + ": " + e.what());
        }
    }
    return res;
}

} // namespace tshs
