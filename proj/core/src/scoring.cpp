#include "tshs/scoring.hpp"

#include "tshs/errors.hpp"
#include "tshs/rng.hpp"
#include "tshs/taskgen.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <regex>
#include <set>

namespace tshs {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
    for (auto& c : s)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

std::optional<bool> parse_flag(const std::string& payload) {
    std::string low = lower(payload);
    size_t i = 0;
    while (i < low.size() && !is_word_char(low[i]))
        ++i;
    size_t j = i;
    while (j < low.size() && is_word_char(low[j]))
        ++j;
    std::string word = low.substr(i, j - i);
    if (word == "yes" || word == "true")
        return true;
    if (word == "no" || word == "false")
        return false;
    return std::nullopt;
}

std::optional<int64_t> parse_count(const std::string& payload) {
    for (size_t i = 0; i < payload.size(); ++i) {
        if (std::isdigit(static_cast<unsigned char>(payload[i]))) {
            size_t j = i;
            while (j < payload.size() && std::isdigit(static_cast<unsigned char>(payload[j])))
                ++j;
            try {
                return std::stoll(payload.substr(i, j - i));
            } catch (...) {
                return std::nullopt;
            }
        }
    }
    static const char* words[] = {"zero", "one", "two",   "three", "four", "five",
                                  "six",  "seven", "eight", "nine",  "ten"};
    std::string low = lower(payload);
    for (int64_t n = 0; n <= 10; ++n) {
        auto pos = low.find(words[n]);
        if (pos != std::string::npos &&
            (pos == 0 || !is_word_char(low[pos - 1])) &&
            (pos + std::string(words[n]).size() == low.size() ||
             !is_word_char(low[pos + std::string(words[n]).size()])))
            return n;
    }
    return std::nullopt;
}

std::optional<ActivityClass> parse_category(const std::string& payload) {
    std::string low = lower(payload);
    std::optional<ActivityClass> best;
    size_t best_pos = std::string::npos;
    size_t best_len = 0;
    for (auto cls : all_classes()) {
        std::string canon = class_name(cls);
        std::string spaced = canon;
        std::replace(spaced.begin(), spaced.end(), '-', ' ');
        for (const std::string& name : {canon, spaced}) {
            size_t pos = 0;
            while ((pos = low.find(name, pos)) != std::string::npos) {
                bool left_ok = pos == 0 || !is_word_char(low[pos - 1]);
                size_t end = pos + name.size();
                bool right_ok = end == low.size() || !is_word_char(low[end]);
                if (left_ok && right_ok) {
                    if (pos < best_pos || (pos == best_pos && name.size() > best_len)) {
                        best = cls;
                        best_pos = pos;
                        best_len = name.size();
                    }
                    break;
                }
                ++pos;
            }
        }
    }
    return best;
}

std::vector<ClockTime> parse_times(const std::string& payload) {
    static const std::regex pat(
        R"((\d{1,2}):(\d{2}):(\d{2})(?::(\d{3}))?(?:\s*([AaPp])[\.]?[Mm])?)");
    std::vector<ClockTime> out;
    auto begin = std::sregex_iterator(payload.begin(), payload.end(), pat);
    for (auto it = begin; it != std::sregex_iterator(); ++it) {
        const std::smatch& m = *it;
        int h = std::stoi(m[1].str());
        int minute = std::stoi(m[2].str());
        int sec = std::stoi(m[3].str());
        int ms = m[4].matched ? std::stoi(m[4].str()) : 0;
        if (m[5].matched) {
            char ap = static_cast<char>(std::tolower(static_cast<unsigned char>(m[5].str()[0])));
            if (h < 1 || h > 12)
                continue;
            h %= 12;
            if (ap == 'p')
                h += 12;
        }
        if (h > 23 || minute > 59 || sec > 59)
            continue;
        out.push_back(ClockTime::of(((h * 60 + minute) * 60 + sec) * 1000LL + ms));
    }
    return out;
}

std::optional<ClockRange> parse_range(const std::string& payload) {
    auto times = parse_times(payload);
    if (times.size() < 2)
        return std::nullopt;
    return ClockRange{times[0].ms, times[1].ms};
}

int64_t circular_distance(int64_t a, int64_t b) {
    int64_t d = std::abs(a - b) % kMsPerDay;
    return std::min(d, kMsPerDay - d);
}

} // namespace

std::optional<std::string> answer_payload(const std::string& transcript) {
    static const std::string marker = "Answer:";
    auto pos = transcript.rfind(marker);
    if (pos == std::string::npos)
        return std::nullopt;
    return trim(transcript.substr(pos + marker.size()));
}

ParsedAnswer parse_answer(const std::string& transcript, AnswerKind kind) {
    ParsedAnswer out;
    out.value.kind = kind;
    auto payload = answer_payload(transcript);
    if (!payload) {
        out.status = ParseStatus::MissingMarker;
        return out;
    }
    out.payload = *payload;
    out.status = ParseStatus::Unparseable;
    switch (kind) {
    case AnswerKind::Bool: {
        auto flag = parse_flag(out.payload);
        if (flag) {
            out.value.flag = *flag;
            out.status = ParseStatus::Ok;
        }
        break;
    }
    case AnswerKind::Int: {
        auto n = parse_count(out.payload);
        if (n) {
            out.value.count = *n;
            out.status = ParseStatus::Ok;
        }
        break;
    }
    case AnswerKind::Category: {
        auto cls = parse_category(out.payload);
        if (cls) {
            out.value.category = cls;
            out.status = ParseStatus::Ok;
        }
        break;
    }
    case AnswerKind::TimeRange: {
        auto range = parse_range(out.payload);
        if (range) {
            out.value.range = range;
            out.status = ParseStatus::Ok;
        }
        break;
    }
    case AnswerKind::Compound: {
        auto flag = parse_flag(out.payload);
        if (!flag)
            break;
        out.value.flag = *flag;
        out.value.category = parse_category(out.payload);
        out.value.range = parse_range(out.payload);
        out.status = ParseStatus::Ok;
        break;
    }
    }
    return out;
}

double range_iou(const ClockRange& gold, const ClockRange& pred) {
    double gd = static_cast<double>(gold.duration_ms());
    double pd = static_cast<double>(pred.duration_ms());
    if (gd <= 0.0 && pd <= 0.0)
        return 1.0;
    // Shift the prediction into the gold range's frame, wrapping around
    // midnight toward the nearest representation.
    int64_t rel = ((pred.start_ms - gold.start_ms) % kMsPerDay + kMsPerDay) % kMsPerDay;
    if (rel > kMsPerDay / 2)
        rel -= kMsPerDay;
    double lo = static_cast<double>(rel);
    double hi = lo + pd;
    double inter = std::max(0.0, std::min(gd, hi) - std::max(0.0, lo));
    double uni = gd + pd - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

bool range_matches(const ClockRange& gold, const ClockRange& pred, const ScoreRule& rule) {
    if (rule.kind == RangeRule::Iou)
        return range_iou(gold, pred) >= rule.iou_threshold - 1e-12;
    auto tol = static_cast<int64_t>(std::llround(rule.abs_tolerance_s * 1000.0));
    return circular_distance(gold.start_ms, pred.start_ms) <= tol &&
           circular_distance(gold.end_ms, pred.end_ms) <= tol;
}

bool score_sample(const ParsedAnswer& pred, const Answer& gold, const ScoreRule& rule) {
    if (pred.status != ParseStatus::Ok)
        return false;
    switch (gold.kind) {
    case AnswerKind::Bool:
        return pred.value.flag == gold.flag;
    case AnswerKind::Int:
        return pred.value.count == gold.count;
    case AnswerKind::Category:
        return pred.value.category == gold.category;
    case AnswerKind::TimeRange:
        return pred.value.range && range_matches(*gold.range, *pred.value.range, rule);
    case AnswerKind::Compound:
        if (pred.value.flag != gold.flag)
            return false;
        if (!gold.flag)
            return true;
        if (!pred.value.category || pred.value.category != gold.category)
            return false;
        if (gold.range)
            return pred.value.range && range_matches(*gold.range, *pred.value.range, rule);
        return true;
    }
    return false;
}

SampleScore score_one(const HaystackSample& gold, const std::string& transcript,
                      const ScoreRule& rule) {
    SampleScore s;
    s.id = gold.id;
    s.task = gold.task;
    s.context_s = gold.context_s;
    ParsedAnswer pred = parse_answer(transcript, gold.answer.kind);
    s.status = pred.status;
    s.correct = score_sample(pred, gold.answer, rule);
    if (gold.answer.kind == AnswerKind::Category) {
        s.gold_category = gold.answer.category;
        s.pred_category = pred.status == ParseStatus::Ok ? pred.value.category : std::nullopt;
    }
    return s;
}

namespace {

struct Sim {
    double frac_lo;
    double frac_hi;
    double margin;
};

ClockRange draw_range(Rng& rng, const Sim& sim, double window_ms) {
    double frac = rng.uniform(sim.frac_lo, sim.frac_hi);
    double dur = frac * window_ms;
    double lo = sim.margin * window_ms;
    double hi = (1.0 - sim.margin) * window_ms - dur;
    double start = hi > lo ? rng.uniform(lo, hi) : lo;
    auto s = static_cast<int64_t>(std::llround(start));
    auto e = static_cast<int64_t>(std::llround(start + dur));
    return ClockRange{ClockTime::of(s).ms, ClockTime::of(e).ms};
}

BaselineResult simulate(TaskFamily task, const TaskConfig& cfg, int n_mc, uint64_t seed,
                        const ScoreRule& rule, double context_s) {
    Rng rng(seed);
    double window_ms = context_s * 1000.0;
    Sim sim{cfg.needle_lo, cfg.needle_hi, cfg.margin_frac};
    int hits = 0;
    for (int t = 0; t < n_mc; ++t) {
        bool hit = false;
        switch (answer_kind_of(task)) {
        case AnswerKind::Bool:
            hit = rng.coin() == rng.coin();
            break;
        case AnswerKind::Int:
            hit = rng.range(cfg.bouts_lo, cfg.bouts_hi) == rng.range(cfg.bouts_lo, cfg.bouts_hi);
            break;
        case AnswerKind::Category:
            hit = rng.below(kNumClasses) == rng.below(kNumClasses);
            break;
        case AnswerKind::TimeRange: {
            ClockRange gold = draw_range(rng, sim, window_ms);
            ClockRange guess = draw_range(rng, sim, window_ms);
            hit = range_matches(gold, guess, rule);
            break;
        }
        case AnswerKind::Compound: {
            bool gold_flag = rng.coin();
            Regime bg = rng.coin() ? Regime::Sedentary : Regime::Active;
            auto opposite =
                classes_in_regime(bg == Regime::Sedentary ? Regime::Active : Regime::Sedentary);
            ActivityClass gold_cls = opposite[rng.below(opposite.size())];
            ClockRange gold_range = draw_range(rng, sim, window_ms);
            bool guess_flag = rng.coin();
            auto guess_cls = static_cast<ActivityClass>(rng.below(kNumClasses));
            ClockRange guess_range = draw_range(rng, sim, window_ms);
            if (guess_flag != gold_flag)
                break;
            if (!gold_flag) {
                hit = true;
                break;
            }
            hit = guess_cls == gold_cls &&
                  (task != TaskFamily::AnomalyLocalization ||
                   range_matches(gold_range, guess_range, rule));
            break;
        }
        }
        if (hit)
            ++hits;
    }
    BaselineResult out;
    out.trials = n_mc;
    double p = static_cast<double>(hits) / static_cast<double>(n_mc);
    out.pct = 100.0 * p;
    double se = std::sqrt(std::max(p * (1.0 - p), 1e-12) / static_cast<double>(n_mc));
    out.ci_lo = 100.0 * std::max(0.0, p - 1.96 * se);
    out.ci_hi = 100.0 * std::min(1.0, p + 1.96 * se);
    return out;
}

} // namespace

BaselineResult random_baseline(TaskFamily task, const TaskConfig& cfg, int n_mc, uint64_t seed,
                               const ScoreRule& rule) {
    switch (answer_kind_of(task)) {
    case AnswerKind::Bool: {
        BaselineResult r;
        r.pct = 50.0;
        r.closed_form = true;
        return r;
    }
    case AnswerKind::Int: {
        BaselineResult r;
        r.pct = 100.0 / static_cast<double>(cfg.bouts_hi - cfg.bouts_lo + 1);
        r.closed_form = true;
        return r;
    }
    case AnswerKind::Category: {
        BaselineResult r;
        r.pct = 100.0 / static_cast<double>(kNumClasses);
        r.closed_form = true;
        return r;
    }
    default:
        if (n_mc < 10000)
            throw ConfigError("Monte-Carlo baselines need at least 10000 trials");
        return simulate(task, cfg, n_mc, seed, rule, 3600.0);
    }
}

BaselineResult monte_carlo_baseline(TaskFamily task, const TaskConfig& cfg, int n_mc,
                                    uint64_t seed, const ScoreRule& rule, double context_s) {
    return simulate(task, cfg, n_mc, seed, rule, context_s);
}

double macro_f1(const std::vector<int>& preds, const std::vector<int>& golds) {
    if (golds.empty() || preds.size() != golds.size())
        throw ConfigError("macro_f1 needs matched nonempty label vectors");
    std::set<int> classes(golds.begin(), golds.end());
    double sum = 0.0;
    for (int c : classes) {
        int64_t tp = 0;
        int64_t fp = 0;
        int64_t fn = 0;
        for (size_t i = 0; i < golds.size(); ++i) {
            bool g = golds[i] == c;
            bool p = preds[i] == c;
            tp += g && p;
            fp += !g && p;
            fn += g && !p;
        }
        double denom = static_cast<double>(2 * tp + fp + fn);
        sum += denom > 0.0 ? 2.0 * static_cast<double>(tp) / denom : 0.0;
    }
    return sum / static_cast<double>(classes.size());
}

double balanced_accuracy(const std::vector<int>& preds, const std::vector<int>& golds) {
    if (golds.empty() || preds.size() != golds.size())
        throw ConfigError("balanced_accuracy needs matched nonempty label vectors");
    std::set<int> classes(golds.begin(), golds.end());
    double sum = 0.0;
    for (int c : classes) {
        int64_t tp = 0;
        int64_t total = 0;
        for (size_t i = 0; i < golds.size(); ++i) {
            if (golds[i] != c)
                continue;
            ++total;
            tp += preds[i] == c;
        }
        sum += static_cast<double>(tp) / static_cast<double>(total);
    }
    return sum / static_cast<double>(classes.size());
}

ScoreReport aggregate(const std::vector<SampleScore>& scores,
                      const std::vector<TaskFamily>& tasks, const std::vector<double>& contexts,
                      const std::map<TaskFamily, TaskConfig>& configs, const ScoreRule& rule,
                      int n_mc, uint64_t seed) {
    ScoreReport report;
    report.tasks = tasks;
    report.contexts = contexts;
    for (auto task : tasks) {
        for (double ctx : contexts) {
            CellScore cell;
            cell.task = task;
            cell.context_s = ctx;
            std::vector<int> gold_labels;
            std::vector<int> pred_labels;
            for (const auto& s : scores) {
                if (s.task != task || s.context_s != ctx)
                    continue;
                ++cell.total;
                cell.correct += s.correct;
                cell.missing_marker += s.status == ParseStatus::MissingMarker;
                cell.unparseable += s.status == ParseStatus::Unparseable;
                if (s.gold_category) {
                    gold_labels.push_back(static_cast<int>(*s.gold_category));
                    pred_labels.push_back(
                        s.pred_category ? static_cast<int>(*s.pred_category) : -1);
                }
            }
            if (cell.total == 0) {
                report.warnings.push_back("no scored samples for " + task_name(task) + " at " +
                                          context_label(ctx) + "; excluded from averages");
            } else {
                cell.accuracy_pct =
                    100.0 * static_cast<double>(cell.correct) / static_cast<double>(cell.total);
                if (!gold_labels.empty()) {
                    cell.macro_f1 = macro_f1(pred_labels, gold_labels);
                    cell.balanced_acc = balanced_accuracy(pred_labels, gold_labels);
                }
            }
            report.cells.push_back(std::move(cell));
        }
    }
    for (auto task : tasks) {
        auto it = configs.find(task);
        TaskConfig cfg = it != configs.end() ? it->second : default_task_config(task);
        report.baselines[task] = random_baseline(
            task, cfg, n_mc, hash_combine(seed, static_cast<uint64_t>(task)), rule);
    }
    return report;
}

std::string render_report(const ScoreReport& report) {
    auto cell_at = [&](TaskFamily task, double ctx) -> const CellScore* {
        for (const auto& c : report.cells)
            if (c.task == task && c.context_s == ctx)
                return &c;
        return nullptr;
    };
    std::string out;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%-22s", "Task");
    out += buf;
    for (double ctx : report.contexts) {
        std::snprintf(buf, sizeof(buf), "%9s", context_label(ctx).c_str());
        out += buf;
    }
    std::snprintf(buf, sizeof(buf), "%9s", "Rand %");
    out += buf;
    out += "\n";
    std::vector<double> col_sum(report.contexts.size(), 0.0);
    std::vector<int> col_n(report.contexts.size(), 0);
    for (auto task : report.tasks) {
        std::snprintf(buf, sizeof(buf), "%-22s", task_name(task).c_str());
        out += buf;
        for (size_t i = 0; i < report.contexts.size(); ++i) {
            const CellScore* c = cell_at(task, report.contexts[i]);
            if (!c || c->total == 0) {
                std::snprintf(buf, sizeof(buf), "%9s", "--");
            } else {
                std::snprintf(buf, sizeof(buf), "%9.1f", c->accuracy_pct);
                col_sum[i] += c->accuracy_pct;
                ++col_n[i];
            }
            out += buf;
        }
        auto bit = report.baselines.find(task);
        if (bit == report.baselines.end()) {
            std::snprintf(buf, sizeof(buf), "%9s", "--");
        } else {
            std::snprintf(buf, sizeof(buf), "%9.1f", bit->second.pct);
        }
        out += buf;
        out += "\n";
    }
    std::snprintf(buf, sizeof(buf), "%-22s", "Average");
    out += buf;
    for (size_t i = 0; i < report.contexts.size(); ++i) {
        if (col_n[i] == 0) {
            std::snprintf(buf, sizeof(buf), "%9s", "--");
        } else {
            std::snprintf(buf, sizeof(buf), "%9.1f", col_sum[i] / col_n[i]);
        }
        out += buf;
    }
    out += "\n";
    for (const auto& c : report.cells) {
        if (!c.macro_f1)
            continue;
        std::snprintf(buf, sizeof(buf), "%.3f", *c.macro_f1);
        out += "\n" + task_name(c.task) + " @ " + context_label(c.context_s) +
               ": macro-F1 " + buf;
        std::snprintf(buf, sizeof(buf), "%.3f", *c.balanced_acc);
        out += ", balanced accuracy " + std::string(buf);
    }
    for (const auto& w : report.warnings)
        out += "\nwarning: " + w;
    out += "\n";
    return out;
}

} // namespace tshs
