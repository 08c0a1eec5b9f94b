#include "tshs/annotate.hpp"

#include "tshs/clock.hpp"
#include "tshs/errors.hpp"
#include "tshs/plot.hpp"
#include "tshs/runner.hpp"
#include "tshs/serialize.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace tshs {

namespace {

std::string fmt(const char* f, double v) {
    char buf[64];
    snprintf(buf, sizeof(buf), f, v);
    return buf;
}

std::string base64(const std::string& in) {
    static const char* tab = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((in.size() + 2) / 3 * 4);
    size_t i = 0;
    while (i + 3 <= in.size()) {
        uint32_t v = (uint8_t(in[i]) << 16) | (uint8_t(in[i + 1]) << 8) | uint8_t(in[i + 2]);
        out += tab[v >> 18];
        out += tab[(v >> 12) & 63];
        out += tab[(v >> 6) & 63];
        out += tab[v & 63];
        i += 3;
    }
    if (i + 1 == in.size()) {
        uint32_t v = uint8_t(in[i]) << 16;
        out += tab[v >> 18];
        out += tab[(v >> 12) & 63];
        out += "==";
    } else if (i + 2 == in.size()) {
        uint32_t v = (uint8_t(in[i]) << 16) | (uint8_t(in[i + 1]) << 8);
        out += tab[v >> 18];
        out += tab[(v >> 12) & 63];
        out += tab[(v >> 6) & 63];
        out += '=';
    }
    return out;
}

struct UrlParts {
    std::string base; // scheme://host[:port]
    std::string path;
    bool https = false;
};

UrlParts split_url(const std::string& url) {
    size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw ConfigError("annotate.endpoint must be an http(s) URL, got \"" + url + "\"");
    UrlParts parts;
    parts.https = url.compare(0, scheme_end, "https") == 0;
    size_t path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        parts.base = url;
        parts.path = "/";
    } else {
        parts.base = url.substr(0, path_start);
        parts.path = url.substr(path_start);
    }
    return parts;
}

// Shared spacing of request starts so the endpoint's rate limit holds across
// all workers.
class RateGate {
public:
    explicit RateGate(double rps) {
        if (rps > 0)
            interval_ = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                std::chrono::duration<double>(1.0 / rps));
    }

    void wait() {
        if (interval_.count() == 0)
            return;
        std::chrono::steady_clock::time_point slot;
        {
            std::lock_guard lk(mu_);
            auto now = std::chrono::steady_clock::now();
            if (next_ < now)
                next_ = now;
            slot = next_;
            next_ += interval_;
        }
        std::this_thread::sleep_until(slot);
    }

private:
    std::mutex mu_;
    std::chrono::steady_clock::time_point next_{};
    std::chrono::steady_clock::duration interval_{};
};

class Audit {
public:
    explicit Audit(const fs::path& path) : out_(path, std::ios::app | std::ios::binary) {}

    void log(json line) {
        line["authorization"] = "Bearer ***";
        line["ts_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::system_clock::now().time_since_epoch())
                            .count();
        std::lock_guard lk(mu_);
        out_ << line.dump() << "\n";
        out_.flush();
    }

private:
    std::mutex mu_;
    std::ofstream out_;
};

std::string timeline_block(const HaystackSample& sample) {
    std::string block = "Activity Timeline (Ground Truth):\n";
    for (const TimelineEntry& e : sample.timeline) {
        ClockRange r{sample.clock_at_ms(e.start_ms).ms, sample.clock_at_ms(e.end_ms).ms};
        block += format_clock_range(r) + ": " + class_name(e.cls);
        if (e.inserted)
            block += " [inserted]";
        block += "\n";
    }
    return block;
}

std::string boundaries_block(const HaystackSample& sample) {
    std::string block = "Bout boundaries (ms within the window):\n";
    for (const TimelineEntry& e : sample.timeline) {
        block += "  " + std::to_string(e.start_ms) + " -- " + std::to_string(e.end_ms) + ": " +
                 class_name(e.cls);
        if (e.inserted)
            block += " [inserted]";
        block += "\n";
    }
    return block;
}

std::string stats_block(const HaystackSample& sample) {
    static const char* axes[3] = {"x", "y", "z"};
    std::string block = "Signal statistics:\n";
    for (int c = 0; c < 3; ++c) {
        const std::vector<float>& ch = sample.series[c];
        double mean = 0.0;
        for (float v : ch)
            mean += v;
        if (!ch.empty())
            mean /= static_cast<double>(ch.size());
        double var = 0.0;
        for (float v : ch)
            var += (v - mean) * (v - mean);
        if (!ch.empty())
            var /= static_cast<double>(ch.size());
        block += std::string("  ") + axes[c] + ": mean " + fmt("%.6g", mean) + " g, variance " +
                 fmt("%.6g", var) + "\n";
    }
    return block;
}

struct Pending {
    size_t line_idx;
    HaystackSample sample;
};

struct Attempt {
    bool transport_ok = false;
    int status = 0;
    std::string body;
};

} // namespace

AnnotationRequest build_cot_request(const HaystackSample& sample, const AnnotateConfig& cfg) {
    if (sample.timeline.empty())
        throw DataError("sample " + sample.id + " has no timeline");
    if (sample.series[0].empty())
        throw DataError("sample " + sample.id + " has no series loaded");

    std::string prompt =
        "Write a chain-of-thought rationale for the accelerometer sample below. The correct "
        "answer is already known; explain step by step how the signal evidence supports it, as "
        "if solving the question fresh, and end with \"Answer: " +
        sample.answer_text + "\"\n\n";
    prompt += timeline_block(sample);
    prompt += "\n";
    prompt += boundaries_block(sample);
    prompt += "\n";
    prompt += stats_block(sample);
    prompt += "\nQuestion: " + sample.question + "\n";
    prompt += "\nGold answer: " + sample.answer_text + "\n";

    AnnotationRequest req;
    req.sample_id = sample.id;
    req.prompt = std::move(prompt);
    if (cfg.send_plot)
        req.plot_svg = render_plot(sample);
    req.model = cfg.model;
    req.endpoint = cfg.endpoint;
    return req;
}

const std::string& annotate_outcome_name(AnnotateOutcome outcome) {
    static const std::string names[] = {"ok", "skipped", "network_error", "status_error",
                                        "empty_completion"};
    return names[static_cast<size_t>(outcome)];
}

AnnotateStats annotate_dataset(const RunConfig& cfg) {
    const AnnotateConfig& ac = cfg.annotate;
    if (ac.endpoint.empty())
        throw ConfigError("annotate.endpoint is required");
    if (ac.credential_env.empty())
        throw ConfigError("annotate.credential_env is required");
    const char* key = std::getenv(ac.credential_env.c_str());
    if (key == nullptr || *key == '\0')
        throw ConfigError("credential environment variable " + ac.credential_env +
                          " is not set; refusing to touch the network");
    UrlParts url = split_url(ac.endpoint);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (url.https)
        throw ConfigError("this build lacks TLS support; use an http endpoint");
#endif

    fs::path out = cfg.out_dir;
    fs::path samples_path = out / "samples.jsonl";
    std::ifstream in(samples_path, std::ios::binary);
    if (!in)
        throw DataError("cannot open " + samples_path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line))
        lines.push_back(line);
    in.close();

    AnnotateStats stats;
    std::vector<Pending> pending;
    for (size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty())
            continue;
        json j = json::parse(lines[i], nullptr, false);
        if (j.is_discarded())
            throw DataError(samples_path.string() + ":" + std::to_string(i + 1) +
                            ": invalid JSON");
        HaystackSample sample = sample_from_json(j);
        if (!sample.rationale.empty() && !ac.force) {
            ++stats.skipped;
            continue;
        }
        SeriesBlob blob = read_series_blob(out / sample.series_ref);
        sample.series = std::move(blob.series);
        pending.push_back({i, std::move(sample)});
    }

    RateGate gate(ac.rps);
    Audit audit(out / "annotate_audit.jsonl");
    std::atomic<size_t> next{0};
    std::mutex mu;
    std::atomic<int64_t> annotated{0};
    std::atomic<int64_t> failed{0};

    auto work = [&] {
        httplib::Client client(url.base);
        client.set_connection_timeout(10, 0);
        client.set_read_timeout(60, 0);
        std::string auth = std::string("Bearer ") + key;
        for (;;) {
            size_t k = next.fetch_add(1);
            if (k >= pending.size())
                return;
            Pending& p = pending[k];
            AnnotationRequest req = build_cot_request(p.sample, ac);

            json body;
            body["model"] = req.model;
            if (req.plot_svg.empty()) {
                body["messages"] = json::array({{{"role", "user"}, {"content", req.prompt}}});
            } else {
                json content = json::array();
                content.push_back({{"type", "text"}, {"text", req.prompt}});
                content.push_back(
                    {{"type", "image_url"},
                     {"image_url",
                      {{"url", "data:image/svg+xml;base64," + base64(req.plot_svg)}}}});
                body["messages"] = json::array({{{"role", "user"}, {"content", content}}});
            }
            std::string payload = body.dump();

            AnnotateOutcome outcome = AnnotateOutcome::NetworkError;
            std::string detail;
            std::string rationale;
            for (int attempt = 1; attempt <= ac.max_attempts; ++attempt) {
                gate.wait();
                httplib::Headers headers = {{"Authorization", auth}};
                auto res = client.Post(url.path, headers, payload, "application/json");
                json entry;
                entry["sample_id"] = req.sample_id;
                entry["attempt"] = attempt;
                entry["endpoint"] = req.endpoint;
                entry["model"] = req.model;
                if (!res) {
                    outcome = AnnotateOutcome::NetworkError;
                    detail = "transport: " + httplib::to_string(res.error());
                    entry["outcome"] = "transport_failure";
                    entry["detail"] = detail;
                    audit.log(std::move(entry));
                } else if (res->status < 200 || res->status >= 300) {
                    outcome = AnnotateOutcome::StatusError;
                    detail = "status " + std::to_string(res->status);
                    entry["outcome"] = "bad_status";
                    entry["status"] = res->status;
                    audit.log(std::move(entry));
                } else {
                    entry["status"] = res->status;
                    json rj = json::parse(res->body, nullptr, false);
                    std::string text;
                    if (!rj.is_discarded()) {
                        json::json_pointer ptr(ac.response_pointer);
                        if (rj.contains(ptr) && rj.at(ptr).is_string())
                            text = rj.at(ptr).get<std::string>();
                    }
                    if (text.empty()) {
                        outcome = AnnotateOutcome::EmptyCompletion;
                        detail = "no completion text at " + ac.response_pointer;
                        entry["outcome"] = "empty_completion";
                        entry["detail"] = detail;
                        audit.log(std::move(entry));
                    } else {
                        outcome = AnnotateOutcome::Ok;
                        rationale = std::move(text);
                        entry["outcome"] = "ok";
                        entry["response_chars"] = rationale.size();
                        audit.log(std::move(entry));
                        break;
                    }
                }
                if (attempt < ac.max_attempts)
                    std::this_thread::sleep_for(std::chrono::milliseconds(250) * (1 << (attempt - 1)));
            }

            if (outcome == AnnotateOutcome::Ok) {
                json j = json::parse(lines[p.line_idx]);
                j["rationale"] = rationale;
                std::string newline_text = canonical_line(j);
                std::lock_guard lk(mu);
                lines[p.line_idx] = std::move(newline_text);
                annotated.fetch_add(1);
            } else {
                failed.fetch_add(1);
            }
        }
    };

    int width = std::max(1, ac.concurrency);
    width = static_cast<int>(std::min<size_t>(width, std::max<size_t>(pending.size(), 1)));
    std::vector<std::thread> pool;
    for (int i = 0; i < width; ++i)
        pool.emplace_back(work);
    for (auto& t : pool)
        t.join();

    stats.annotated = annotated.load();
    stats.failed = failed.load();

    std::string buf;
    for (const std::string& l : lines) {
        buf += l;
        buf += '\n';
    }
    atomic_write(samples_path, buf);
    return stats;
}

} // namespace tshs
