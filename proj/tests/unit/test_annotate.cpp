#include "tshs/annotate.hpp"

#include "tshs/errors.hpp"
#include "tshs/prompts.hpp"
#include "tshs/serialize.hpp"
#include "tshs/templates.hpp"

#include <doctest.h>
#include <httplib.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

using namespace tshs;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kKeyVar = "TSHS_TEST_KEY";

HaystackSample counting_sample(int64_t index) {
    HaystackSample s;
    char idx[16];
    std::snprintf(idx, sizeof(idx), "%06lld", static_cast<long long>(index));
    s.id = std::string("counting_2.56s_train_") + idx;
    s.task = TaskFamily::Counting;
    s.context_s = 2.56;
    s.rate = 50.0;
    s.split = "train";
    s.index = index;
    s.participant = "P000";
    s.start_clock_ms = 30'000'000;
    s.timeline = {{ActivityClass::Sitting, 0, 500, false},
                  {ActivityClass::Walking, 500, 700, true},
                  {ActivityClass::Sitting, 700, 1'200, false},
                  {ActivityClass::Walking, 1'200, 1'400, true},
                  {ActivityClass::Sitting, 1'400, 2'000, false},
                  {ActivityClass::Walking, 2'000, 2'200, true},
                  {ActivityClass::Sitting, 2'200, 2'560, false}};
    s.question = "How many separate bouts of walking activity does this recording contain?";
    s.template_id = 0;
    s.answer = Answer::integer(3);
    s.answer_text = "3";
    s.slots = {{"activity", "walking"}};
    s.seed = 7;
    s.series_ref = "series/" + s.id + ".tshs";
    for (auto& ch : s.series)
        ch.assign(128, 0.5f);
    return s;
}

// Writes blobs plus samples.jsonl; returns the original canonical lines.
std::vector<std::string> write_mini_dataset(const fs::path& out, int n) {
    fs::create_directories(out / "series");
    std::vector<std::string> lines;
    std::string buf;
    for (int i = 0; i < n; ++i) {
        HaystackSample s = counting_sample(i);
        write_series_blob(out / s.series_ref, s.series, s.rate);
        lines.push_back(canonical_line(sample_to_json(s)));
        buf += lines.back();
        buf += '\n';
    }
    atomic_write(out / "samples.jsonl", buf);
    return lines;
}

std::vector<std::string> read_lines(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(f, line))
        if (!line.empty())
            lines.push_back(line);
    return lines;
}

// One stub endpoint per test: handler decides status and body.
struct StubServer {
    httplib::Server svr;
    std::thread th;
    int port = 0;
    std::atomic<int> hits{0};

    template <typename Handler>
    explicit StubServer(Handler handler) {
        svr.Post("/v1/chat", [this, handler](const httplib::Request& req,
                                             httplib::Response& res) {
            hits.fetch_add(1);
            handler(req, res);
        });
        port = svr.bind_to_any_port("127.0.0.1");
        REQUIRE(port > 0);
        th = std::thread([this] { svr.listen_after_bind(); });
        svr.wait_until_ready();
    }

    ~StubServer() {
        svr.stop();
        th.join();
    }

    std::string endpoint() const {
        return "http://127.0.0.1:" + std::to_string(port) + "/v1/chat";
    }
};

RunConfig annotate_config(const fs::path& out, const std::string& endpoint) {
    RunConfig cfg = default_run_config();
    cfg.out_dir = out.string();
    cfg.annotate.endpoint = endpoint;
    cfg.annotate.model = "stub-model";
    cfg.annotate.credential_env = kKeyVar;
    cfg.annotate.rps = 1'000.0;
    cfg.annotate.max_attempts = 2;
    return cfg;
}

fs::path fresh_dir(const std::string& name) {
    fs::path p = fs::temp_directory_path() / "tshs_annotate_tests" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

} // namespace

TEST_SUITE("annotate") {

TEST_CASE("cot request spells out the evidence and the gold answer") {
    AnnotateConfig cfg;
    cfg.model = "stub-model";
    cfg.endpoint = "http://example.invalid/v1/chat";
    HaystackSample s = counting_sample(0);
    AnnotationRequest req = build_cot_request(s, cfg);

    CHECK(req.sample_id == s.id);
    CHECK(req.model == "stub-model");
    CHECK(req.plot_svg.empty());
    const std::string& p = req.prompt;
    CHECK(p.find("Activity Timeline (Ground Truth):") != std::string::npos);
    CHECK(p.find("Question: " + s.question) != std::string::npos);
    CHECK(p.find("Gold answer: 3") != std::string::npos);
    CHECK(p.find("\"Answer: 3\"") != std::string::npos);
    CHECK(p.find("Signal statistics:") != std::string::npos);
    CHECK(p.find("mean 0.5 g") != std::string::npos);
    CHECK(p.find("Bout boundaries") != std::string::npos);
    CHECK(p.find("500 -- 700: walking [inserted]") != std::string::npos);

    // three inserted bouts appear in both the clock timeline and the
    // boundary list
    size_t markers = 0;
    for (size_t pos = p.find("[inserted]"); pos != std::string::npos;
         pos = p.find("[inserted]", pos + 1))
        ++markers;
    CHECK(markers == 6);

    cfg.send_plot = true;
    AnnotationRequest with_plot = build_cot_request(s, cfg);
    CHECK(with_plot.plot_svg.rfind("<svg", 0) == 0);

    HaystackSample no_series = counting_sample(0);
    for (auto& ch : no_series.series)
        ch.clear();
    CHECK_THROWS_AS(build_cot_request(no_series, cfg), DataError);
}

TEST_CASE("successful annotation fills rationales and nothing else") {
    fs::path out = fresh_dir("ok");
    auto original = write_mini_dataset(out, 3);
    setenv(kKeyVar, "sekrit", 1);

    StubServer server([](const httplib::Request& req, httplib::Response& res) {
        auto body = json::parse(req.body);
        CHECK(body.at("model") == "stub-model");
        CHECK(body.at("messages").at(0).at("role") == "user");
        std::string content = body.at("messages").at(0).at("content").get<std::string>();
        CHECK(content.find("Gold answer:") != std::string::npos);
        CHECK(req.get_header_value("Authorization") == "Bearer sekrit");
        json reply = {{"choices",
                       json::array({{{"message",
                                      {{"content", "The three bursts are plain to see."}}}}})}};
        res.set_content(reply.dump(), "application/json");
    });

    RunConfig cfg = annotate_config(out, server.endpoint());
    AnnotateStats stats = annotate_dataset(cfg);
    CHECK(stats.annotated == 3);
    CHECK(stats.skipped == 0);
    CHECK(stats.failed == 0);
    CHECK(server.hits.load() == 3);

    auto samples = read_lines(out / "samples.jsonl");
    REQUIRE(samples.size() == 3);
    for (size_t i = 0; i < samples.size(); ++i) {
        auto j = json::parse(samples[i]);
        CHECK(j.at("rationale") == "The three bursts are plain to see.");
        // removing the rationale restores the original bytes exactly
        j.erase("rationale");
        CHECK(canonical_line(j) == original[i]);
    }

    // a second pass skips everything without touching the endpoint
    AnnotateStats rerun = annotate_dataset(cfg);
    CHECK(rerun.annotated == 0);
    CHECK(rerun.skipped == 3);
    CHECK(server.hits.load() == 3);

    // force redoes the work
    cfg.annotate.force = true;
    AnnotateStats forced = annotate_dataset(cfg);
    CHECK(forced.annotated == 3);
    CHECK(server.hits.load() == 6);
}

TEST_CASE("persistent rejection leaves the sample untouched and is audited") {
    fs::path out = fresh_dir("reject");
    auto original = write_mini_dataset(out, 1);
    setenv(kKeyVar, "sekrit", 1);

    StubServer server([](const httplib::Request&, httplib::Response& res) {
        res.status = 429;
        res.set_content("slow down", "text/plain");
    });

    RunConfig cfg = annotate_config(out, server.endpoint());
    AnnotateStats stats = annotate_dataset(cfg);
    CHECK(stats.annotated == 0);
    CHECK(stats.failed == 1);
    CHECK(server.hits.load() == 2); // max_attempts

    auto samples = read_lines(out / "samples.jsonl");
    REQUIRE(samples.size() == 1);
    CHECK(samples[0] == original[0]);

    auto audit = read_lines(out / "annotate_audit.jsonl");
    REQUIRE(audit.size() == 2);
    for (const auto& line : audit) {
        auto j = json::parse(line);
        CHECK(j.at("outcome") == "bad_status");
        CHECK(j.at("status") == 429);
        CHECK(j.at("authorization") == "Bearer ***");
        CHECK(line.find("sekrit") == std::string::npos);
    }
}

TEST_CASE("a completion without text is a failure, not a blank rationale") {
    fs::path out = fresh_dir("empty");
    auto original = write_mini_dataset(out, 1);
    setenv(kKeyVar, "sekrit", 1);

    StubServer server([](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"choices": []})", "application/json");
    });

    RunConfig cfg = annotate_config(out, server.endpoint());
    AnnotateStats stats = annotate_dataset(cfg);
    CHECK(stats.annotated == 0);
    CHECK(stats.failed == 1);
    CHECK(read_lines(out / "samples.jsonl")[0] == original[0]);

    auto audit = read_lines(out / "annotate_audit.jsonl");
    REQUIRE_FALSE(audit.empty());
    CHECK(json::parse(audit.back()).at("outcome") == "empty_completion");
}

TEST_CASE("missing credentials stop the run before any request") {
    fs::path out = fresh_dir("nokey");
    write_mini_dataset(out, 1);
    unsetenv(kKeyVar);

    StubServer server([](const httplib::Request&, httplib::Response& res) {
        res.set_content("{}", "application/json");
    });

    RunConfig cfg = annotate_config(out, server.endpoint());
    CHECK_THROWS_AS(annotate_dataset(cfg), ConfigError);
    CHECK(server.hits.load() == 0);

    cfg.annotate.endpoint = "";
    setenv(kKeyVar, "sekrit", 1);
    CHECK_THROWS_AS(annotate_dataset(cfg), ConfigError);

    cfg.annotate.endpoint = "not-a-url";
    CHECK_THROWS_AS(annotate_dataset(cfg), ConfigError);
}

TEST_CASE("unreachable endpoints fail without corrupting the dataset") {
    fs::path out = fresh_dir("unreachable");
    auto original = write_mini_dataset(out, 1);
    setenv(kKeyVar, "sekrit", 1);

    // a port that nothing listens on
    RunConfig cfg = annotate_config(out, "http://127.0.0.1:1/v1/chat");
    cfg.annotate.max_attempts = 1;
    AnnotateStats stats = annotate_dataset(cfg);
    CHECK(stats.failed == 1);
    CHECK(read_lines(out / "samples.jsonl")[0] == original[0]);
    auto audit = read_lines(out / "annotate_audit.jsonl");
    REQUIRE_FALSE(audit.empty());
    CHECK(json::parse(audit.back()).at("outcome") == "transport_failure");
}

} // TEST_SUITE
