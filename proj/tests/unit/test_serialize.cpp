#include "tshs/errors.hpp"
#include "tshs/rng.hpp"
#include "tshs/serialize.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <unordered_set>

using namespace tshs;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    fs::path p = fs::temp_directory_path() / "tshs_ser_tests";
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

HaystackSample example_sample() {
    HaystackSample s;
    s.id = "existence_10s_train_000003";
    s.task = TaskFamily::Existence;
    s.context_s = 10.0;
    s.rate = 50.0;
    s.split = "train";
    s.index = 3;
    s.participant = "P002";
    s.start_clock_ms = 41'000'500;
    s.timeline = {{ActivityClass::Walking, 0, 4'000, false},
                  {ActivityClass::Sports, 4'000, 4'700, true},
                  {ActivityClass::Walking, 4'700, 10'000, false}};
    s.question = "Is there any sports activity present in this recording?";
    s.template_id = 0;
    s.answer = Answer::yes_no(true);
    s.answer_text = "Yes.";
    s.slots = {{"activity", "sports"}};
    s.seed = 0xDEADBEEFCAFEULL;
    s.series_ref = "series/existence_10s_train_000003.tshs";
    return s;
}

} // namespace

TEST_SUITE("serialize") {

TEST_CASE("series blob write-read-write is byte-identical") {
    Series3 series;
    Rng rng(3);
    for (auto& ch : series) {
        ch.resize(777);
        for (auto& v : ch)
            v = static_cast<float>(rng.uniform(-2.0, 2.0));
    }
    fs::path p1 = temp_dir() / "a.tshs";
    fs::path p2 = temp_dir() / "b.tshs";
    write_series_blob(p1, series, 50.0);
    SeriesBlob blob = read_series_blob(p1);
    CHECK(blob.rate == doctest::Approx(50.0));
    REQUIRE(blob.series[0].size() == 777);
    for (int c = 0; c < 3; ++c)
        CHECK(blob.series[c] == series[c]);
    write_series_blob(p2, blob.series, blob.rate);
    CHECK(slurp(p1) == slurp(p2));
    CHECK(fs::file_size(p1) == 4 + 2 + 1 + 4 + 8 + 3 * 777 * 4);
}

TEST_CASE("blob header is validated") {
    fs::path p = temp_dir() / "junk.tshs";
    {
        std::ofstream f(p, std::ios::binary);
        f << "NOPE this is not a blob";
    }
    CHECK_THROWS_AS(read_series_blob(p), DataError);
    CHECK_THROWS_AS(read_series_blob(temp_dir() / "absent.tshs"), DataError);

    // truncated payload
    Series3 series;
    for (auto& ch : series)
        ch.assign(100, 0.5f);
    write_series_blob(p, series, 50.0);
    std::string bytes = slurp(p);
    {
        std::ofstream f(p, std::ios::binary);
        f.write(bytes.data(), static_cast<std::streamsize>(bytes.size() - 7));
    }
    CHECK_THROWS_AS(read_series_blob(p), DataError);
}

TEST_CASE("sample json round-trips every field") {
    HaystackSample s = example_sample();
    s.rationale = "because the burst is there";
    HaystackSample back = sample_from_json(sample_to_json(s));
    CHECK(back.id == s.id);
    CHECK(back.task == s.task);
    CHECK(back.context_s == s.context_s);
    CHECK(back.rate == s.rate);
    CHECK(back.split == s.split);
    CHECK(back.index == s.index);
    CHECK(back.participant == s.participant);
    CHECK(back.start_clock_ms == s.start_clock_ms);
    REQUIRE(back.timeline.size() == 3);
    CHECK(back.timeline[1].cls == ActivityClass::Sports);
    CHECK(back.timeline[1].start_ms == 4'000);
    CHECK(back.timeline[1].inserted);
    CHECK(back.question == s.question);
    CHECK(back.template_id == s.template_id);
    CHECK(back.answer == s.answer);
    CHECK(back.answer_text == s.answer_text);
    CHECK(back.slots == s.slots);
    CHECK(back.seed == s.seed);
    CHECK(back.series_ref == s.series_ref);
    CHECK(back.rationale == s.rationale);
}

TEST_CASE("rationale is omitted until present") {
    HaystackSample s = example_sample();
    CHECK_FALSE(sample_to_json(s).contains("rationale"));
    s.rationale = "text";
    CHECK(sample_to_json(s).contains("rationale"));
}

TEST_CASE("answers of every kind round-trip") {
    for (const Answer& a :
         {Answer::yes_no(false), Answer::integer(4), Answer::of_category(ActivityClass::Vehicle),
          Answer::of_range({82'800'000, 3'600'000}),
          Answer::compound(false, std::nullopt, std::nullopt),
          Answer::compound(true, ActivityClass::Sleep, ClockRange{100, 200})}) {
        Answer back = answer_from_json(answer_to_json(a));
        CHECK(back == a);
    }
}

TEST_CASE("canonical lines are sorted, compact and stable") {
    nlohmann::json a = {{"zebra", 1}, {"apple", 2}, {"mid", nlohmann::json{{"y", 1}, {"x", 2}}}};
    std::string line = canonical_line(a);
    CHECK(line == R"({"apple":2,"mid":{"x":2,"y":1},"zebra":1})");
    nlohmann::json b = nlohmann::json::parse(line);
    CHECK(canonical_line(b) == line);

    HaystackSample s = example_sample();
    std::string l1 = canonical_line(sample_to_json(s));
    std::string l2 = canonical_line(sample_to_json(sample_from_json(sample_to_json(s))));
    CHECK(l1 == l2);
    CHECK(l1.find('\n') == std::string::npos);
}

TEST_CASE("seed derivation is stable and order-free") {
    uint64_t a = derive_sample_seed(1, TaskFamily::Counting, 10.0, "train", 5);
    uint64_t b = derive_sample_seed(1, TaskFamily::Counting, 10.0, "train", 5);
    CHECK(a == b);
    CHECK(a != derive_sample_seed(1, TaskFamily::Counting, 10.0, "train", 6));
    CHECK(a != derive_sample_seed(1, TaskFamily::Counting, 10.0, "val", 5));
    CHECK(a != derive_sample_seed(1, TaskFamily::Counting, 2.56, "train", 5));
    CHECK(a != derive_sample_seed(1, TaskFamily::Existence, 10.0, "train", 5));
    CHECK(a != derive_sample_seed(2, TaskFamily::Counting, 10.0, "train", 5));
}

TEST_CASE("a million distinct tuples collide nowhere") {
    // 10 tasks x 2 contexts x 2 splits x 25,000 indices
    std::unordered_set<uint64_t> seen;
    seen.reserve(1'100'000);
    const double contexts[2] = {2.56, 3600.0};
    const char* splits[2] = {"train", "test"};
    for (int t = 0; t < kNumTasks; ++t)
        for (double ctx : contexts)
            for (const char* split : splits)
                for (int64_t i = 0; i < 25'000; ++i)
                    seen.insert(derive_sample_seed(99, static_cast<TaskFamily>(t), ctx, split, i));
    CHECK(seen.size() == 1'000'000);
}

TEST_CASE("atomic_write lands the full content and cleans up") {
    fs::path dir = temp_dir() / "atomic" / "deeper";
    fs::path p = dir / "out.txt";
    atomic_write(p, "hello\nworld\n");
    CHECK(slurp(p) == "hello\nworld\n");
    atomic_write(p, "second");
    CHECK(slurp(p) == "second");
    int entries = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir))
        ++entries;
    CHECK(entries == 1); // no stray temp files
}

} // TEST_SUITE
