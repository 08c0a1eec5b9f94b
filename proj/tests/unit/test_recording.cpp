#include "tshs/errors.hpp"
#include "tshs/recording.hpp"
#include "tshs/synth.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace tshs;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const char* name) {
    fs::path p = fs::temp_directory_path() / "tshs_rec_tests";
    fs::create_directories(p);
    return p / name;
}

Recording tiny_recording() {
    Recording rec;
    rec.participant_id = "P000";
    rec.rate = 50.0;
    rec.start_clock_ms = 3'600'000;
    for (int i = 0; i < 100; ++i) {
        rec.channels[0].push_back(0.001f * static_cast<float>(i));
        rec.channels[1].push_back(-0.5f);
        rec.channels[2].push_back(static_cast<float>(i % 7) * 0.25f);
    }
    rec.annotations = {{0, 40, ActivityClass::Sleep}, {40, 100, ActivityClass::Walking}};
    return rec;
}

} // namespace

TEST_SUITE("recording") {

TEST_CASE("csv save/load round-trips losslessly") {
    Recording rec = tiny_recording();
    fs::path p = temp_file("P000.csv"); // loader takes the participant id from the stem
    save_recording(rec, p);
    Recording back = load_recording(p, LabelMap::identity());
    CHECK(back.participant_id == rec.participant_id);
    CHECK(back.rate == doctest::Approx(rec.rate));
    CHECK(back.start_clock_ms == rec.start_clock_ms);
    REQUIRE(back.length() == rec.length());
    for (int c = 0; c < 3; ++c)
        for (int64_t i = 0; i < rec.length(); ++i)
            CHECK(back.channels[c][i] == rec.channels[c][i]);
    REQUIRE(back.annotations.size() == rec.annotations.size());
    for (size_t i = 0; i < rec.annotations.size(); ++i) {
        CHECK(back.annotations[i].start == rec.annotations[i].start);
        CHECK(back.annotations[i].end == rec.annotations[i].end);
        CHECK(back.annotations[i].cls == rec.annotations[i].cls);
    }

    // And the files themselves converge after one round trip.
    fs::path p2 = temp_file("P000_again.csv");
    save_recording(back, p2);
    std::ifstream f1(p, std::ios::binary), f2(p2, std::ios::binary);
    std::string s1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    std::string s2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(s1 == s2);
}

TEST_CASE("label map renames raw annotations") {
    Recording rec = tiny_recording();
    fs::path p = temp_file("labels.csv");
    save_recording(rec, p);
    fs::path mp = temp_file("map.tsv");
    {
        std::ofstream f(mp);
        f << "sleep\tsitting\nwalking\tsports\n";
    }
    Recording back = load_recording(p, LabelMap::load(mp));
    CHECK(back.annotations[0].cls == ActivityClass::Sitting);
    CHECK(back.annotations[1].cls == ActivityClass::Sports);
}

TEST_CASE("malformed csv is rejected") {
    fs::path p = temp_file("bad.csv");
    {
        std::ofstream f(p);
        f << "time,x,y,z,annotation\n0,0.1,0.2\n";
    }
    CHECK_THROWS_AS(load_recording(p, LabelMap::identity()), DataError);
    {
        std::ofstream f(p);
        f << "time,x,y,z,annotation\n0,0.1,0.2,0.3,flying\n";
    }
    CHECK_THROWS_AS(load_recording(p, LabelMap::identity()), DataError);
    {
        std::ofstream f(p);
        f << "time,x,y,z,annotation\n100,0.1,0.2,0.3,sleep\n60,0.1,0.2,0.3,sleep\n";
    }
    CHECK_THROWS_AS(load_recording(p, LabelMap::identity()), DataError);
}

TEST_CASE("resample decimates by an integer factor") {
    SynthSpec spec;
    spec.participants = 1;
    spec.minutes = 1.0;
    spec.rate = 100.0;
    Recording rec = synth_recording(spec, 0);
    Recording half = resample(rec, 50.0);
    CHECK(half.rate == doctest::Approx(50.0));
    CHECK(half.length() == rec.length() / 2);
    for (int64_t i = 0; i < half.length(); ++i)
        CHECK(half.channels[0][i] == rec.channels[0][2 * i]);
    // annotation boundaries shrink with the stride
    REQUIRE(!half.annotations.empty());
    CHECK(half.annotations.front().start == 0);
    CHECK(half.annotations.back().end == half.length());

    CHECK_THROWS_AS(resample(rec, 80.0), DataError);  // non-integer factor
    CHECK_THROWS_AS(resample(rec, 200.0), DataError); // upsampling
    Recording same = resample(rec, 100.0);
    CHECK(same.length() == rec.length());
}

TEST_CASE("corpus lookup by participant") {
    SynthSpec spec;
    spec.participants = 3;
    spec.minutes = 0.5;
    Corpus corpus = synth_corpus(spec);
    REQUIRE(corpus.find("P001") != nullptr);
    CHECK(corpus.find("P001")->participant_id == "P001");
    CHECK(corpus.find("nope") == nullptr);
    CHECK(corpus.participant_ids().size() == 3);
}

TEST_CASE("split_participants partitions exactly") {
    std::set<std::string> ids;
    for (int i = 0; i < 10; ++i)
        ids.insert(synth_participant_id(i));
    SplitAssignment sp = split_participants(ids, {6, 2, 2}, 99);
    CHECK(sp.train.size() == 6);
    CHECK(sp.val.size() == 2);
    CHECK(sp.test.size() == 2);
    std::set<std::string> all;
    for (const auto& s : sp.train)
        all.insert(s);
    for (const auto& s : sp.val)
        all.insert(s);
    for (const auto& s : sp.test)
        all.insert(s);
    CHECK(all == ids);

    SplitAssignment again = split_participants(ids, {6, 2, 2}, 99);
    CHECK(again.train == sp.train);
    CHECK(again.val == sp.val);
    SplitAssignment other = split_participants(ids, {6, 2, 2}, 100);
    CHECK(other.train != sp.train); // 10-choose-6 layouts; same draw would be a fluke

    CHECK_THROWS_AS(split_participants(ids, {5, 2, 2}, 1), ConfigError);
}

} // TEST_SUITE
