#include "tshs/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

using namespace tshs;

TEST_SUITE("rng") {

TEST_CASE("stream is frozen") {
    Rng r(1);
    CHECK(r.next_u64() == 14971601782005023387ULL);
    CHECK(r.next_u64() == 13781649495232077965ULL);
    CHECK(r.next_u64() == 1847458086238483744ULL);
    CHECK(r.next_u64() == 13765271635752736470ULL);
}

TEST_CASE("same seed, same stream; different seed, different stream") {
    Rng a(42), b(42), c(43);
    bool all_equal = true;
    bool any_differ = false;
    for (int i = 0; i < 64; ++i) {
        uint64_t va = a.next_u64();
        all_equal = all_equal && va == b.next_u64();
        any_differ = any_differ || va != c.next_u64();
    }
    CHECK(all_equal);
    CHECK(any_differ);
}

TEST_CASE("below stays in range and covers it") {
    Rng r(7);
    std::set<uint64_t> seen;
    for (int i = 0; i < 1000; ++i) {
        uint64_t v = r.below(7);
        CHECK(v < 7);
        seen.insert(v);
    }
    CHECK(seen.size() == 7);
    CHECK_THROWS_AS(r.below(0), std::invalid_argument);
}

TEST_CASE("range is inclusive on both ends") {
    Rng r(9);
    std::set<int64_t> seen;
    for (int i = 0; i < 500; ++i) {
        int64_t v = r.range(-2, 2);
        CHECK(v >= -2);
        CHECK(v <= 2);
        seen.insert(v);
    }
    CHECK(seen.count(-2) == 1);
    CHECK(seen.count(2) == 1);
    CHECK(r.range(5, 5) == 5);
    CHECK_THROWS_AS(r.range(3, 2), std::invalid_argument);
}

TEST_CASE("uniform lands in [0,1) and respects custom bounds") {
    Rng r(11);
    for (int i = 0; i < 1000; ++i) {
        double u = r.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        double v = r.uniform(3.0, 5.0);
        CHECK(v >= 3.0);
        CHECK(v < 5.0);
    }
}

TEST_CASE("normal has roughly standard moments") {
    Rng r(13);
    const int n = 20000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        double x = r.normal();
        sum += x;
        sq += x * x;
    }
    double mean = sum / n;
    double var = sq / n - mean * mean;
    CHECK(std::abs(mean) < 0.03);
    CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("weighted follows the weights") {
    Rng r(17);
    const std::vector<double> w = {0.4, 0.4, 0.2};
    int counts[3] = {0, 0, 0};
    const int n = 50000;
    for (int i = 0; i < n; ++i)
        ++counts[r.weighted(w)];
    CHECK(std::abs(counts[0] / double(n) - 0.4) < 0.02);
    CHECK(std::abs(counts[1] / double(n) - 0.4) < 0.02);
    CHECK(std::abs(counts[2] / double(n) - 0.2) < 0.02);
    const std::vector<double> zero = {0.0, 0.0};
    CHECK_THROWS_AS(r.weighted(zero), std::invalid_argument);
}

TEST_CASE("shuffle permutes and is seed-deterministic") {
    std::vector<int> v(20);
    for (int i = 0; i < 20; ++i)
        v[i] = i;
    std::vector<int> a = v, b = v;
    Rng ra(23), rb(23);
    ra.shuffle(a);
    rb.shuffle(b);
    CHECK(a == b);
    std::vector<int> sorted_a = a;
    std::sort(sorted_a.begin(), sorted_a.end());
    CHECK(sorted_a == v);
    CHECK(a != v); // 20! permutations; identity would be astonishing
}

TEST_CASE("hash helpers are stable and input-sensitive") {
    CHECK(hash_string(0, "a") == 18412106973715859535ULL);
    CHECK(hash_combine(1, 2) == 11812867941337419652ULL);
    CHECK(hash_string(0, "a") == hash_string(0, "a"));
    CHECK(hash_string(0, "a") != hash_string(0, "b"));
    CHECK(hash_string(0, "ab") != hash_string(1, "ab"));
    CHECK(hash_combine(1, 2) != hash_combine(2, 1));
    CHECK(hash_string(0, "abc") != hash_string(0, "ab"));
}

} // TEST_SUITE
