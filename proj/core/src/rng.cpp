#include "tshs/rng.hpp"

#include <string>

namespace tshs {

uint64_t hash_combine(uint64_t seed, uint64_t value) {
    uint64_t state = seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
    return splitmix64(state);
}

uint64_t hash_string(uint64_t seed, const std::string& s) {
    // FNV-1a folded into the running seed.
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return hash_combine(seed, h);
}

} // namespace tshs
