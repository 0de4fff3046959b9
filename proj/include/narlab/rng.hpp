#pragma once

// Deterministic random source. std::mt19937_64 has a fixed cross-platform
// bit stream, but the standard distributions and std::shuffle do not, so the
// draw helpers here are hand-rolled to keep transcripts byte-reproducible.

#include <cstdint>
#include <random>
#include <vector>

namespace narlab {

// Small consecutive seeds produce correlated mt19937_64 start states, so the
// seed is scrambled first (splitmix64 step).
inline std::uint64_t scramble_seed(std::uint64_t s) {
    s += 0x9E3779B97F4A7C15ull;
    s = (s ^ (s >> 30)) * 0xBF58476D1CE4E5B9ull;
    s = (s ^ (s >> 27)) * 0x94D049BB133111EBull;
    return s ^ (s >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(scramble_seed(seed)) {}

    void reseed(std::uint64_t seed) { gen_.seed(scramble_seed(seed)); }

    std::uint64_t next_bits() { return gen_(); }

    // Uniform double in [0, 1) built from the top 53 bits.
    double next_unit() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    // Uniform index in [0, n). Modulo bias is negligible for the small n
    // used here (operation counts, block shuffles).
    std::size_t next_index(std::size_t n) {
        return static_cast<std::size_t>(gen_() % n);
    }

    // Fisher-Yates; identical order on every platform for a given seed.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = next_index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 gen_;
};

} // namespace narlab
