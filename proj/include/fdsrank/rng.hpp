#pragma once

#include <cstdint>

namespace fdsrank {

// Deterministic 64-bit generator (splitmix64).  Used everywhere randomness is
// needed so that results depend only on the seed, not on the standard
// library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform value in [0, bound), unbiased via rejection.  bound must be > 0.
    std::uint64_t below(std::uint64_t bound) {
        std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold)
                return r % bound;
        }
    }

private:
    std::uint64_t state_;
};

// Seed for the stream of a numbered subtask (e.g. one Monte Carlo trial).
// Trial i of a run with master seed s always draws from Rng(derive_stream_seed(s, i)),
// so per-trial results are reproducible regardless of scheduling.
inline std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t index) {
    Rng mix(master ^ (0x632be59bd9b4e019ULL * (index + 1)));
    return mix.next_u64();
}

} // namespace fdsrank
