#ifndef FORESTWALK_RNG_HPP
#define FORESTWALK_RNG_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "forestwalk/errors.hpp"

namespace forestwalk {

// Deterministic random source. Wraps std::mt19937_64 (whose output sequence
// is fixed by the standard) and derives all values through our own mappings,
// because std::uniform_int_distribution is implementation-defined and would
// break cross-platform reproducibility of seeded experiments.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform draw from [0, n). Rejection sampling avoids modulo bias.
    std::size_t uniform_index(std::size_t n) {
        if (n == 0) {
            throw ContractViolation("uniform_index: empty range");
        }
        if (n == 1) return 0; // no entropy needed
        const std::uint64_t span = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t draw;
        do {
            draw = engine_();
        } while (draw >= limit);
        return static_cast<std::size_t>(draw % span);
    }

    bool coin() { return (engine_() & 1u) != 0; }

    // Fisher-Yates using uniform_index, so shuffles are reproducible too.
    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::swap(items[i - 1], items[uniform_index(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
};

// splitmix64 finalizer; decorrelates nearby inputs. Used to derive
// per-iteration substream seeds from (master seed, iteration index) so that
// iterations are independent and insensitive to execution order.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(master ^ splitmix64(index + 0x51ed2700c373e3ULL));
}

} // namespace forestwalk

#endif // FORESTWALK_RNG_HPP
