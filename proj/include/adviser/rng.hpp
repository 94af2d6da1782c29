#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace adviser {

// All randomness in the project flows through this wrapper. mt19937_64 output
// is pinned by the standard; the distribution transforms are implemented here
// because std:: distributions are implementation-defined and would break the
// byte-identical reproducibility contract.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform double in [0, 1)
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // unbiased integer in [0, n)
    std::uint64_t uniform_index(std::uint64_t n) {
        const std::uint64_t limit = n * (UINT64_MAX / n);
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    // Box-Muller; the spare value is discarded so each call consumes a fixed
    // amount of the stream regardless of call history.
    double gaussian(double mean = 0.0, double sigma = 1.0) {
        double u1;
        do {
            u1 = uniform01();
        } while (u1 <= 0.0);
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + sigma * r * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(uniform_index(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_bytes(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;  // FNV-1a
    }
    return h;
}

// Substream key for (seed, tag, id-string, index). Used to hand out
// independent deterministic streams, e.g. one per (instance, keypoint).
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t tag,
                                    std::string_view id = {}, std::uint64_t index = 0) {
    std::uint64_t h = splitmix64(seed ^ splitmix64(tag));
    if (!id.empty()) h = splitmix64(h ^ hash_bytes(id));
    return splitmix64(h ^ splitmix64(index + 0x51ed2701ULL));
}

}  // namespace adviser
