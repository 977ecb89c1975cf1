#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace wvcp {

// splitmix64, used to whiten seeds before they reach the mt19937_64 state.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_str(std::string_view s) {
    // FNV-1a
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Derives an independent stream seed for one run of an experiment matrix.
// Pure function of its inputs, so the matrix can run in any order or in
// parallel and still be reproducible.
inline std::uint64_t derive_run_seed(std::uint64_t master, std::string_view instance,
                                     std::string_view method, std::uint64_t seed) {
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ hash_str(instance));
    h = splitmix64(h ^ hash_str(method));
    h = splitmix64(h ^ seed);
    return h;
}

// Seeded generator with bounded-uniform draws that do not depend on the
// standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(splitmix64(seed)) {}

    std::uint64_t next() { return eng_(); }

    // uniform in [0, n), n >= 1 (Lemire's rejection method)
    std::uint64_t below(std::uint64_t n) {
        std::uint64_t x = next();
        __uint128_t m = static_cast<__uint128_t>(x) * n;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            std::uint64_t t = (0 - n) % n;
            while (lo < t) {
                x = next();
                m = static_cast<__uint128_t>(x) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // uniform in [lo, hi] inclusive
    long long uniform_int(long long lo, long long hi) {
        return lo + static_cast<long long>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    template <typename Vec>
    const typename Vec::value_type& pick(const Vec& v) {
        return v[below(v.size())];
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace wvcp
