#pragma once

#include <cstdint>
#include <vector>

namespace lsinf {

/// splitmix64-based generator. Hand-rolled rather than <random> so that
/// identical seeds give byte-identical report files on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

    /// A fresh generator whose stream is independent of this one's future;
    /// used to keep sub-tasks deterministic regardless of evaluation order.
    Rng fork() { return Rng(next_u64() ^ 0xd1b54a32d192ed03ULL); }

private:
    std::uint64_t state_;
};

}  // namespace lsinf
