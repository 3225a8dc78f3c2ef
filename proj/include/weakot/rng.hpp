#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace weakot {

/**
@brief Seeded random source with a pinned bit-to-double mapping.

std::mt19937_64 output is fully specified by the standard; the distributions
are not. Mapping the raw 64-bit words ourselves keeps every seeded sweep
bit-identical across standard libraries.
*/
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi], inclusive.
    long uniform_int(long lo, long hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo + 1);
        return lo + static_cast<long>(gen_() % span);
    }

    /// Standard exponential variate, strictly positive.
    double exponential() { return -std::log1p(-uniform()); }

  private:
    std::mt19937_64 gen_;
};

} // namespace weakot
