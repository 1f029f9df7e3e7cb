#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace timelinekit {

// splitmix64 step; used to mix seeds so derived streams are decorrelated.
std::uint64_t mix_seed(std::uint64_t x);

// Derive an independent stream seed from (base, stream). Deterministic and
// order-free, so data-parallel work can seed per item.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

// Deterministic RNG. mt19937_64 supplies bits; all distributions are
// hand-rolled because the std:: distribution algorithms are
// implementation-defined and would break cross-platform reproducibility.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(mix_seed(seed)) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1).
    double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [lo, hi], inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

    bool chance(double p) { return uniform() < p; }

    // Standard normal via Box-Muller (both values consumed; no cached state).
    double normal();
    double normal(double mu, double sigma) { return mu + sigma * normal(); }

    // Rejection-sampled truncated normal; sigma == 0 returns clamp(mu).
    // Falls back to clamping after 64 rejected draws.
    double truncated_normal(double mu, double sigma, double lo, double hi);

    template <typename T>
    const T& pick(const std::vector<T>& v) {
        return v[static_cast<size_t>(uniform_int(0, static_cast<std::int64_t>(v.size()) - 1))];
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(uniform_int(0, static_cast<std::int64_t>(i) - 1));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    std::mt19937_64 gen_;
};

}  // namespace timelinekit
