#include "timelinekit/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace timelinekit {

std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return mix_seed(mix_seed(base) ^ mix_seed(stream * 0xd1342543de82ef95ULL + 1));
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
    if (hi <= lo) return lo;
    std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    // Rejection to kill modulo bias; deterministic given the stream.
    std::uint64_t limit = (~0ULL) - (~0ULL) % span;
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return lo + static_cast<std::int64_t>(x % span);
}

double Rng::normal() {
    // Box-Muller, cosine branch only; u1 in (0,1].
    double u1 = 1.0 - uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::truncated_normal(double mu, double sigma, double lo, double hi) {
    if (sigma <= 0.0) return std::clamp(mu, lo, hi);
    for (int i = 0; i < 64; ++i) {
        double x = normal(mu, sigma);
        if (x >= lo && x <= hi) return x;
    }
    return std::clamp(mu, lo, hi);
}

}  // namespace timelinekit
