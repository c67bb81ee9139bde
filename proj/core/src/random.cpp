#include "cbboost/random.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace cbboost {

double Rng::uniform()
{
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::uniform_index(std::uint64_t bound)
{
    // Rejection sampling removes the modulo bias.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max()
        - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x = engine_();
    while (x >= limit)
        x = engine_();
    return x % bound;
}

double Rng::normal()
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0)
        u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t repetition, std::string_view stage)
{
    // FNV-1a over the tag, then mixed with base and repetition.
    std::uint64_t tag = 0xcbf29ce484222325ULL;
    for (unsigned char c : stage) {
        tag ^= c;
        tag *= 0x100000001b3ULL;
    }
    return splitmix64(splitmix64(splitmix64(base) ^ repetition) ^ tag);
}

} // namespace cbboost
