#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace cbboost {

// Deterministic random source. The engine is std::mt19937_64 (bit-exact across
// standard libraries); the distributions are implemented here rather than
// taken from <random>, whose distribution algorithms are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform();

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer on [0, bound). bound must be > 0.
    std::uint64_t uniform_index(std::uint64_t bound);

    // Standard normal via the Box-Muller transform; caches the second variate.
    double normal();

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

// Seed for one stage of one repetition. Stages are identified by a tag so that
// adding a consumer never shifts the streams of the others.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t repetition, std::string_view stage);

} // namespace cbboost
