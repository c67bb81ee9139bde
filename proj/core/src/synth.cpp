#include "cbboost/synth.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "cbboost/error.hpp"
#include "cbboost/random.hpp"

namespace cbboost {

Scenario parse_scenario(std::string_view name)
{
    if (name == "normal")
        return Scenario::normal;
    if (name == "sine")
        return Scenario::sine;
    throw Error("synth", "unknown scenario '" + std::string(name) + "'");
}

std::string_view scenario_name(Scenario s)
{
    return s == Scenario::normal ? "normal" : "sine";
}

Dataset gen_normal(std::size_t n, std::uint64_t seed)
{
    if (n < 2)
        throw Error("synth", "need n >= 2");
    Rng rng(seed);
    const std::size_t n_neg = n / 2;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = n - 1; i > 0; --i)
        std::swap(order[i], order[rng.uniform_index(i + 1)]);

    FeatureMatrix x(static_cast<Eigen::Index>(n), 2);
    std::vector<int> y(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto row = static_cast<Eigen::Index>(order[k]);
        const bool positive = k >= n_neg;
        const double shift = positive ? 2.0 : 0.0;
        x(row, 0) = shift + rng.normal();
        x(row, 1) = shift + rng.normal();
        y[order[k]] = positive ? 1 : -1;
    }
    return Dataset(std::move(x), std::move(y));
}

double sine_margin(std::span<const double> x)
{
    return (x[1] - 3.0 * std::sin(x[0])) / 2.0;
}

double sine_positive_probability(std::span<const double> x)
{
    const double g = sine_margin(x);
    return 1.0 / (1.0 + std::exp(-2.0 * g));
}

Dataset gen_sine(std::size_t n, std::uint64_t seed)
{
    if (n < 2)
        throw Error("synth", "need n >= 2");
    Rng rng(seed);
    FeatureMatrix x(static_cast<Eigen::Index>(n), 2);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        x(row, 0) = rng.uniform(-3.0, 3.0);
        x(row, 1) = rng.uniform(-3.0, 3.0);
        const double point[2] = {x(row, 0), x(row, 1)};
        y[i] = rng.bernoulli(sine_positive_probability(point)) ? 1 : -1;
    }
    return Dataset(std::move(x), std::move(y));
}

Dataset generate(Scenario s, std::size_t n, std::uint64_t seed)
{
    return s == Scenario::normal ? gen_normal(n, seed) : gen_sine(n, seed);
}

int bayes_label(Scenario s, std::span<const double> x)
{
    if (x.size() < 2)
        throw Error("synth", "scenario points are two-dimensional");
    const double g = s == Scenario::normal ? x[0] + x[1] - 2.0 : sine_margin(x);
    return g >= 0.0 ? 1 : -1;
}

} // namespace cbboost
