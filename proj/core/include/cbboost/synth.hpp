#pragma once

#include <cstdint>
#include <span>
#include <string_view>

#include "cbboost/dataset.hpp"

namespace cbboost {

enum class Scenario { normal, sine };

Scenario parse_scenario(std::string_view name);
std::string_view scenario_name(Scenario s);

// Two unit-covariance Gaussian classes: floor(n/2) points labelled -1 around
// (0,0) and ceil(n/2) labelled +1 around (2,2), shuffled.
Dataset gen_normal(std::size_t n, std::uint64_t seed);

// Points uniform on [-3,3]^2 with P(label = +1 | x) = logistic(2 g(x)),
// g(x) = (x2 - 3 sin x1) / 2.
Dataset gen_sine(std::size_t n, std::uint64_t seed);

Dataset generate(Scenario s, std::size_t n, std::uint64_t seed);

double sine_margin(std::span<const double> x);
double sine_positive_probability(std::span<const double> x);

// Bayes-optimal label; ties go to +1.
int bayes_label(Scenario s, std::span<const double> x);

} // namespace cbboost
