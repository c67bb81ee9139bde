#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "cbboost/dataset.hpp"

namespace cbboost {

class Rng;

inline constexpr double below_all_threshold = -std::numeric_limits<double>::infinity();

// One-level decision tree: predicts `polarity` when x[feature] > threshold and
// -polarity otherwise. The -inf threshold is the constant classifier.
struct Stump {
    std::size_t feature = 0;
    double threshold = below_all_threshold;
    int polarity = 1;

    int predict(std::span<const double> x) const;
    bool operator==(const Stump&) const = default;
};

struct StumpFit {
    Stump stump;
    double weighted_error = 0.0;
};

// Exact weighted stump learner. Sorted feature orders are computed once so that
// repeated training on the same matrix (one call per boosting round) costs
// O(n p) per call.
//
// The returned stump minimises sum_i w_i [h(x_i) != y_i] over every feature,
// every threshold in {-inf} u {midpoints of consecutive distinct values} and
// both polarities. Ties go to the lower feature, then the lower threshold,
// then polarity +1.
class StumpTrainer {
public:
    explicit StumpTrainer(const FeatureMatrix& features);

    StumpFit train(std::span<const int> labels, std::span<const double> weights) const;

    std::size_t size() const noexcept { return n_; }

private:
    struct Column {
        std::vector<std::size_t> order;
        // group_end[g] is one past the last sorted position holding the g-th distinct value
        std::vector<std::size_t> group_end;
        std::vector<double> thresholds; // midpoint after each group except the last
    };

    std::size_t n_ = 0;
    std::vector<Column> columns_;
};

StumpFit train_stump(const FeatureMatrix& features, std::span<const int> labels, std::span<const double> weights);

int predict_stump(const Stump& s, std::span<const double> x);

// Weights proportional to the multiplicities of n draws with replacement from
// `distribution`, normalised to sum to 1.
std::vector<double> resample_weights(std::span<const double> distribution, Rng& rng);

} // namespace cbboost
