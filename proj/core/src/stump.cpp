#include "cbboost/stump.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cbboost/error.hpp"
#include "cbboost/random.hpp"

namespace cbboost {

int Stump::predict(std::span<const double> x) const
{
    if (feature >= x.size())
        throw Error("stump", "point has " + std::to_string(x.size()) + " coordinates, stump reads feature "
                + std::to_string(feature));
    return x[feature] > threshold ? polarity : -polarity;
}

int predict_stump(const Stump& s, std::span<const double> x)
{
    return s.predict(x);
}

StumpTrainer::StumpTrainer(const FeatureMatrix& features) : n_(static_cast<std::size_t>(features.rows()))
{
    const auto p = static_cast<std::size_t>(features.cols());
    columns_.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
        auto& col = columns_[j];
        const auto value = [&](std::size_t i) {
            return features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        };
        col.order.resize(n_);
        std::iota(col.order.begin(), col.order.end(), std::size_t{0});
        std::stable_sort(col.order.begin(), col.order.end(),
            [&](std::size_t a, std::size_t b) { return value(a) < value(b); });
        for (std::size_t k = 1; k <= n_; ++k) {
            if (k == n_ || value(col.order[k]) != value(col.order[k - 1])) {
                col.group_end.push_back(k);
                if (k == n_)
                    break;
                const double lo = value(col.order[k - 1]);
                const double hi = value(col.order[k]);
                double mid = lo + (hi - lo) / 2.0;
                if (!(mid < hi))
                    mid = lo;
                col.thresholds.push_back(mid);
            }
        }
    }
}

StumpFit StumpTrainer::train(std::span<const int> labels, std::span<const double> weights) const
{
    if (labels.size() != n_ || weights.size() != n_)
        throw Error("stump", "labels/weights length differs from feature rows");
    double w_pos = 0.0;
    double w_neg = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        if (!(weights[i] >= 0.0) || !std::isfinite(weights[i]))
            throw Error("stump", "weights must be finite and non-negative");
        (labels[i] > 0 ? w_pos : w_neg) += weights[i];
    }
    if (!(w_pos + w_neg > 0.0))
        throw Error("stump", "all weights are zero");

    StumpFit best;
    best.weighted_error = std::numeric_limits<double>::infinity();
    const auto consider = [&](std::size_t feature, double threshold, double err_pos, double err_neg) {
        if (err_pos < best.weighted_error)
            best = {{feature, threshold, 1}, err_pos};
        if (err_neg < best.weighted_error)
            best = {{feature, threshold, -1}, err_neg};
    };

    for (std::size_t j = 0; j < columns_.size(); ++j) {
        const auto& col = columns_[j];
        // Weight at or below the threshold, split by label.
        double left_pos = 0.0;
        double left_neg = 0.0;
        consider(j, below_all_threshold, w_neg, w_pos);
        std::size_t k = 0;
        for (std::size_t g = 0; g + 1 < col.group_end.size(); ++g) {
            for (; k < col.group_end[g]; ++k) {
                const std::size_t i = col.order[k];
                (labels[i] > 0 ? left_pos : left_neg) += weights[i];
            }
            // polarity +1 errs on positives at/below and negatives above; -1 the reverse.
            consider(j, col.thresholds[g], left_pos + (w_neg - left_neg), left_neg + (w_pos - left_pos));
        }
    }
    return best;
}

StumpFit train_stump(const FeatureMatrix& features, std::span<const int> labels, std::span<const double> weights)
{
    return StumpTrainer(features).train(labels, weights);
}

std::vector<double> resample_weights(std::span<const double> distribution, Rng& rng)
{
    const std::size_t n = distribution.size();
    std::vector<double> cumulative(n);
    std::partial_sum(distribution.begin(), distribution.end(), cumulative.begin());
    const double total = n ? cumulative.back() : 0.0;
    if (!(total > 0.0))
        throw Error("stump", "cannot resample from an all-zero distribution");

    std::vector<double> counts(n, 0.0);
    for (std::size_t draw = 0; draw < n; ++draw) {
        const double u = rng.uniform() * total;
        // upper_bound never lands on a zero-probability slot except through rounding at the end.
        auto idx = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u)
            - cumulative.begin());
        if (idx == n)
            idx = n - 1;
        while (distribution[idx] <= 0.0 && idx > 0)
            --idx;
        counts[idx] += 1.0;
    }
    for (double& c : counts)
        c /= static_cast<double>(n);
    return counts;
}

} // namespace cbboost
