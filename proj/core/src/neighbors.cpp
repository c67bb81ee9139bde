#include "cbboost/neighbors.hpp"

#include <algorithm>
#include <utility>

#include "cbboost/error.hpp"

namespace cbboost {

std::vector<std::size_t> nearest_neighbors(const FeatureMatrix& points, std::span<const double> query,
    std::span<const std::size_t> candidates, std::size_t k, std::optional<std::size_t> exclude)
{
    const auto p = static_cast<std::size_t>(points.cols());
    if (query.size() != p)
        throw Error("knn", "query dimension differs from point dimension");

    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(candidates.size());
    for (std::size_t idx : candidates) {
        if (exclude && idx == *exclude)
            continue;
        const double* row = points.data() + idx * p;
        double d2 = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            const double diff = row[j] - query[j];
            d2 += diff * diff;
        }
        scored.emplace_back(d2, idx);
    }
    if (scored.size() < k)
        throw Error("knn", "only " + std::to_string(scored.size()) + " candidates for k = " + std::to_string(k));

    // pair ordering is (distance, index): the tie rule comes for free.
    const auto mid = scored.begin() + static_cast<std::ptrdiff_t>(k);
    if (mid != scored.end())
        std::nth_element(scored.begin(), mid, scored.end());
    std::sort(scored.begin(), mid);

    std::vector<std::size_t> out;
    out.reserve(k);
    for (auto it = scored.begin(); it != mid; ++it)
        out.push_back(it->second);
    return out;
}

} // namespace cbboost
