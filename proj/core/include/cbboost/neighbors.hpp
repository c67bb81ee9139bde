#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cbboost/dataset.hpp"

namespace cbboost {

// Exact k-nearest-neighbour query by Euclidean distance among `candidates`
// (row indices into `points`). Distance ties go to the lower row index, so the
// result is a deterministic function of its inputs. `exclude` removes one row
// (the query itself) from consideration. Returned nearest first.
std::vector<std::size_t> nearest_neighbors(const FeatureMatrix& points, std::span<const double> query,
    std::span<const std::size_t> candidates, std::size_t k, std::optional<std::size_t> exclude = std::nullopt);

} // namespace cbboost
