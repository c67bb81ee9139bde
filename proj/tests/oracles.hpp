#pragma once

// Independent reference computations used as test oracles. Nothing here calls
// into the library's training code; each routine is the direct, slow reading of
// the definition it checks.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <iterator>
#include <limits>
#include <numbers>
#include <set>
#include <span>
#include <vector>

#include "cbboost/dataset.hpp"
#include "cbboost/random.hpp"
#include "cbboost/stump.hpp"

namespace oracle {

struct StumpChoice {
    std::size_t feature = 0;
    double threshold = 0.0;
    int polarity = 1;
    double error = 0.0;
};

inline std::vector<double> candidate_thresholds(const cbboost::FeatureMatrix& x, std::size_t feature)
{
    std::set<double> distinct;
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        distinct.insert(x(i, static_cast<Eigen::Index>(feature)));
    std::vector<double> out{-std::numeric_limits<double>::infinity()};
    for (auto it = distinct.begin(); std::next(it) != distinct.end(); ++it) {
        const double lo = *it;
        const double hi = *std::next(it);
        double mid = lo + (hi - lo) / 2.0;
        if (!(mid < hi))
            mid = lo;
        out.push_back(mid);
    }
    return out;
}

inline double stump_error(const cbboost::FeatureMatrix& x, std::span<const int> y, std::span<const double> w,
    std::size_t feature, double threshold, int polarity)
{
    double err = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const int h = x(i, static_cast<Eigen::Index>(feature)) > threshold ? polarity : -polarity;
        if (h != y[static_cast<std::size_t>(i)])
            err += w[static_cast<std::size_t>(i)];
    }
    return err;
}

// Exhaustive enumeration in tie-rule order: feature, threshold, polarity +1 then -1.
inline StumpChoice brute_force_stump(const cbboost::FeatureMatrix& x, std::span<const int> y, std::span<const double> w)
{
    StumpChoice best;
    best.error = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < static_cast<std::size_t>(x.cols()); ++j)
        for (double t : candidate_thresholds(x, j))
            for (int s : {1, -1}) {
                const double e = stump_error(x, y, w, j, t, s);
                if (e < best.error)
                    best = {j, t, s, e};
            }
    return best;
}

// (1/n) sum [g e^{-y f} + (1 - g) e^{y f}] from raw scores.
inline double conditional_risk(std::span<const double> scores, std::span<const int> y, std::span<const double> gamma)
{
    double total = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const double m = y[i] * scores[i];
        total += gamma[i] * std::exp(-m) + (1.0 - gamma[i]) * std::exp(m);
    }
    return total / static_cast<double>(scores.size());
}

// Bivariate Gaussian MLE density, written out with the closed-form 2x2 inverse.
struct Gaussian2 {
    double mx = 0, my = 0, sxx = 0, sxy = 0, syy = 0;

    static Gaussian2 fit(const std::vector<std::array<double, 2>>& pts)
    {
        Gaussian2 g;
        const double n = static_cast<double>(pts.size());
        for (const auto& p : pts) {
            g.mx += p[0] / n;
            g.my += p[1] / n;
        }
        for (const auto& p : pts) {
            g.sxx += (p[0] - g.mx) * (p[0] - g.mx) / n;
            g.sxy += (p[0] - g.mx) * (p[1] - g.my) / n;
            g.syy += (p[1] - g.my) * (p[1] - g.my) / n;
        }
        return g;
    }

    double density(double x, double y) const
    {
        const double det = sxx * syy - sxy * sxy;
        const double dx = x - mx;
        const double dy = y - my;
        const double q = (syy * dx * dx - 2.0 * sxy * dx * dy + sxx * dy * dy) / det;
        return std::exp(-0.5 * q) / (2.0 * std::numbers::pi * std::sqrt(det));
    }
};

inline double standard_normal_cdf(double z)
{
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

// Random dataset with coordinates on a coarse grid so that repeated values,
// and hence threshold ties, are common.
inline cbboost::Dataset random_dataset(cbboost::Rng& rng, std::size_t n, std::size_t p, int grid = 6)
{
    cbboost::FeatureMatrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j)
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))
                = static_cast<double>(rng.uniform_index(static_cast<std::uint64_t>(grid))) - grid / 2.0;
        y[i] = rng.bernoulli(0.5) ? 1 : -1;
    }
    y[0] = 1;
    y[n - 1] = -1;
    return cbboost::Dataset(std::move(x), std::move(y));
}

// Weights that are integer multiples of 2^-20 and sum to exactly 1, so any
// summation order yields the same double.
inline std::vector<double> dyadic_weights(cbboost::Rng& rng, std::size_t n, bool allow_zero = true)
{
    constexpr std::uint64_t unit = 1u << 20;
    std::vector<std::uint64_t> cuts{0, unit};
    for (std::size_t i = 0; i + 1 < n; ++i)
        cuts.push_back(rng.uniform_index(unit + 1));
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = static_cast<double>(cuts[i + 1] - cuts[i]) / static_cast<double>(unit);
        if (!allow_zero && w[i] == 0.0)
            w[i] = 1.0 / static_cast<double>(unit);
    }
    return w;
}

} // namespace oracle
