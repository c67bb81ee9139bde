#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cbboost/dataset.hpp"

namespace cbboost {

// gamma_i = estimated P(true label = observed label | x_i), each in [0, 1].
class ConfidenceVector {
public:
    ConfidenceVector() = default;
    explicit ConfidenceVector(std::vector<double> gamma);

    static ConfidenceVector constant(std::size_t n, double value);

    std::size_t size() const noexcept { return gamma_.size(); }
    double operator[](std::size_t i) const { return gamma_[i]; }
    std::span<const double> values() const noexcept { return gamma_; }

    bool operator==(const ConfidenceVector&) const = default;

private:
    std::vector<double> gamma_;
};

struct FilterRound {
    double threshold = 0.0;
    std::vector<std::size_t> removed;
};

// Outcome of the neighbourhood noise filter. `kept` is the reduced set; every
// input index is either kept or removed in exactly one round.
struct FilterReport {
    std::vector<std::size_t> kept;
    std::vector<FilterRound> rounds;
    bool aborted = false;
    std::string abort_reason;
};

inline const std::vector<double> default_filter_thresholds{0.07, 0.14, 0.21};

// Fraction of each survivor's k nearest surviving neighbours (itself excluded)
// that share its label. Result is aligned with `survivors`.
std::vector<double> agreement_rates(const Dataset& ds, std::span<const std::size_t> survivors, std::size_t k);

// Iterative filter: in each round, survivors whose agreement rate is below the
// round's threshold are removed; neighbourhoods are recomputed on the new
// survivor set for the next round. Distances are taken on `ds` as given.
FilterReport noise_filter(const Dataset& ds, std::size_t k, std::span<const double> thresholds);

FilterReport unfiltered(std::size_t n);

// gamma_i = (1/k) #{k nearest kept neighbours with label y_i}, for every
// instance of `ds` including the filtered-out ones.
ConfidenceVector knn_confidence(const Dataset& ds, const FilterReport& reduced, std::size_t k);

enum class BayesForm { consistent, literal };

BayesForm parse_bayes_form(std::string_view name);

struct BayesConfidence {
    ConfidenceVector gamma;
    bool regularized = false; // a class covariance needed the 1e-6 I ridge
};

// Posterior-of-observed-label confidence from Gaussian class densities fitted
// (full covariance, maximum likelihood) on the kept instances, with the class
// prior corrected for a known symmetric noise level.
//
// consistent:     gamma = a f(x|y) / (a f(x|y) + b f(x|-y)), a = P(y) - e, b = 1 - P(y) - e
// literal:  same with b = e
//
// P(y) is the observed label proportion over all of `ds`.
BayesConfidence bayes_confidence(const Dataset& ds, const FilterReport& reduced, double noise_level,
    BayesForm form = BayesForm::consistent);

struct GroupStats {
    std::size_t count = 0;
    double mean = 0.0;
    double stddev = 0.0; // sample standard deviation; 0 for a single member
};

struct ConfidenceQuality {
    std::optional<GroupStats> clean;
    std::optional<GroupStats> mislabeled;
};

ConfidenceQuality confidence_quality(const ConfidenceVector& gamma, const NoiseMask& mask);

GroupStats group_stats(std::span<const double> values);

enum class ConfidenceMethod { knn, bayes };

ConfidenceMethod parse_confidence_method(std::string_view name);

struct ConfidenceSettings {
    ConfidenceMethod method = ConfidenceMethod::knn;
    std::size_t k = 5;
    std::size_t filter_k = 5;
    std::vector<double> thresholds = default_filter_thresholds;
    double noise_level = 0.0;
    BayesForm form = BayesForm::consistent;
    bool standardize = true;
};

struct ConfidenceEstimate {
    ConfidenceVector gamma;
    FilterReport filter;
    bool regularized = false;
};

// Full pipeline: standardise (fit once on `ds`), filter, then assign confidence.
ConfidenceEstimate estimate_confidence(const Dataset& ds, const ConfidenceSettings& settings);

void write_gamma_csv(const ConfidenceVector& gamma, const std::filesystem::path& path);
void write_gamma_csv(const ConfidenceVector& gamma, std::ostream& out);
ConfidenceVector read_gamma_csv(const std::filesystem::path& path);
ConfidenceVector parse_gamma_csv(std::istream& in);

} // namespace cbboost
