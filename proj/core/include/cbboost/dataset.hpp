#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace cbboost {

using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Feature matrix plus labels in {-1, +1}. Immutable once constructed; the
// constructor enforces n >= 1, p >= 1, finite features and +-1 labels.
class Dataset {
public:
    Dataset(FeatureMatrix features, std::vector<int> labels, std::vector<std::string> feature_names = {});

    std::size_t size() const noexcept { return labels_.size(); }
    std::size_t dimension() const noexcept { return static_cast<std::size_t>(features_.cols()); }

    const FeatureMatrix& features() const noexcept { return features_; }
    std::span<const int> labels() const noexcept { return labels_; }
    int label(std::size_t i) const { return labels_[i]; }
    std::span<const double> row(std::size_t i) const
    {
        return {features_.data() + i * dimension(), dimension()};
    }
    const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }

    bool has_both_classes() const;

    Dataset with_labels(std::vector<int> labels) const;
    Dataset subset(std::span<const std::size_t> rows) const;

    bool operator==(const Dataset& other) const;

private:
    FeatureMatrix features_;
    std::vector<int> labels_;
    std::vector<std::string> feature_names_;
};

struct NoiseMask {
    std::vector<bool> flipped;
    double rate = 0.0;

    std::size_t count() const;
};

// Per-column z-score parameters. Constant columns carry stddev 1 so that they
// pass through centred.
struct Scaler {
    std::vector<double> means;
    std::vector<double> stddevs;
};

struct CsvOptions {
    std::string label_column = "label";
    std::string positive_label = "1";
};

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});
Dataset parse_csv(std::istream& in, const CsvOptions& options = {});
void write_csv(const Dataset& ds, const std::filesystem::path& path);
void write_csv(const Dataset& ds, std::ostream& out);

struct Split {
    Dataset train;
    Dataset test;
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
};

// Random partition with |train| = round(train_fraction * n). Row order within
// each part follows the input order.
Split split(const Dataset& ds, double train_fraction, std::uint64_t seed);

struct NoisyDataset {
    Dataset data;
    NoiseMask mask;
};

// Flips exactly round(rate * n) labels chosen uniformly without replacement.
NoisyDataset inject_label_noise(const Dataset& ds, double rate, std::uint64_t seed);
Dataset apply_flips(const Dataset& ds, const NoiseMask& mask);

Scaler fit_scaler(const Dataset& ds);
Dataset apply_scaler(const Scaler& scaler, const Dataset& ds);

std::string format_double(double value);
double parse_double(const std::string& text);

} // namespace cbboost
