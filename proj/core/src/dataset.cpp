#include "cbboost/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "cbboost/error.hpp"
#include "cbboost/random.hpp"

namespace cbboost {

namespace {

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    std::string out{s.substr(first, last - first + 1)};
    if (out.size() >= 2 && out.front() == '"' && out.back() == '"')
        out = out.substr(1, out.size() - 2);
    return out;
}

std::vector<std::string> split_fields(const std::string& line)
{
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(trim(std::string_view(line).substr(start, comma - start)));
        if (comma == std::string::npos)
            break;
        start = comma + 1;
    }
    return fields;
}

std::vector<std::string> default_names(std::size_t p)
{
    std::vector<std::string> names;
    for (std::size_t j = 0; j < p; ++j)
        names.push_back("x" + std::to_string(j + 1));
    return names;
}

} // namespace

Dataset::Dataset(FeatureMatrix features, std::vector<int> labels, std::vector<std::string> feature_names)
    : features_(std::move(features)), labels_(std::move(labels)), feature_names_(std::move(feature_names))
{
    if (labels_.empty() || features_.cols() == 0)
        throw Error("dataset", "dataset needs n >= 1 and p >= 1");
    if (static_cast<std::size_t>(features_.rows()) != labels_.size())
        throw Error("dataset", "feature rows and label count differ");
    if (!features_.allFinite())
        throw Error("dataset", "non-finite feature value");
    for (int y : labels_)
        if (y != 1 && y != -1)
            throw Error("dataset", "label " + std::to_string(y) + " is not -1 or +1");
    if (feature_names_.empty())
        feature_names_ = default_names(dimension());
    if (feature_names_.size() != dimension())
        throw Error("dataset", "feature name count differs from column count");
}

bool Dataset::has_both_classes() const
{
    const auto positives = std::count(labels_.begin(), labels_.end(), 1);
    return positives > 0 && static_cast<std::size_t>(positives) < labels_.size();
}

Dataset Dataset::with_labels(std::vector<int> labels) const
{
    return Dataset(features_, std::move(labels), feature_names_);
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const
{
    FeatureMatrix x(static_cast<Eigen::Index>(rows.size()), features_.cols());
    std::vector<int> y;
    y.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        x.row(static_cast<Eigen::Index>(r)) = features_.row(static_cast<Eigen::Index>(rows[r]));
        y.push_back(labels_[rows[r]]);
    }
    return Dataset(std::move(x), std::move(y), feature_names_);
}

bool Dataset::operator==(const Dataset& other) const
{
    return labels_ == other.labels_ && features_.rows() == other.features_.rows()
        && features_.cols() == other.features_.cols() && features_ == other.features_
        && feature_names_ == other.feature_names_;
}

std::size_t NoiseMask::count() const
{
    return static_cast<std::size_t>(std::count(flipped.begin(), flipped.end(), true));
}

std::string format_double(double value)
{
    if (std::isinf(value))
        return value > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

double parse_double(const std::string& text)
{
    if (text == "-inf")
        return -std::numeric_limits<double>::infinity();
    if (text == "inf")
        return std::numeric_limits<double>::infinity();
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        throw Error("parse", "cannot parse '" + text + "' as a real number");
    return value;
}

Dataset parse_csv(std::istream& in, const CsvOptions& options)
{
    std::string line;
    if (!std::getline(in, line))
        throw Error("csv", "missing header row");
    const auto header = split_fields(line);
    const auto label_it = std::find(header.begin(), header.end(), options.label_column);
    if (label_it == header.end())
        throw Error("csv", "label column '" + options.label_column + "' not in header");
    const auto label_col = static_cast<std::size_t>(label_it - header.begin());

    std::vector<std::string> names;
    for (std::size_t j = 0; j < header.size(); ++j)
        if (j != label_col)
            names.push_back(header[j]);
    if (names.empty())
        throw Error("csv", "no feature columns");

    std::vector<double> values;
    std::vector<std::string> tokens;
    std::size_t row = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty())
            continue;
        ++row;
        const auto fields = split_fields(line);
        if (fields.size() != header.size())
            throw Error("csv", "row " + std::to_string(row) + " (line " + std::to_string(line_no) + ") has "
                    + std::to_string(fields.size()) + " fields, expected " + std::to_string(header.size()));
        for (std::size_t j = 0; j < fields.size(); ++j) {
            const std::string where = "row " + std::to_string(row) + " (line " + std::to_string(line_no)
                + "), column '" + header[j] + "'";
            if (fields[j].empty())
                throw Error("csv", "missing value at " + where);
            if (j == label_col) {
                tokens.push_back(fields[j]);
                continue;
            }
            double v = 0.0;
            try {
                v = parse_double(fields[j]);
            } catch (const Error&) {
                throw Error("csv", "unparseable cell '" + fields[j] + "' at " + where);
            }
            if (!std::isfinite(v))
                throw Error("csv", "non-finite cell '" + fields[j] + "' at " + where);
            values.push_back(v);
        }
    }
    if (row == 0)
        throw Error("csv", "no data rows");

    std::vector<std::string> distinct = tokens;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() != 2)
        throw Error("csv", "label cardinality " + std::to_string(distinct.size()) + ", expected 2");
    if (std::find(distinct.begin(), distinct.end(), options.positive_label) == distinct.end())
        throw Error("csv", "positive label '" + options.positive_label + "' not present in label column");

    std::vector<int> labels;
    labels.reserve(tokens.size());
    for (const auto& t : tokens)
        labels.push_back(t == options.positive_label ? 1 : -1);

    const auto p = static_cast<Eigen::Index>(names.size());
    FeatureMatrix x = Eigen::Map<FeatureMatrix>(values.data(), static_cast<Eigen::Index>(row), p);
    return Dataset(std::move(x), std::move(labels), std::move(names));
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options)
{
    std::ifstream in(path);
    if (!in)
        throw Error("io", "cannot open '" + path.string() + "'");
    return parse_csv(in, options);
}

void write_csv(const Dataset& ds, std::ostream& out)
{
    for (const auto& name : ds.feature_names())
        out << name << ',';
    out << "label\n";
    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (double v : ds.row(i))
            out << format_double(v) << ',';
        out << ds.label(i) << '\n';
    }
}

void write_csv(const Dataset& ds, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw Error("io", "cannot write '" + path.string() + "'");
    write_csv(ds, out);
}

Split split(const Dataset& ds, double train_fraction, std::uint64_t seed)
{
    const std::size_t n = ds.size();
    if (n < 2)
        throw Error("split", "need at least 2 instances");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw Error("split", "train fraction must lie in (0, 1)");
    const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
    if (n_train == 0 || n_train == n)
        throw Error("split", "train fraction leaves an empty part");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    for (std::size_t i = n - 1; i > 0; --i)
        std::swap(order[i], order[rng.uniform_index(i + 1)]);

    std::vector<std::size_t> train_rows(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<std::size_t> test_rows(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    std::sort(train_rows.begin(), train_rows.end());
    std::sort(test_rows.begin(), test_rows.end());
    return Split{ds.subset(train_rows), ds.subset(test_rows), std::move(train_rows), std::move(test_rows)};
}

NoisyDataset inject_label_noise(const Dataset& ds, double rate, std::uint64_t seed)
{
    if (!(rate >= 0.0 && rate < 0.5))
        throw Error("noise", "noise rate must lie in [0, 0.5)");
    const std::size_t n = ds.size();
    const auto n_flip = static_cast<std::size_t>(std::llround(rate * static_cast<double>(n)));

    // Partial Fisher-Yates: the first n_flip slots are a uniform sample without replacement.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    for (std::size_t i = 0; i < n_flip; ++i)
        std::swap(order[i], order[i + rng.uniform_index(n - i)]);

    NoiseMask mask{std::vector<bool>(n, false), rate};
    for (std::size_t i = 0; i < n_flip; ++i)
        mask.flipped[order[i]] = true;
    return NoisyDataset{apply_flips(ds, mask), std::move(mask)};
}

Dataset apply_flips(const Dataset& ds, const NoiseMask& mask)
{
    if (mask.flipped.size() != ds.size())
        throw Error("noise", "mask length differs from dataset size");
    std::vector<int> labels(ds.labels().begin(), ds.labels().end());
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (mask.flipped[i])
            labels[i] = -labels[i];
    return ds.with_labels(std::move(labels));
}

Scaler fit_scaler(const Dataset& ds)
{
    const auto& x = ds.features();
    const double n = static_cast<double>(ds.size());
    Scaler sc;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double mean = x.col(j).sum() / n;
        const double var = (x.col(j).array() - mean).square().sum() / n;
        const double sd = std::sqrt(var);
        sc.means.push_back(mean);
        // Population variance; a column is constant when every entry equals the mean.
        const bool constant = (x.col(j).array() == x(0, j)).all();
        sc.stddevs.push_back(constant || !(sd > 0.0) ? 1.0 : sd);
    }
    return sc;
}

Dataset apply_scaler(const Scaler& scaler, const Dataset& ds)
{
    if (scaler.means.size() != ds.dimension() || scaler.stddevs.size() != ds.dimension())
        throw Error("scaler", "scaler dimension differs from dataset");
    FeatureMatrix x = ds.features();
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const auto jj = static_cast<std::size_t>(j);
        x.col(j) = (x.col(j).array() - scaler.means[jj]) / scaler.stddevs[jj];
    }
    return Dataset(std::move(x), std::vector<int>(ds.labels().begin(), ds.labels().end()), ds.feature_names());
}

} // namespace cbboost
