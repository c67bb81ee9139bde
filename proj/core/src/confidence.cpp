#include "cbboost/confidence.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include <Eigen/Cholesky>

#include "cbboost/error.hpp"
#include "cbboost/neighbors.hpp"

namespace cbboost {

ConfidenceVector::ConfidenceVector(std::vector<double> gamma) : gamma_(std::move(gamma))
{
    for (std::size_t i = 0; i < gamma_.size(); ++i)
        if (!(gamma_[i] >= 0.0 && gamma_[i] <= 1.0))
            throw Error("confidence", "gamma[" + std::to_string(i) + "] = " + format_double(gamma_[i])
                    + " outside [0, 1]");
}

ConfidenceVector ConfidenceVector::constant(std::size_t n, double value)
{
    return ConfidenceVector(std::vector<double>(n, value));
}

std::vector<double> agreement_rates(const Dataset& ds, std::span<const std::size_t> survivors, std::size_t k)
{
    if (k == 0)
        throw Error("filter", "k must be positive");
    std::vector<double> rates;
    rates.reserve(survivors.size());
    for (std::size_t i : survivors) {
        const auto nn = nearest_neighbors(ds.features(), ds.row(i), survivors, k, i);
        const auto agree = std::count_if(nn.begin(), nn.end(), [&](std::size_t j) { return ds.label(j) == ds.label(i); });
        rates.push_back(static_cast<double>(agree) / static_cast<double>(k));
    }
    return rates;
}

FilterReport noise_filter(const Dataset& ds, std::size_t k, std::span<const double> thresholds)
{
    if (k == 0)
        throw Error("filter", "k must be positive");
    for (std::size_t r = 0; r < thresholds.size(); ++r) {
        if (!(thresholds[r] > 0.0 && thresholds[r] < 1.0))
            throw Error("filter", "thresholds must lie in (0, 1)");
        if (r > 0 && !(thresholds[r] > thresholds[r - 1]))
            throw Error("filter", "thresholds must be strictly increasing");
    }

    FilterReport report = unfiltered(ds.size());
    for (double threshold : thresholds) {
        if (report.kept.size() <= k) {
            report.aborted = true;
            report.abort_reason = std::to_string(report.kept.size()) + " survivors, need more than k = "
                + std::to_string(k);
            break;
        }
        const auto rates = agreement_rates(ds, report.kept, k);
        FilterRound round{threshold, {}};
        std::vector<std::size_t> next;
        for (std::size_t s = 0; s < report.kept.size(); ++s)
            (rates[s] < threshold ? round.removed : next).push_back(report.kept[s]);
        report.kept = std::move(next);
        report.rounds.push_back(std::move(round));
    }
    return report;
}

FilterReport unfiltered(std::size_t n)
{
    FilterReport report;
    report.kept.resize(n);
    std::iota(report.kept.begin(), report.kept.end(), std::size_t{0});
    return report;
}

ConfidenceVector knn_confidence(const Dataset& ds, const FilterReport& reduced, std::size_t k)
{
    if (k == 0)
        throw Error("confidence", "k must be positive");
    if (reduced.kept.size() <= k)
        throw Error("confidence", "reduced set has " + std::to_string(reduced.kept.size())
                + " instances, need more than k = " + std::to_string(k));
    std::vector<double> gamma;
    gamma.reserve(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto nn = nearest_neighbors(ds.features(), ds.row(i), reduced.kept, k, i);
        const auto agree = std::count_if(nn.begin(), nn.end(), [&](std::size_t j) { return ds.label(j) == ds.label(i); });
        gamma.push_back(static_cast<double>(agree) / static_cast<double>(k));
    }
    return ConfidenceVector(std::move(gamma));
}

BayesForm parse_bayes_form(std::string_view name)
{
    if (name == "consistent")
        return BayesForm::consistent;
    if (name == "literal" || name == "paper-literal")
        return BayesForm::literal;
    throw Error("confidence", "unknown Bayes form '" + std::string(name) + "'");
}

namespace {

struct GaussianFit {
    Eigen::VectorXd mean;
    Eigen::LLT<Eigen::MatrixXd> chol;
    double log_norm = 0.0; // -0.5 (p log 2pi + log det)
    bool regularized = false;

    double log_density(std::span<const double> x) const
    {
        const Eigen::VectorXd diff = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size())) - mean;
        const Eigen::VectorXd z = chol.matrixL().solve(diff);
        return log_norm - 0.5 * z.squaredNorm();
    }
};

GaussianFit fit_gaussian(const Dataset& ds, std::span<const std::size_t> rows)
{
    const auto p = static_cast<Eigen::Index>(ds.dimension());
    GaussianFit fit;
    fit.mean = Eigen::VectorXd::Zero(p);
    for (std::size_t i : rows)
        fit.mean += Eigen::Map<const Eigen::VectorXd>(ds.row(i).data(), p);
    fit.mean /= static_cast<double>(rows.size());

    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(p, p);
    for (std::size_t i : rows) {
        const Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(ds.row(i).data(), p) - fit.mean;
        cov.noalias() += d * d.transpose();
    }
    cov /= static_cast<double>(rows.size());

    fit.chol.compute(cov);
    if (fit.chol.info() != Eigen::Success || fit.chol.rcond() < 1e-12) {
        cov += 1e-6 * Eigen::MatrixXd::Identity(p, p);
        fit.chol.compute(cov);
        fit.regularized = true;
        if (fit.chol.info() != Eigen::Success)
            throw Error("confidence", "class covariance is not positive definite after regularisation");
    }
    const double log_det = 2.0 * fit.chol.matrixLLT().diagonal().array().log().sum();
    fit.log_norm = -0.5 * (static_cast<double>(p) * std::log(2.0 * std::numbers::pi) + log_det);
    return fit;
}

} // namespace

BayesConfidence bayes_confidence(const Dataset& ds, const FilterReport& reduced, double noise_level, BayesForm form)
{
    const std::size_t n = ds.size();
    const std::size_t p = ds.dimension();
    const auto n_pos = static_cast<std::size_t>(std::count(ds.labels().begin(), ds.labels().end(), 1));
    const double prior_pos = static_cast<double>(n_pos) / static_cast<double>(n);
    const double prior_neg = 1.0 - prior_pos;
    if (!(noise_level >= 0.0 && noise_level < std::min(prior_pos, prior_neg)))
        throw Error("confidence", "noise level " + format_double(noise_level)
                + " must be non-negative and below the smaller class proportion");

    std::vector<std::size_t> kept_pos;
    std::vector<std::size_t> kept_neg;
    for (std::size_t i : reduced.kept)
        (ds.label(i) > 0 ? kept_pos : kept_neg).push_back(i);
    if (kept_pos.size() < p + 2 || kept_neg.size() < p + 2)
        throw Error("confidence", "each class needs at least p + 2 = " + std::to_string(p + 2)
                + " kept instances to fit a covariance");

    const GaussianFit fit_pos = fit_gaussian(ds, kept_pos);
    const GaussianFit fit_neg = fit_gaussian(ds, kept_neg);

    std::vector<double> gamma(n);
    for (std::size_t i = 0; i < n; ++i) {
        const bool positive = ds.label(i) > 0;
        const double prior_y = positive ? prior_pos : prior_neg;
        const double own = prior_y - noise_level;
        const double other = form == BayesForm::consistent ? 1.0 - prior_y - noise_level : noise_level;
        if (other <= 0.0) {
            gamma[i] = 1.0;
            continue;
        }
        const double log_pos = fit_pos.log_density(ds.row(i));
        const double log_neg = fit_neg.log_density(ds.row(i));
        const double log_own = std::log(own) + (positive ? log_pos : log_neg);
        const double log_other = std::log(other) + (positive ? log_neg : log_pos);
        gamma[i] = std::clamp(1.0 / (1.0 + std::exp(log_other - log_own)), 0.0, 1.0);
    }
    return {ConfidenceVector(std::move(gamma)), fit_pos.regularized || fit_neg.regularized};
}

GroupStats group_stats(std::span<const double> values)
{
    GroupStats s;
    s.count = values.size();
    if (values.empty())
        return s;
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.count);
    if (s.count > 1) {
        double ss = 0.0;
        for (double v : values)
            ss += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(ss / static_cast<double>(s.count - 1));
    }
    return s;
}

ConfidenceQuality confidence_quality(const ConfidenceVector& gamma, const NoiseMask& mask)
{
    if (gamma.size() != mask.flipped.size())
        throw Error("confidence", "gamma and mask lengths differ");
    std::vector<double> clean;
    std::vector<double> flipped;
    for (std::size_t i = 0; i < gamma.size(); ++i)
        (mask.flipped[i] ? flipped : clean).push_back(gamma[i]);
    ConfidenceQuality q;
    if (!clean.empty())
        q.clean = group_stats(clean);
    if (!flipped.empty())
        q.mislabeled = group_stats(flipped);
    return q;
}

ConfidenceMethod parse_confidence_method(std::string_view name)
{
    if (name == "knn")
        return ConfidenceMethod::knn;
    if (name == "bayes")
        return ConfidenceMethod::bayes;
    throw Error("confidence", "unknown confidence method '" + std::string(name) + "'");
}

ConfidenceEstimate estimate_confidence(const Dataset& ds, const ConfidenceSettings& settings)
{
    const Dataset metric_space = settings.standardize ? apply_scaler(fit_scaler(ds), ds) : ds;
    ConfidenceEstimate out;
    out.filter = noise_filter(metric_space, settings.filter_k, settings.thresholds);
    if (settings.method == ConfidenceMethod::knn) {
        out.gamma = knn_confidence(metric_space, out.filter, settings.k);
    } else {
        auto bayes = bayes_confidence(metric_space, out.filter, settings.noise_level, settings.form);
        out.gamma = std::move(bayes.gamma);
        out.regularized = bayes.regularized;
    }
    return out;
}

void write_gamma_csv(const ConfidenceVector& gamma, std::ostream& out)
{
    out << "gamma\n";
    for (double g : gamma.values())
        out << format_double(g) << '\n';
}

void write_gamma_csv(const ConfidenceVector& gamma, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw Error("io", "cannot write '" + path.string() + "'");
    write_gamma_csv(gamma, out);
}

ConfidenceVector parse_gamma_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line.substr(0, 5) != "gamma")
        throw Error("csv", "gamma file must start with a 'gamma' header");
    std::vector<double> values;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        ++row;
        try {
            values.push_back(parse_double(line));
        } catch (const Error&) {
            throw Error("csv", "unparseable gamma '" + line + "' at row " + std::to_string(row));
        }
    }
    return ConfidenceVector(std::move(values));
}

ConfidenceVector read_gamma_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("io", "cannot open '" + path.string() + "'");
    return parse_gamma_csv(in);
}

} // namespace cbboost
