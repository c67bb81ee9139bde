#include "cbboost/boost.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cbboost/error.hpp"
#include "cbboost/random.hpp"

namespace cbboost {

LearnerMode parse_learner_mode(std::string_view name)
{
    if (name == "weighted")
        return LearnerMode::weighted;
    if (name == "resample")
        return LearnerMode::resample;
    throw Error("config", "unknown learner mode '" + std::string(name) + "'");
}

std::string_view learner_mode_name(LearnerMode mode)
{
    return mode == LearnerMode::weighted ? "weighted" : "resample";
}

StopRule StopRule::parse(std::string_view text)
{
    if (text == "fixed")
        return {};
    if (text == "consistency")
        return {Kind::consistency, 0.5};
    constexpr std::string_view prefix = "consistency:";
    if (text.substr(0, prefix.size()) == prefix) {
        const double a = parse_double(std::string(text.substr(prefix.size())));
        if (!(a > 0.0 && a < 1.0))
            throw Error("config", "consistency exponent must lie in (0, 1)");
        return {Kind::consistency, a};
    }
    throw Error("config", "unknown stop rule '" + std::string(text) + "'");
}

std::string StopRule::to_string() const
{
    return kind == Kind::fixed ? "fixed" : "consistency:" + format_double(exponent);
}

void BoostConfig::validate() const
{
    if (max_iterations < 1)
        throw Error("config", "max_iterations must be at least 1");
    if (!(epsilon_clamp > 0.0 && epsilon_clamp < 0.5))
        throw Error("config", "epsilon_clamp must lie in (0, 0.5)");
    if (stop.kind == StopRule::Kind::consistency && !(stop.exponent > 0.0 && stop.exponent < 1.0))
        throw Error("config", "consistency exponent must lie in (0, 1)");
}

std::size_t BoostConfig::iteration_cap(std::size_t n) const
{
    if (stop.kind == StopRule::Kind::fixed)
        return max_iterations;
    const double cap = std::ceil(std::pow(static_cast<double>(n), 1.0 - stop.exponent));
    return std::min(max_iterations, static_cast<std::size_t>(std::max(1.0, cap)));
}

double Ensemble::score(std::span<const double> x) const
{
    double f = 0.0;
    for (const auto& t : terms)
        f += t.beta * t.stump.predict(x);
    return f;
}

int Ensemble::predict(std::span<const double> x) const
{
    if (terms.empty())
        throw Error("predict", "empty ensemble");
    return score(x) >= 0.0 ? 1 : -1;
}

double score(const Ensemble& e, std::span<const double> x)
{
    return e.score(x);
}

int predict(const Ensemble& e, std::span<const double> x)
{
    return e.predict(x);
}

std::string_view stop_reason_name(StopReason r)
{
    switch (r) {
    case StopReason::budget:
        return "budget";
    case StopReason::nonpositive_beta:
        return "nonpositive_beta";
    case StopReason::degenerate_weights:
        return "degenerate_weights";
    }
    return "unknown";
}

namespace {

double conditional_loss(double gamma, int y, double f)
{
    // Skip zero-weight terms so that gamma in {0, 1} never evaluates 0 * inf.
    double loss = 0.0;
    if (gamma > 0.0)
        loss += gamma * std::exp(-y * f);
    if (gamma < 1.0)
        loss += (1.0 - gamma) * std::exp(y * f);
    return loss;
}

double risk_from_scores(std::span<const double> scores, std::span<const int> labels, std::span<const double> gamma)
{
    double total = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i)
        total += conditional_loss(gamma[i], labels[i], scores[i]);
    return total / static_cast<double>(scores.size());
}

std::vector<int> stump_predictions(const Stump& s, const Dataset& ds)
{
    std::vector<int> h(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i)
        h[i] = s.predict(ds.row(i));
    return h;
}

std::vector<double> learner_weights(std::span<const double> distribution, const BoostConfig& cfg, Rng& rng)
{
    if (cfg.mode == LearnerMode::weighted)
        return {distribution.begin(), distribution.end()};
    return resample_weights(distribution, rng);
}

} // namespace

BoostResult train_adaboost(const Dataset& train, const BoostConfig& cfg)
{
    cfg.validate();
    const std::size_t n = train.size();
    if (n < 2 || !train.has_both_classes())
        throw Error("adaboost", "training data needs n >= 2 and both classes");
    const auto y = train.labels();

    BoostResult out;
    out.trace.labels.assign(y.begin(), y.end());
    out.trace.gamma.assign(n, 1.0);
    out.trace.epsilon_clamp = cfg.epsilon_clamp;

    const StumpTrainer trainer(train.features());
    Rng rng(cfg.seed);
    // Equal initial weights; only D = w / S enters the algorithm, so the common scale is free.
    std::vector<double> w(n, 1.0);
    std::vector<double> scores(n, 0.0);
    const std::size_t cap = cfg.iteration_cap(n);

    for (std::size_t m = 0; m < cap; ++m) {
        const double total = std::accumulate(w.begin(), w.end(), 0.0);
        if (!(total > 0.0) || !std::isfinite(total)) {
            out.trace.stop_reason = StopReason::degenerate_weights;
            break;
        }
        std::vector<double> d(n);
        for (std::size_t i = 0; i < n; ++i)
            d[i] = w[i] / total;

        const StumpFit fit = trainer.train(y, learner_weights(d, cfg, rng));
        const std::vector<int> h = stump_predictions(fit.stump, train);

        // epsilon_m on D, and the same split in unnormalised weights for beta:
        // (1 - eps) / eps = sum_{h = y} w / sum_{h != y} w.
        double eps = 0.0;
        double correct = 0.0;
        double wrong = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (h[i] == y[i]) {
                correct += w[i];
            } else {
                eps += d[i];
                wrong += w[i];
            }
        }
        eps = std::clamp(eps, cfg.epsilon_clamp, 1.0 - cfg.epsilon_clamp);
        wrong = std::max(wrong, cfg.epsilon_clamp * total);
        const double beta = correct > 0.0 ? 0.5 * std::log(correct / wrong) : -std::numeric_limits<double>::infinity();
        if (!(beta > 0.0)) {
            out.trace.stop_reason = StopReason::nonpositive_beta;
            out.trace.rejected_beta = beta;
            break;
        }

        const double grow = std::exp(beta);
        const double shrink = std::exp(-beta);
        std::vector<double> next(n);
        for (std::size_t i = 0; i < n; ++i)
            next[i] = w[i] * (h[i] == y[i] ? shrink : grow);

        out.ensemble.terms.push_back({beta, fit.stump});
        for (std::size_t i = 0; i < n; ++i)
            scores[i] += beta * h[i];

        if (cfg.record_trace) {
            TraceStep step;
            step.w1 = w;
            step.w2.assign(n, 0.0);
            step.distribution = d;
            step.effective_labels.assign(y.begin(), y.end());
            step.predictions = h;
            step.next_w1 = next;
            step.next_w2.assign(n, 0.0);
            step.beta = beta;
            step.weighted_error = eps;
            step.risk = risk_from_scores(scores, y, out.trace.gamma);
            out.trace.steps.push_back(std::move(step));
        }

        const double next_total = std::accumulate(next.begin(), next.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            w[i] = next[i] / next_total;
    }
    return out;
}

BoostResult train_cb_adaboost(const Dataset& train, const ConfidenceVector& gamma, const BoostConfig& cfg)
{
    cfg.validate();
    const std::size_t n = train.size();
    if (n < 2)
        throw Error("cb-adaboost", "training data needs n >= 2");
    if (gamma.size() != n)
        throw Error("cb-adaboost", "gamma length differs from training size");
    const auto y = train.labels();

    std::vector<double> w1(gamma.values().begin(), gamma.values().end());
    std::vector<double> w2(n);
    for (std::size_t i = 0; i < n; ++i)
        w2[i] = 1.0 - w1[i];
    double informative = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        informative += std::abs(w1[i] - w2[i]);
    if (!(informative > 0.0))
        throw Error("cb-adaboost", "zero total confidence: every gamma is 0.5");

    BoostResult out;
    out.trace.labels.assign(y.begin(), y.end());
    out.trace.gamma = w1;
    out.trace.epsilon_clamp = cfg.epsilon_clamp;

    const StumpTrainer trainer(train.features());
    Rng rng(cfg.seed);
    std::vector<double> scores(n, 0.0);
    const std::size_t cap = cfg.iteration_cap(n);

    for (std::size_t m = 0; m < cap; ++m) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            total += std::abs(w1[i] - w2[i]);
        if (!(total > 0.0) || !std::isfinite(total)) {
            out.trace.stop_reason = StopReason::degenerate_weights;
            break;
        }

        // Trusted labels y' = sign((w1 - w2) y), sign(0) keeps y (its weight is 0).
        std::vector<double> d(n);
        std::vector<int> trusted(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double diff = w1[i] - w2[i];
            d[i] = std::abs(diff) / total;
            trusted[i] = diff < 0.0 ? -y[i] : y[i];
        }

        const StumpFit fit = trainer.train(trusted, learner_weights(d, cfg, rng));
        const std::vector<int> h = stump_predictions(fit.stump, train);

        double agree = 0.0;    // sum_{h=y} w1 + sum_{h!=y} w2
        double disagree = 0.0; // sum_{h!=y} w1 + sum_{h=y} w2
        double eps = 0.0;      // error against y' on D
        for (std::size_t i = 0; i < n; ++i) {
            if (h[i] == y[i]) {
                agree += w1[i];
                disagree += w2[i];
            } else {
                agree += w2[i];
                disagree += w1[i];
            }
            if (h[i] != trusted[i])
                eps += d[i];
        }
        disagree = std::max(disagree, cfg.epsilon_clamp * total);
        const double beta = agree > 0.0 ? 0.5 * std::log(agree / disagree) : -std::numeric_limits<double>::infinity();
        if (!(beta > 0.0)) {
            out.trace.stop_reason = StopReason::nonpositive_beta;
            out.trace.rejected_beta = beta;
            break;
        }

        const double grow = std::exp(beta);
        const double shrink = std::exp(-beta);
        std::vector<double> next1(n);
        std::vector<double> next2(n);
        for (std::size_t i = 0; i < n; ++i) {
            const bool margin_positive = h[i] == y[i];
            next1[i] = w1[i] * (margin_positive ? shrink : grow);
            next2[i] = w2[i] * (margin_positive ? grow : shrink);
        }

        out.ensemble.terms.push_back({beta, fit.stump});
        for (std::size_t i = 0; i < n; ++i)
            scores[i] += beta * h[i];

        if (cfg.record_trace) {
            TraceStep step;
            step.w1 = w1;
            step.w2 = w2;
            step.distribution = d;
            step.effective_labels = trusted;
            step.predictions = h;
            step.next_w1 = next1;
            step.next_w2 = next2;
            step.beta = beta;
            step.weighted_error = std::clamp(eps, 0.0, 1.0);
            step.risk = risk_from_scores(scores, y, out.trace.gamma);
            out.trace.steps.push_back(std::move(step));
        }

        // A common rescale leaves D, y' and beta unchanged and keeps the weights in range.
        double next_total = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            next_total += next1[i] + next2[i];
        for (std::size_t i = 0; i < n; ++i) {
            w1[i] = next1[i] / next_total;
            w2[i] = next2[i] / next_total;
        }
    }
    return out;
}

Ensemble train_single_stump(const Dataset& train)
{
    const std::vector<double> uniform(train.size(), 1.0 / static_cast<double>(train.size()));
    const StumpFit fit = train_stump(train.features(), train.labels(), uniform);
    // A stump with error 1/2 or worse still enters as a unit-weight term.
    return Ensemble{{{1.0, fit.stump}}};
}

double empirical_risk(const Ensemble& f, const Dataset& ds)
{
    return empirical_risk(f, ds, ConfidenceVector::constant(ds.size(), 1.0));
}

double empirical_risk(const Ensemble& f, const Dataset& ds, const ConfidenceVector& gamma)
{
    if (gamma.size() != ds.size())
        throw Error("risk", "gamma length differs from dataset size");
    double total = 0.0;
    for (std::size_t i = 0; i < ds.size(); ++i)
        total += conditional_loss(gamma[i], ds.label(i), f.score(ds.row(i)));
    return total / static_cast<double>(ds.size());
}

} // namespace cbboost
