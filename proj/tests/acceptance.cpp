// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <cmath>
#include <cstdio>
#include <functional>
#include <thread>
#include <sstream>
#include <string>
#include <vector>

#include "cbboost/boost.hpp"
#include "cbboost/harness.hpp"
#include "cbboost/synth.hpp"
#include "oracles.hpp"

using namespace cbboost;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v, int digits = 4)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

bool within(double value, double target, double tol)
{
    return std::abs(value - target) <= tol;
}

std::vector<double> random_gamma(Rng& rng, std::size_t n)
{
    static const double grid[] = {0.0, 0.25, 0.5, 0.75, 1.0};
    std::vector<double> g(n);
    for (auto& v : g)
        v = rng.bernoulli(0.7) ? grid[rng.uniform_index(5)] : rng.uniform();
    g[0] = 1.0; // keeps sum |2g - 1| > 0
    return g;
}

// Risk after each accepted round must fall below the previous value, up to
// 1e-9. Rounds whose exact decrease is below double resolution (beta ~ 1e-8)
// are counted separately as flat.
bool risk_descends(const BoostTrace& trace, std::size_t& rounds, std::size_t& flat, double& flat_beta)
{
    double prev = 1.0;
    for (const auto& s : trace.steps) {
        ++rounds;
        if (!(s.risk < prev + 1e-9))
            return false;
        if (!(s.risk < prev)) {
            ++flat;
            flat_beta = std::max(flat_beta, s.beta);
        }
        prev = s.risk;
    }
    return true;
}

std::vector<BoostTrace> suite_traces; // shared by criteria 1-3

Outcome gamma_one_reduction()
{
    Rng rng(101);
    int identical = 0;
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 4 + rng.uniform_index(27);
        const std::size_t p = 1 + rng.uniform_index(4);
        const Dataset ds = oracle::random_dataset(rng, n, p, 2 + static_cast<int>(rng.uniform_index(9)));
        BoostConfig cfg;
        cfg.max_iterations = 50;
        auto a = train_adaboost(ds, cfg);
        auto c = train_cb_adaboost(ds, ConfidenceVector::constant(n, 1.0), cfg);
        identical += a.ensemble == c.ensemble && a.trace.stop_reason == c.trace.stop_reason;
        suite_traces.push_back(std::move(a.trace));
        suite_traces.push_back(std::move(c.trace));
    }
    return {identical == 100, std::to_string(identical) + "/100 random datasets give identical ensembles"};
}

Outcome propositions_suite()
{
    Rng rng(202);
    std::size_t violations = 0, rounds = 0, strict = 0, equal = 0, p2 = 0;
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 4 + rng.uniform_index(27);
        const Dataset ds = oracle::random_dataset(rng, n, 1 + rng.uniform_index(4), 8);
        BoostConfig cfg;
        cfg.max_iterations = 60;
        auto r = train_cb_adaboost(ds, ConfidenceVector(random_gamma(rng, n)), cfg);
        const auto rep = check_propositions(r.trace);
        violations += rep.violations.size();
        rounds += rep.iterations_checked;
        strict += rep.third_strict_checks;
        equal += rep.third_equality_checks;
        p2 += rep.second_checks;
        suite_traces.push_back(std::move(r.trace));
    }
    return {violations == 0,
        std::to_string(violations) + " violations over 200 traces, " + std::to_string(rounds) + " rounds ("
            + std::to_string(p2) + " gap-shrink checks, " + std::to_string(strict) + " strict / " + std::to_string(equal)
            + " equality coefficient checks)"};
}

Outcome risk_monotonicity()
{
    // Full-size traces in addition to the small suite traces.
    for (std::uint64_t r = 0; r < 5; ++r) {
        const NoisyDataset noisy = inject_label_noise(gen_normal(500, derive_seed(7, r, "train-data")), 0.1,
            derive_seed(7, r, "noise"));
        const auto gamma = estimate_confidence(noisy.data, {}).gamma;
        BoostConfig cfg;
        suite_traces.push_back(train_cb_adaboost(noisy.data, gamma, cfg).trace);
        suite_traces.push_back(train_adaboost(noisy.data, cfg).trace);
    }
    std::size_t bad = 0, rounds = 0, flat = 0;
    double flat_beta = 0.0;
    for (const auto& t : suite_traces)
        bad += !risk_descends(t, rounds, flat, flat_beta);
    return {bad == 0, std::to_string(bad) + "/" + std::to_string(suite_traces.size()) + " traces increase by more than 1e-9; "
            + std::to_string(rounds - flat) + "/" + std::to_string(rounds) + " rounds strictly lower, "
            + std::to_string(flat) + " flat at double resolution (largest beta among them "
            + fmt(flat_beta * 1e9, 2) + "e-9)"};
}

Outcome stump_oracle()
{
    Rng rng(404);
    int match = 0;
    for (int t = 0; t < 500; ++t) {
        const std::size_t n = 2 + rng.uniform_index(49);
        const Dataset ds = oracle::random_dataset(rng, n, 1 + rng.uniform_index(4), 2 + static_cast<int>(rng.uniform_index(10)));
        const auto w = oracle::dyadic_weights(rng, n);
        const auto ref = oracle::brute_force_stump(ds.features(), ds.labels(), w);
        const auto fit = train_stump(ds.features(), ds.labels(), w);
        match += fit.weighted_error == ref.error && fit.stump == Stump{ref.feature, ref.threshold, ref.polarity};
    }
    return {match == 500, std::to_string(match) + "/500 instances match exhaustive search"};
}

ExperimentConfig grid_config(Scenario s, std::vector<double> noise, std::vector<std::string> methods)
{
    ExperimentConfig cfg;
    cfg.source.scenario = s;
    cfg.train_n = 500;
    cfg.test_n = 10000;
    cfg.noise_levels = std::move(noise);
    cfg.repetitions = 30;
    for (const auto& m : methods)
        cfg.methods.push_back(Method::parse(m));
    cfg.boost.max_iterations = 200;
    cfg.boost.record_trace = false;
    cfg.base_seed = 20240601;
    cfg.jobs = std::max(1u, std::thread::hardware_concurrency());
    return cfg;
}

int paired_wins(const ResultsTable& t, double noise)
{
    const auto* a = t.find("adaboost", noise);
    const auto* c = t.find("cb", noise);
    int wins = 0;
    for (std::size_t r = 0; r < a->errors.size(); ++r)
        wins += a->errors[r] && c->errors[r] && *c->errors[r] < *a->errors[r];
    return wins;
}

Outcome confidence_means()
{
    ExperimentConfig cfg = grid_config(Scenario::normal, {0.1}, {"cb"});
    cfg.confidence.method = ConfidenceMethod::bayes;
    cfg.confidence.form = BayesForm::consistent;
    cfg.boost.max_iterations = 1;
    const auto t = run_experiment(cfg);
    const auto* row = t.find_confidence(0.1);
    const auto clean = mean_of(row->clean_mean);
    const auto mis = mean_of(row->mislabeled_mean);
    const bool ok = clean && mis && within(*clean, 0.9172, 0.06) && within(*mis, 0.0850, 0.06);
    return {ok, "clean " + fmt(clean.value_or(NAN)) + " (target 0.9172 +-0.06), mislabeled " + fmt(mis.value_or(NAN))
            + " (target 0.0850 +-0.06)"};
}

Outcome normal_error_rates()
{
    ExperimentConfig cfg = grid_config(Scenario::normal, {0.1, 0.2}, {"adaboost", "cb"});
    const auto w = run_experiment(cfg);
    cfg.boost.mode = LearnerMode::resample;
    const auto r = run_experiment(cfg);

    struct Target {
        double noise, cb, ada;
    };
    bool ok = true;
    std::ostringstream d;
    const char* sep = "";
    for (const Target& tg : {Target{0.1, 0.0835, 0.1296}, Target{0.2, 0.0849, 0.1742}}) {
        const double cb = w.find("cb", tg.noise)->mean;
        const double ada = w.find("adaboost", tg.noise)->mean;
        const int wins = paired_wins(w, tg.noise);
        const int rwins = paired_wins(r, tg.noise);
        const bool cb_ok = within(cb, tg.cb, 0.02);
        const bool ada_ok = within(ada, tg.ada, 0.02);
        ok = ok && cb_ok && ada_ok && wins >= 27 && rwins >= 27;
        d << sep << fmt(tg.noise, 1) << ": cb " << fmt(cb) << (cb_ok ? "" : "(out)") << " vs " << fmt(tg.cb) << ", adaboost "
          << fmt(ada) << (ada_ok ? "" : "(out)") << " vs " << fmt(tg.ada) << ", cb<adaboost " << wins
          << "/30 weighted, " << rwins << "/30 resample [resample means cb " << fmt(r.find("cb", tg.noise)->mean)
          << ", adaboost " << fmt(r.find("adaboost", tg.noise)->mean) << "]";
        sep = "; ";
    }
    return {ok, d.str()};
}

Outcome sine_error_rates()
{
    const auto t = run_experiment(grid_config(Scenario::sine, {0.2}, {"adaboost", "cb"}));
    const double cb = t.find("cb", 0.2)->mean;
    const double ada = t.find("adaboost", 0.2)->mean;
    return {within(cb, 0.2096, 0.02) && within(ada, 0.2641, 0.02),
        "cb " + fmt(cb) + " (target 0.2096 +-0.02), adaboost " + fmt(ada) + " (target 0.2641 +-0.02)"};
}

Outcome bayes_proximity()
{
    const auto t = run_experiment(grid_config(Scenario::normal, {0.0}, {"cb"}));
    const double cb = t.find("cb", 0.0)->mean;
    const double bayes = oracle::standard_normal_cdf(-std::sqrt(2.0));
    return {cb <= 0.095, "cb " + fmt(cb) + " <= 0.095 (Bayes error " + fmt(bayes) + ")"};
}

Outcome weight_ordering()
{
    ExperimentConfig cfg = grid_config(Scenario::normal, {0.1}, {"adaboost", "cb"});
    cfg.repetitions = 10;
    cfg.test_n = 1000;
    cfg.weight_traces = true;
    cfg.boost.record_trace = true;
    const auto t = run_experiment(cfg);
    const auto* ada = t.find_trace("adaboost", 0.1, "mislabeled");
    const auto* cb = t.find_trace("cb", 0.1, "mislabeled");
    const auto* hi = t.find_trace("cb", 0.1, "high_certainty");
    const auto* lo = t.find_trace("cb", 0.1, "low_certainty");
    if (!ada || !cb || !hi || !lo)
        return {false, "missing weight series"};
    std::size_t above = 0, compared = 0;
    for (std::size_t m = 50; m < std::min(ada->mean.size(), cb->mean.size()); ++m) {
        ++compared;
        above += ada->mean[m] > cb->mean[m];
    }
    const double frac = compared ? static_cast<double>(above) / static_cast<double>(compared) : 0.0;
    const bool init = hi->mean[0] > lo->mean[0];
    return {compared > 0 && frac >= 0.9 && init,
        "mislabeled mean D adaboost > cb at " + std::to_string(above) + "/" + std::to_string(compared)
            + " iterations past 50; cb m=1 high " + fmt(hi->mean[0], 5) + " vs low " + fmt(lo->mean[0], 5)};
}

Outcome early_stopping()
{
    ExperimentConfig cfg = grid_config(Scenario::sine, {0.3}, {"adaboost", "cb"});
    cfg.test_n = 1000;
    const auto count = [](const ResultCell* c, bool early) {
        int k = 0;
        for (const auto& r : c->rounds)
            k += r && ((*r < 200) == early);
        return k;
    };
    const auto w = run_experiment(cfg);
    cfg.boost.mode = LearnerMode::resample;
    const auto r = run_experiment(cfg);
    const int cb_early = count(w.find("cb", 0.3), true);
    const int ada_full = count(w.find("adaboost", 0.3), false);
    return {cb_early > 15 && ada_full == 30,
        "weighted: cb stopped early in " + std::to_string(cb_early) + "/30, adaboost ran to 200 in "
            + std::to_string(ada_full) + "/30; resample: cb early " + std::to_string(count(r.find("cb", 0.3), true))
            + "/30, adaboost to 200 in " + std::to_string(count(r.find("adaboost", 0.3), false)) + "/30"};
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"gamma=1 reduces CB-AdaBoost to AdaBoost", gamma_one_reduction},
        {"weight-gap and coefficient properties", propositions_suite},
        {"conditional risk strictly decreases", risk_monotonicity},
        {"stump matches exhaustive search", stump_oracle},
        {"Bayes confidence means, Normal 10%", confidence_means},
        {"test error, Normal 10%/20% with KNN confidence", normal_error_rates},
        {"test error, Sine 20%", sine_error_rates},
        {"CB near Bayes error on clean Normal", bayes_proximity},
        {"weight trajectories, Normal 10%", weight_ordering},
        {"early stopping on Sine 30%", early_stopping},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& ex) {
            o = {false, std::string("exception: ") + ex.what()};
        }
        failed += !o.pass;
        std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
