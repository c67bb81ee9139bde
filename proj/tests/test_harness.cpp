#include <doctest.h>

#include <sstream>

#include "cbboost/error.hpp"
#include "cbboost/harness.hpp"

using namespace cbboost;

namespace {

ExperimentConfig small_config()
{
    ExperimentConfig cfg;
    cfg.source.scenario = Scenario::normal;
    cfg.train_n = 80;
    cfg.test_n = 500;
    cfg.noise_levels = {0.0, 0.2};
    cfg.repetitions = 4;
    for (const char* m : {"stump", "adaboost", "cb", "disc50", "corr20"})
        cfg.methods.push_back(Method::parse(m));
    cfg.boost.max_iterations = 30;
    cfg.boost.record_trace = false;
    return cfg;
}

} // namespace

TEST_CASE("test error counts mistakes")
{
    FeatureMatrix x(10, 1);
    for (int i = 0; i < 10; ++i)
        x(i, 0) = i;
    std::vector<int> y(10, 1);
    y[2] = y[5] = y[7] = -1;
    const Dataset ds(x, y);
    Ensemble plus;
    plus.terms.push_back({1.0, Stump{0, below_all_threshold, 1}});
    CHECK(test_error(plus, ds) == doctest::Approx(0.3));

    FeatureMatrix b(4, 1);
    b << 0, 1, 2, 3;
    const Dataset balanced(b, {-1, -1, 1, 1});
    CHECK(test_error(plus, balanced) == 0.5);
    Ensemble perfect;
    perfect.terms.push_back({1.0, Stump{0, 1.5, 1}});
    CHECK(test_error(perfect, balanced) == 0.0);
}

TEST_CASE("DISC and CORR")
{
    const Dataset ds = inject_label_noise(gen_normal(60, 1), 0.1, 2).data;
    std::vector<double> g(60, 0.9);
    g[1] = 0.3;
    g[4] = 0.1;
    const ConfidenceVector gamma(g);
    BoostConfig cfg;
    cfg.max_iterations = 15;

    CHECK(run_disc(ds, gamma, 0.0, cfg) == train_adaboost(ds, cfg).ensemble);
    CHECK(run_corr(ds, gamma, 0.0, cfg) == train_adaboost(ds, cfg).ensemble);

    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < 60; ++i)
        if (i != 1 && i != 4)
            keep.push_back(i);
    CHECK(run_disc(ds, gamma, 0.5, cfg) == train_adaboost(ds.subset(keep), cfg).ensemble);

    const Dataset fixed = corrected_labels(ds, gamma, 0.5);
    for (std::size_t i = 0; i < 60; ++i) {
        const int trusted = g[i] >= 0.5 ? ds.label(i) : -ds.label(i);
        CHECK(fixed.label(i) == trusted);
    }
    CHECK(run_corr(ds, gamma, 0.5, cfg) == train_adaboost(fixed, cfg).ensemble);

    CHECK_THROWS_AS(run_disc(ds, ConfidenceVector::constant(60, 0.2), 0.5, cfg), Error);
}

TEST_CASE("method names")
{
    CHECK(Method::parse("disc20").threshold == doctest::Approx(0.2));
    CHECK(Method::parse("corr80").kind == Method::Kind::corr);
    CHECK(Method::parse("disc:0.375").name() == "disc:0.375");
    CHECK(Method::parse("disc:0.35").name() == "disc35");
    CHECK(Method::parse("corr50").name() == "corr50");
    CHECK(Method::parse("cb").needs_confidence());
    CHECK(!Method::parse("adaboost").needs_confidence());
    CHECK_THROWS_AS(Method::parse("logitboost"), Error);
    CHECK_THROWS_AS(Method::parse("disc"), Error);
}

TEST_CASE("experiment is reproducible and independent of the worker count")
{
    ExperimentConfig cfg = small_config();
    const auto a = results_to_json(run_experiment(cfg)).dump();
    const auto b = results_to_json(run_experiment(cfg)).dump();
    CHECK(a == b);
    cfg.jobs = 3;
    CHECK(results_to_json(run_experiment(cfg)).dump() == a);
}

TEST_CASE("adding a method leaves the other cells unchanged")
{
    ExperimentConfig cfg = small_config();
    const auto base = run_experiment(cfg);
    cfg.methods.insert(cfg.methods.begin(), Method::parse("corr80"));
    const auto more = run_experiment(cfg);
    for (const auto& c : base.cells)
        CHECK(more.find(c.method.name(), c.noise_level)->errors == c.errors);
}

TEST_CASE("table statistics recompute from the per-repetition values")
{
    const auto table = run_experiment(small_config());
    for (const auto& c : table.cells) {
        REQUIRE(c.completed == 4);
        double s = 0;
        for (const auto& e : c.errors)
            s += *e;
        const double mean = s / 4;
        double ss = 0;
        for (const auto& e : c.errors)
            ss += (*e - mean) * (*e - mean);
        CHECK(std::abs(c.mean - mean) < 1e-12);
        CHECK(std::abs(c.stddev - std::sqrt(ss / 3)) < 1e-12);
        CHECK(c.stddev_defined);
    }
    CHECK(table.find("stump", 0.0)->rounds.front() == 1u);
    CHECK(table.find_confidence(0.2) != nullptr);
}

TEST_CASE("single repetition flags the standard deviation")
{
    ExperimentConfig cfg = small_config();
    cfg.repetitions = 1;
    const auto table = run_experiment(cfg);
    for (const auto& c : table.cells) {
        CHECK(c.stddev == 0.0);
        CHECK(!c.stddev_defined);
    }
    std::ostringstream csv;
    write_results_csv(table, csv);
    CHECK(csv.str().rfind("method,noise_level,mean,std,completed,missing\n", 0) == 0);
    CHECK(csv.str().find(",,1,0\n") != std::string::npos);
}

TEST_CASE("method failures become missing cells")
{
    ExperimentConfig cfg = small_config();
    cfg.train_n = 5; // too small for a 5-neighbour filter
    cfg.noise_levels = {0.0};
    cfg.repetitions = 2;
    const auto table = run_experiment(cfg);
    const auto* cb = table.find("cb", 0.0);
    CHECK(cb->completed == 0);
    CHECK(!cb->failures[0].empty());
    CHECK(table.find("adaboost", 0.0)->completed == 2);
    const auto j = results_to_json(table);
    CHECK(j["cells"][2]["missing"] == 2);
}

TEST_CASE("weight trace groups")
{
    const NoisyDataset noisy = inject_label_noise(gen_normal(100, 3), 0.1, 4);
    const auto gamma = estimate_confidence(noisy.data, {}).gamma;
    BoostConfig cfg;
    cfg.max_iterations = 40;
    const auto cb = train_cb_adaboost(noisy.data, gamma, cfg);
    const auto ada = train_adaboost(noisy.data, cfg);
    const auto gc = weight_trace_groups(cb.trace, noisy.mask, gamma);
    const auto ga = weight_trace_groups(ada.trace, noisy.mask, gamma);
    REQUIRE(gc.high_certainty);
    REQUIRE(gc.low_certainty);
    CHECK((*gc.high_certainty)[0] > (*gc.low_certainty)[0]);
    CHECK((*ga.mislabeled)[0] == doctest::Approx(0.01));
    CHECK((*ga.clean)[0] == doctest::Approx(0.01));
    CHECK((*ga.high_certainty)[0] == doctest::Approx((*ga.low_certainty)[0]));

    for (std::size_t m = 0; m < cb.trace.steps.size(); ++m) {
        const auto& d = cb.trace.steps[m].distribution;
        const double mx = *std::max_element(d.begin(), d.end());
        for (const auto* s : {&gc.mislabeled, &gc.clean, &gc.high_certainty, &gc.low_certainty}) {
            CHECK((**s)[m] >= 0.0);
            CHECK((**s)[m] <= mx + 1e-15);
        }
    }

    NoiseMask clean{std::vector<bool>(100, false), 0.0};
    CHECK(!weight_trace_groups(ada.trace, clean, gamma).mislabeled);
}

TEST_CASE("experiment config json")
{
    ExperimentConfig cfg = small_config();
    cfg.confidence.method = ConfidenceMethod::bayes;
    cfg.weight_traces = true;
    const auto j = experiment_config_to_json(cfg);
    const auto back = experiment_config_from_json(j);
    CHECK(experiment_config_to_json(back) == j);
    CHECK(back.methods == cfg.methods);

    auto bad = j;
    bad["repetitions"] = 0;
    CHECK_THROWS_AS(experiment_config_from_json(bad), Error);
    bad = j;
    bad["methods"] = {"disc:1.5"};
    CHECK_THROWS_AS(experiment_config_from_json(bad), Error);
    bad = j;
    bad["noise_levels"] = "lots";
    CHECK_THROWS_AS(experiment_config_from_json(bad), Error);
}

TEST_CASE("weight traces in the results")
{
    ExperimentConfig cfg = small_config();
    cfg.methods = {Method::parse("adaboost"), Method::parse("cb")};
    cfg.noise_levels = {0.2};
    cfg.weight_traces = true;
    cfg.boost.record_trace = true;
    const auto table = run_experiment(cfg);
    const auto* mis = table.find_trace("cb", 0.2, "mislabeled");
    REQUIRE(mis != nullptr);
    CHECK(!mis->mean.empty());
    CHECK(mis->contributors.front() == 4);
    std::ostringstream out;
    write_traces_csv(table, out);
    CHECK(out.str().rfind("method,noise_level,iteration,group,mean\n", 0) == 0);
    CHECK(out.str().find("cb,0.2,1,mislabeled,") != std::string::npos);
}
