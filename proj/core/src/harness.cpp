#include "cbboost/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <mutex>
#include <numeric>
#include <ostream>
#include <thread>

#include "cbboost/error.hpp"
#include "cbboost/random.hpp"

namespace cbboost {

namespace {

// Shortest round-trip form, for table keys such as noise levels.
std::string short_double(double v)
{
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

} // namespace

double test_error(const Ensemble& e, const Dataset& test)
{
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < test.size(); ++i)
        if (e.predict(test.row(i)) != test.label(i))
            ++wrong;
    return static_cast<double>(wrong) / static_cast<double>(test.size());
}

Ensemble run_disc(const Dataset& train, const ConfidenceVector& gamma, double threshold, const BoostConfig& cfg)
{
    if (gamma.size() != train.size())
        throw Error("disc", "gamma length differs from training size");
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < train.size(); ++i)
        if (!(gamma[i] < threshold))
            keep.push_back(i);
    if (keep.size() < 2)
        throw Error("disc", "fewer than 2 instances survive threshold " + format_double(threshold));
    const Dataset survivors = train.subset(keep);
    if (!survivors.has_both_classes())
        throw Error("disc", "only one class survives threshold " + format_double(threshold));
    return train_adaboost(survivors, cfg).ensemble;
}

Dataset corrected_labels(const Dataset& train, const ConfidenceVector& gamma, double threshold)
{
    if (gamma.size() != train.size())
        throw Error("corr", "gamma length differs from training size");
    std::vector<int> labels(train.labels().begin(), train.labels().end());
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (gamma[i] < threshold)
            labels[i] = -labels[i];
    return train.with_labels(std::move(labels));
}

Ensemble run_corr(const Dataset& train, const ConfidenceVector& gamma, double threshold, const BoostConfig& cfg)
{
    return train_adaboost(corrected_labels(train, gamma, threshold), cfg).ensemble;
}

WeightGroups weight_trace_groups(const BoostTrace& trace, const NoiseMask& mask, const ConfidenceVector& gamma,
    double certainty_cut)
{
    const std::size_t n = trace.labels.size();
    if (mask.flipped.size() != n || gamma.size() != n)
        throw Error("trace", "mask/gamma length differs from trace");

    std::vector<int> noise_group(n);
    std::vector<int> certainty_group(n);
    std::array<std::size_t, 2> noise_sizes{0, 0};
    std::array<std::size_t, 2> certainty_sizes{0, 0};
    for (std::size_t i = 0; i < n; ++i) {
        noise_group[i] = mask.flipped[i] ? 0 : 1;
        certainty_group[i] = std::max(gamma[i], 1.0 - gamma[i]) > certainty_cut ? 0 : 1;
        ++noise_sizes[static_cast<std::size_t>(noise_group[i])];
        ++certainty_sizes[static_cast<std::size_t>(certainty_group[i])];
    }

    std::array<std::vector<double>, 2> noise_series;
    std::array<std::vector<double>, 2> certainty_series;
    for (const auto& step : trace.steps) {
        std::array<double, 2> noise_sum{0.0, 0.0};
        std::array<double, 2> cert_sum{0.0, 0.0};
        for (std::size_t i = 0; i < n; ++i) {
            noise_sum[static_cast<std::size_t>(noise_group[i])] += step.distribution[i];
            cert_sum[static_cast<std::size_t>(certainty_group[i])] += step.distribution[i];
        }
        for (std::size_t g = 0; g < 2; ++g) {
            if (noise_sizes[g])
                noise_series[g].push_back(noise_sum[g] / static_cast<double>(noise_sizes[g]));
            if (certainty_sizes[g])
                certainty_series[g].push_back(cert_sum[g] / static_cast<double>(certainty_sizes[g]));
        }
    }

    WeightGroups out;
    if (noise_sizes[0])
        out.mislabeled = std::move(noise_series[0]);
    if (noise_sizes[1])
        out.clean = std::move(noise_series[1]);
    if (certainty_sizes[0])
        out.high_certainty = std::move(certainty_series[0]);
    if (certainty_sizes[1])
        out.low_certainty = std::move(certainty_series[1]);
    return out;
}

Method Method::parse(std::string_view name)
{
    if (name == "stump")
        return {Kind::stump, 0.0};
    if (name == "adaboost")
        return {Kind::adaboost, 0.0};
    if (name == "cb")
        return {Kind::cb, 0.0};
    for (const auto& [prefix, kind] : {std::pair{std::string_view("disc"), Kind::disc}, std::pair{std::string_view("corr"), Kind::corr}}) {
        if (name.substr(0, prefix.size()) != prefix)
            continue;
        std::string_view rest = name.substr(prefix.size());
        double t = 0.0;
        if (!rest.empty() && rest.front() == ':') {
            t = parse_double(std::string(rest.substr(1)));
        } else if (!rest.empty()) {
            t = parse_double(std::string(rest)) / 100.0;
        } else {
            throw Error("config", "method '" + std::string(name) + "' needs a threshold, e.g. " + std::string(prefix) + "50");
        }
        if (!(t >= 0.0 && t <= 1.0))
            throw Error("config", "threshold of '" + std::string(name) + "' must lie in [0, 1]");
        return {kind, t};
    }
    throw Error("config", "unknown method '" + std::string(name) + "'");
}

std::string Method::name() const
{
    switch (kind) {
    case Kind::stump:
        return "stump";
    case Kind::adaboost:
        return "adaboost";
    case Kind::cb:
        return "cb";
    case Kind::disc:
    case Kind::corr: {
        const std::string prefix = kind == Kind::disc ? "disc" : "corr";
        const double pct = threshold * 100.0;
        if (std::abs(pct - std::round(pct)) < 1e-9)
            return prefix + std::to_string(static_cast<long>(std::llround(pct)));
        return prefix + ":" + format_double(threshold);
    }
    }
    return "unknown";
}

void ExperimentConfig::validate() const
{
    if (!source.scenario && source.csv.empty())
        throw Error("config", "experiment needs a scenario or a CSV source");
    if (repetitions < 1)
        throw Error("config", "repetitions must be at least 1");
    if (methods.empty())
        throw Error("config", "no methods selected");
    for (double e : noise_levels)
        if (!(e >= 0.0 && e < 0.5))
            throw Error("config", "noise levels must lie in [0, 0.5)");
    for (const auto& m : methods)
        if ((m.kind == Method::Kind::disc || m.kind == Method::Kind::corr) && !(m.threshold > 0.0 && m.threshold < 1.0))
            throw Error("config", "DISC/CORR thresholds must lie in (0, 1)");
    if (source.scenario && (train_n < 2 || test_n < 1))
        throw Error("config", "train_n must be >= 2 and test_n >= 1");
    if (!(certainty_cut >= 0.5 && certainty_cut < 1.0))
        throw Error("config", "certainty_cut must lie in [0.5, 1)");
    boost.validate();
}

nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg)
{
    nlohmann::json j;
    if (cfg.source.scenario) {
        j["scenario"] = scenario_name(*cfg.source.scenario);
        j["train_n"] = cfg.train_n;
        j["test_n"] = cfg.test_n;
    } else {
        j["csv"] = cfg.source.csv.string();
        j["label_column"] = cfg.source.csv_options.label_column;
        j["positive_label"] = cfg.source.csv_options.positive_label;
        j["train_fraction"] = cfg.source.train_fraction;
    }
    j["noise_levels"] = cfg.noise_levels;
    j["repetitions"] = cfg.repetitions;
    std::vector<std::string> methods;
    for (const auto& m : cfg.methods)
        methods.push_back(m.name());
    j["methods"] = methods;
    const auto& c = cfg.confidence;
    j["confidence"] = {
        {"method", c.method == ConfidenceMethod::knn ? "knn" : "bayes"},
        {"k", c.k},
        {"filter_k", c.filter_k},
        {"thresholds", c.thresholds},
        {"form", c.form == BayesForm::consistent ? "consistent" : "literal"},
        {"standardize", c.standardize},
        {"noise_level", cfg.bayes_uses_injected_noise ? nlohmann::json("injected") : nlohmann::json(c.noise_level)},
    };
    j["boost"] = config_to_json(cfg.boost);
    j["base_seed"] = cfg.base_seed;
    j["jobs"] = cfg.jobs;
    j["weight_traces"] = cfg.weight_traces;
    j["certainty_cut"] = cfg.certainty_cut;
    return j;
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j)
{
    ExperimentConfig cfg;
    try {
        if (j.contains("scenario"))
            cfg.source.scenario = parse_scenario(j.at("scenario").get<std::string>());
        if (j.contains("csv"))
            cfg.source.csv = j.at("csv").get<std::string>();
        if (j.contains("label_column"))
            cfg.source.csv_options.label_column = j.at("label_column").get<std::string>();
        if (j.contains("positive_label"))
            cfg.source.csv_options.positive_label = j.at("positive_label").get<std::string>();
        if (j.contains("train_fraction"))
            cfg.source.train_fraction = j.at("train_fraction").get<double>();
        if (j.contains("train_n"))
            cfg.train_n = j.at("train_n").get<std::size_t>();
        if (j.contains("test_n"))
            cfg.test_n = j.at("test_n").get<std::size_t>();
        if (j.contains("noise_levels"))
            cfg.noise_levels = j.at("noise_levels").get<std::vector<double>>();
        if (j.contains("repetitions"))
            cfg.repetitions = j.at("repetitions").get<std::size_t>();
        if (j.contains("methods"))
            for (const auto& m : j.at("methods"))
                cfg.methods.push_back(Method::parse(m.get<std::string>()));
        else
            cfg.methods = {Method::parse("adaboost"), Method::parse("cb")};
        if (j.contains("confidence")) {
            const auto& c = j.at("confidence");
            auto& s = cfg.confidence;
            if (c.contains("method"))
                s.method = parse_confidence_method(c.at("method").get<std::string>());
            if (c.contains("k"))
                s.k = c.at("k").get<std::size_t>();
            s.filter_k = c.contains("filter_k") ? c.at("filter_k").get<std::size_t>() : s.k;
            if (c.contains("thresholds"))
                s.thresholds = c.at("thresholds").get<std::vector<double>>();
            if (c.contains("form"))
                s.form = parse_bayes_form(c.at("form").get<std::string>());
            if (c.contains("standardize"))
                s.standardize = c.at("standardize").get<bool>();
            if (c.contains("noise_level")) {
                const auto& nl = c.at("noise_level");
                cfg.bayes_uses_injected_noise = nl.is_string() && nl.get<std::string>() == "injected";
                if (!cfg.bayes_uses_injected_noise)
                    s.noise_level = nl.get<double>();
            }
        }
        if (j.contains("boost"))
            cfg.boost = config_from_json(j.at("boost"));
        if (j.contains("base_seed"))
            cfg.base_seed = j.at("base_seed").get<std::uint64_t>();
        if (j.contains("jobs"))
            cfg.jobs = j.at("jobs").get<std::size_t>();
        if (j.contains("weight_traces"))
            cfg.weight_traces = j.at("weight_traces").get<bool>();
        if (j.contains("certainty_cut"))
            cfg.certainty_cut = j.at("certainty_cut").get<double>();
    } catch (const nlohmann::json::exception& ex) {
        throw Error("config", std::string("malformed experiment config: ") + ex.what());
    }
    cfg.validate();
    return cfg;
}

const ResultCell* ResultsTable::find(std::string_view method, double noise_level) const
{
    for (const auto& c : cells)
        if (c.method.name() == method && c.noise_level == noise_level)
            return &c;
    return nullptr;
}

const TraceSeries* ResultsTable::find_trace(std::string_view method, double noise_level, std::string_view group) const
{
    for (const auto& t : traces)
        if (t.method == method && t.noise_level == noise_level && t.group == group)
            return &t;
    return nullptr;
}

const ConfidenceRow* ResultsTable::find_confidence(double noise_level) const
{
    for (const auto& c : confidence)
        if (c.noise_level == noise_level)
            return &c;
    return nullptr;
}

std::optional<double> mean_of(const std::vector<std::optional<double>>& values)
{
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& v : values)
        if (v) {
            sum += *v;
            ++count;
        }
    if (count == 0)
        return std::nullopt;
    return sum / static_cast<double>(count);
}

void summarize(ResultCell& cell)
{
    std::vector<double> done;
    for (const auto& e : cell.errors)
        if (e)
            done.push_back(*e);
    cell.completed = done.size();
    const GroupStats s = group_stats(done);
    cell.mean = s.mean;
    cell.stddev = s.stddev;
    cell.stddev_defined = done.size() >= 2;
}

namespace {

struct MethodOutcome {
    std::optional<double> error;
    std::optional<std::size_t> rounds;
    std::string failure;
};

struct RepOutcome {
    std::vector<MethodOutcome> methods;
    std::optional<ConfidenceQuality> quality;
    std::vector<std::optional<WeightGroups>> groups; // aligned with methods; adaboost / cb only
};

bool traced(const Method& m)
{
    return m.kind == Method::Kind::adaboost || m.kind == Method::Kind::cb;
}

RepOutcome run_repetition(const ExperimentConfig& cfg, const std::optional<Dataset>& csv_data, double noise, std::size_t rep)
{
    const std::string noise_tag = format_double(noise);
    Dataset train = [&] {
        if (cfg.source.scenario)
            return generate(*cfg.source.scenario, cfg.train_n, derive_seed(cfg.base_seed, rep, "train-data"));
        return split(*csv_data, cfg.source.train_fraction, derive_seed(cfg.base_seed, rep, "split")).train;
    }();
    const Dataset test = [&] {
        if (cfg.source.scenario)
            return generate(*cfg.source.scenario, cfg.test_n, derive_seed(cfg.base_seed, rep, "test-data"));
        return split(*csv_data, cfg.source.train_fraction, derive_seed(cfg.base_seed, rep, "split")).test;
    }();
    const NoisyDataset noisy = inject_label_noise(train, noise, derive_seed(cfg.base_seed, rep, "noise:" + noise_tag));

    RepOutcome out;
    out.methods.resize(cfg.methods.size());
    out.groups.resize(cfg.methods.size());

    const bool want_confidence = cfg.weight_traces
        || std::any_of(cfg.methods.begin(), cfg.methods.end(), [](const Method& m) { return m.needs_confidence(); });
    std::optional<ConfidenceVector> gamma;
    std::string confidence_failure;
    if (want_confidence) {
        ConfidenceSettings settings = cfg.confidence;
        if (cfg.bayes_uses_injected_noise)
            settings.noise_level = noise;
        try {
            gamma = estimate_confidence(noisy.data, settings).gamma;
            out.quality = confidence_quality(*gamma, noisy.mask);
        } catch (const std::exception& ex) {
            confidence_failure = std::string("confidence: ") + ex.what();
        }
    }

    for (std::size_t k = 0; k < cfg.methods.size(); ++k) {
        const Method& method = cfg.methods[k];
        MethodOutcome& result = out.methods[k];
        BoostConfig boost = cfg.boost;
        boost.seed = derive_seed(cfg.base_seed, rep, "learner:" + method.name() + ":" + noise_tag);
        boost.record_trace = cfg.weight_traces && traced(method);
        try {
            if (method.needs_confidence() && !gamma)
                throw std::runtime_error(confidence_failure);
            Ensemble ensemble;
            std::optional<BoostTrace> trace;
            switch (method.kind) {
            case Method::Kind::stump:
                ensemble = train_single_stump(noisy.data);
                break;
            case Method::Kind::adaboost: {
                auto r = train_adaboost(noisy.data, boost);
                ensemble = std::move(r.ensemble);
                trace = std::move(r.trace);
                break;
            }
            case Method::Kind::cb: {
                auto r = train_cb_adaboost(noisy.data, *gamma, boost);
                ensemble = std::move(r.ensemble);
                trace = std::move(r.trace);
                break;
            }
            case Method::Kind::disc:
                ensemble = run_disc(noisy.data, *gamma, method.threshold, boost);
                break;
            case Method::Kind::corr:
                ensemble = run_corr(noisy.data, *gamma, method.threshold, boost);
                break;
            }
            if (ensemble.terms.empty())
                throw std::runtime_error("no boosting round was accepted");
            result.error = test_error(ensemble, test);
            result.rounds = ensemble.stopped_at();
            if (boost.record_trace && trace && gamma)
                out.groups[k] = weight_trace_groups(*trace, noisy.mask, *gamma, cfg.certainty_cut);
        } catch (const std::exception& ex) {
            result.failure = ex.what();
        }
    }
    return out;
}

void accumulate_series(TraceSeries& series, const std::vector<double>& values)
{
    if (series.mean.size() < values.size()) {
        series.mean.resize(values.size(), 0.0);
        series.contributors.resize(values.size(), 0);
    }
    for (std::size_t m = 0; m < values.size(); ++m) {
        series.mean[m] += values[m];
        ++series.contributors[m];
    }
}

} // namespace

ResultsTable run_experiment(const ExperimentConfig& cfg)
{
    cfg.validate();
    std::optional<Dataset> csv_data;
    if (!cfg.source.scenario)
        csv_data = load_csv(cfg.source.csv, cfg.source.csv_options);

    const std::size_t reps = cfg.repetitions;
    const std::size_t tasks = cfg.noise_levels.size() * reps;
    std::vector<std::optional<RepOutcome>> outcomes(tasks);
    std::vector<std::string> task_errors(tasks);

    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t t = next++; t < tasks; t = next++) {
            try {
                outcomes[t] = run_repetition(cfg, csv_data, cfg.noise_levels[t / reps], t % reps);
            } catch (const std::exception& ex) {
                task_errors[t] = ex.what();
            }
        }
    };
    const std::size_t jobs = std::clamp<std::size_t>(cfg.jobs, 1, std::max<std::size_t>(tasks, 1));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t j = 0; j < jobs; ++j)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }

    // Aggregation runs serially in (noise, repetition) order, so the table
    // does not depend on scheduling.
    ResultsTable table;
    for (std::size_t l = 0; l < cfg.noise_levels.size(); ++l) {
        const double noise = cfg.noise_levels[l];
        ConfidenceRow conf{noise, {}, {}, {}, {}};
        std::vector<ResultCell> cells;
        for (const auto& m : cfg.methods)
            cells.push_back(ResultCell{m, noise, {}, {}, {}, 0.0, 0.0, false, 0});
        std::vector<std::array<TraceSeries, 4>> series(cfg.methods.size());
        for (std::size_t k = 0; k < cfg.methods.size(); ++k) {
            const char* names[4] = {"mislabeled", "clean", "high_certainty", "low_certainty"};
            for (std::size_t g = 0; g < 4; ++g)
                series[k][g] = TraceSeries{cfg.methods[k].name(), noise, names[g], {}, {}};
        }

        for (std::size_t r = 0; r < reps; ++r) {
            const std::size_t t = l * reps + r;
            const auto& outcome = outcomes[t];
            std::optional<GroupStats> clean;
            std::optional<GroupStats> mis;
            if (outcome && outcome->quality) {
                clean = outcome->quality->clean;
                mis = outcome->quality->mislabeled;
            }
            const auto stat = [](const std::optional<GroupStats>& g, bool want_mean) -> std::optional<double> {
                if (!g)
                    return std::nullopt;
                return want_mean ? g->mean : g->stddev;
            };
            conf.clean_mean.push_back(stat(clean, true));
            conf.mislabeled_mean.push_back(stat(mis, true));
            conf.clean_stddev.push_back(stat(clean, false));
            conf.mislabeled_stddev.push_back(stat(mis, false));

            for (std::size_t k = 0; k < cfg.methods.size(); ++k) {
                if (!outcome) {
                    cells[k].errors.emplace_back();
                    cells[k].rounds.emplace_back();
                    cells[k].failures.push_back(task_errors[t]);
                    continue;
                }
                const auto& mo = outcome->methods[k];
                cells[k].errors.push_back(mo.error);
                cells[k].rounds.push_back(mo.rounds);
                cells[k].failures.push_back(mo.failure);
                if (const auto& wg = outcome->groups[k]) {
                    const std::optional<std::vector<double>>* parts[4] = {&wg->mislabeled, &wg->clean, &wg->high_certainty, &wg->low_certainty};
                    for (std::size_t g = 0; g < 4; ++g)
                        if (*parts[g])
                            accumulate_series(series[k][g], **parts[g]);
                }
            }
        }
        for (auto& c : cells) {
            summarize(c);
            table.cells.push_back(std::move(c));
        }
        table.confidence.push_back(std::move(conf));
        if (cfg.weight_traces) {
            for (auto& per_method : series)
                for (auto& s : per_method) {
                    if (s.mean.empty())
                        continue;
                    for (std::size_t m = 0; m < s.mean.size(); ++m)
                        s.mean[m] /= static_cast<double>(s.contributors[m]);
                    table.traces.push_back(std::move(s));
                }
        }
    }
    return table;
}

nlohmann::json results_to_json(const ResultsTable& table)
{
    const auto opt = [](const auto& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : table.cells) {
        nlohmann::json errors = nlohmann::json::array();
        nlohmann::json rounds = nlohmann::json::array();
        for (std::size_t r = 0; r < c.errors.size(); ++r) {
            errors.push_back(opt(c.errors[r]));
            rounds.push_back(opt(c.rounds[r]));
        }
        nlohmann::json failures = nlohmann::json::array();
        for (std::size_t r = 0; r < c.failures.size(); ++r)
            if (!c.failures[r].empty())
                failures.push_back({{"repetition", r}, {"error", c.failures[r]}});
        cells.push_back({
            {"method", c.method.name()},
            {"noise_level", c.noise_level},
            {"mean", c.mean},
            {"std", c.stddev},
            {"std_defined", c.stddev_defined},
            {"completed", c.completed},
            {"missing", c.errors.size() - c.completed},
            {"errors", std::move(errors)},
            {"rounds", std::move(rounds)},
            {"failures", std::move(failures)},
        });
    }
    nlohmann::json conf = nlohmann::json::array();
    for (const auto& row : table.confidence) {
        nlohmann::json clean = nlohmann::json::array();
        nlohmann::json mis = nlohmann::json::array();
        for (std::size_t r = 0; r < row.clean_mean.size(); ++r) {
            clean.push_back(opt(row.clean_mean[r]));
            mis.push_back(opt(row.mislabeled_mean[r]));
        }
        conf.push_back({
            {"noise_level", row.noise_level},
            {"clean_mean", opt(mean_of(row.clean_mean))},
            {"mislabeled_mean", opt(mean_of(row.mislabeled_mean))},
            {"clean_per_repetition", std::move(clean)},
            {"mislabeled_per_repetition", std::move(mis)},
        });
    }
    nlohmann::json traces = nlohmann::json::array();
    for (const auto& t : table.traces)
        traces.push_back({{"method", t.method}, {"noise_level", t.noise_level}, {"group", t.group}, {"mean", t.mean},
            {"contributors", t.contributors}});
    return {{"format", "cbboost-results"}, {"version", 1}, {"cells", std::move(cells)}, {"confidence", std::move(conf)},
        {"weight_traces", std::move(traces)}};
}

void write_results_csv(const ResultsTable& table, std::ostream& out)
{
    out << "method,noise_level,mean,std,completed,missing\n";
    for (const auto& c : table.cells) {
        out << c.method.name() << ',' << short_double(c.noise_level) << ',';
        if (c.completed)
            out << short_double(c.mean);
        out << ',';
        if (c.stddev_defined)
            out << short_double(c.stddev);
        out << ',' << c.completed << ',' << c.errors.size() - c.completed << '\n';
    }
}

void write_traces_csv(const ResultsTable& table, std::ostream& out)
{
    out << "method,noise_level,iteration,group,mean\n";
    for (const auto& t : table.traces)
        for (std::size_t m = 0; m < t.mean.size(); ++m)
            out << t.method << ',' << short_double(t.noise_level) << ',' << m + 1 << ',' << t.group << ','
                << short_double(t.mean[m]) << '\n';
}

} // namespace cbboost
