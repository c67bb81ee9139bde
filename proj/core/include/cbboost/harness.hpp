#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cbboost/boost.hpp"
#include "cbboost/confidence.hpp"
#include "cbboost/dataset.hpp"
#include "cbboost/synth.hpp"

namespace cbboost {

double test_error(const Ensemble& e, const Dataset& test);

// Drops every instance with gamma < threshold, then runs plain AdaBoost.
Ensemble run_disc(const Dataset& train, const ConfidenceVector& gamma, double threshold, const BoostConfig& cfg);

// Flips every label with gamma < threshold, then runs plain AdaBoost.
Ensemble run_corr(const Dataset& train, const ConfidenceVector& gamma, double threshold, const BoostConfig& cfg);

Dataset corrected_labels(const Dataset& train, const ConfidenceVector& gamma, double threshold);

// Mean of D per iteration over instance groups. A series is absent when its
// group is empty.
struct WeightGroups {
    std::optional<std::vector<double>> mislabeled;
    std::optional<std::vector<double>> clean;
    std::optional<std::vector<double>> high_certainty; // max(gamma, 1 - gamma) > cut
    std::optional<std::vector<double>> low_certainty;
};

WeightGroups weight_trace_groups(const BoostTrace& trace, const NoiseMask& mask, const ConfidenceVector& gamma,
    double certainty_cut = 0.7);

struct Method {
    enum class Kind { stump, adaboost, cb, disc, corr };
    Kind kind = Kind::adaboost;
    double threshold = 0.0; // disc / corr only

    // "stump", "adaboost", "cb", "disc20", "corr50", "disc:0.35", ...
    static Method parse(std::string_view name);
    std::string name() const;
    bool needs_confidence() const noexcept { return kind == Kind::cb || kind == Kind::disc || kind == Kind::corr; }
    bool operator==(const Method&) const = default;
};

struct DataSource {
    std::optional<Scenario> scenario;
    std::filesystem::path csv;
    CsvOptions csv_options;
    double train_fraction = 0.5;
};

struct ExperimentConfig {
    DataSource source;
    std::size_t train_n = 500;
    std::size_t test_n = 10000;
    std::vector<double> noise_levels{0.1};
    std::size_t repetitions = 30;
    std::vector<Method> methods;
    ConfidenceSettings confidence;
    // Bayes confidence is given the injected noise level unless this is false.
    bool bayes_uses_injected_noise = true;
    BoostConfig boost;
    std::uint64_t base_seed = 1;
    std::size_t jobs = 1;
    bool weight_traces = false;
    double certainty_cut = 0.7;

    void validate() const;
};

nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg);
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);

struct ResultCell {
    Method method;
    double noise_level = 0.0;
    std::vector<std::optional<double>> errors;     // per repetition; nullopt = method failed
    std::vector<std::optional<std::size_t>> rounds; // ensemble size per repetition
    std::vector<std::string> failures;
    double mean = 0.0;
    double stddev = 0.0;
    bool stddev_defined = false; // false with fewer than two completed repetitions
    std::size_t completed = 0;
};

struct ConfidenceRow {
    double noise_level = 0.0;
    std::vector<std::optional<double>> clean_mean;      // per repetition
    std::vector<std::optional<double>> mislabeled_mean; // per repetition
    std::vector<std::optional<double>> clean_stddev;
    std::vector<std::optional<double>> mislabeled_stddev;
};

struct TraceSeries {
    std::string method;
    double noise_level = 0.0;
    std::string group;
    std::vector<double> mean;             // averaged over repetitions that reached the iteration
    std::vector<std::size_t> contributors; // repetitions contributing to each iteration
};

struct ResultsTable {
    std::vector<ResultCell> cells;
    std::vector<ConfidenceRow> confidence;
    std::vector<TraceSeries> traces;

    const ResultCell* find(std::string_view method, double noise_level) const;
    const TraceSeries* find_trace(std::string_view method, double noise_level, std::string_view group) const;
    const ConfidenceRow* find_confidence(double noise_level) const;
};

ResultsTable run_experiment(const ExperimentConfig& cfg);

// Mean and sample standard deviation over the completed repetitions.
void summarize(ResultCell& cell);
std::optional<double> mean_of(const std::vector<std::optional<double>>& values);

nlohmann::json results_to_json(const ResultsTable& table);
void write_results_csv(const ResultsTable& table, std::ostream& out);
void write_traces_csv(const ResultsTable& table, std::ostream& out);

} // namespace cbboost
