#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cbboost/confidence.hpp"
#include "cbboost/dataset.hpp"
#include "cbboost/stump.hpp"

namespace cbboost {

enum class LearnerMode { weighted, resample };

LearnerMode parse_learner_mode(std::string_view name);
std::string_view learner_mode_name(LearnerMode mode);

// `consistency` caps the number of rounds at ceil(n^(1 - exponent)).
struct StopRule {
    enum class Kind { fixed, consistency };
    Kind kind = Kind::fixed;
    double exponent = 0.5;

    static StopRule parse(std::string_view text); // "fixed" | "consistency" | "consistency:A"
    std::string to_string() const;
    bool operator==(const StopRule&) const = default;
};

struct BoostConfig {
    std::size_t max_iterations = 200;
    LearnerMode mode = LearnerMode::weighted;
    std::uint64_t seed = 0; // resample mode only
    StopRule stop;
    double epsilon_clamp = 1e-12;
    bool record_trace = true;

    void validate() const;
    std::size_t iteration_cap(std::size_t n) const;
    bool operator==(const BoostConfig&) const = default;
};

struct Term {
    double beta = 0.0;
    Stump stump;
    bool operator==(const Term&) const = default;
};

// f(x) = sum_m beta_m h_m(x); every beta is positive.
struct Ensemble {
    std::vector<Term> terms;

    std::size_t stopped_at() const noexcept { return terms.size(); }
    double score(std::span<const double> x) const;
    int predict(std::span<const double> x) const; // sign(score), 0 -> +1; throws on empty ensemble
    bool operator==(const Ensemble&) const = default;
};

double score(const Ensemble& e, std::span<const double> x);
int predict(const Ensemble& e, std::span<const double> x);

enum class StopReason { budget, nonpositive_beta, degenerate_weights };

std::string_view stop_reason_name(StopReason r);

// One boosting round. w1/w2 are the weights entering the round (rescaled so
// that sum(w1 + w2) = 1 after the first round), next_w1/next_w2 the updated
// weights before rescaling. Plain AdaBoost records w2 = 0.
struct TraceStep {
    std::vector<double> w1;
    std::vector<double> w2;
    std::vector<double> distribution;
    std::vector<int> effective_labels;
    std::vector<int> predictions;
    std::vector<double> next_w1;
    std::vector<double> next_w2;
    double beta = 0.0;
    double weighted_error = 0.0; // epsilon_m (AdaBoost) or epsilon'_m (CB), on the distribution
    double risk = 0.0;           // empirical conditional risk after this round
};

struct BoostTrace {
    std::vector<int> labels;
    std::vector<double> gamma; // all ones for plain AdaBoost
    std::vector<TraceStep> steps;
    StopReason stop_reason = StopReason::budget;
    double rejected_beta = 0.0; // beta of the round that triggered a stop, if any
    double epsilon_clamp = 1e-12;
};

struct BoostResult {
    Ensemble ensemble;
    BoostTrace trace;
};

BoostResult train_adaboost(const Dataset& train, const BoostConfig& cfg);
BoostResult train_cb_adaboost(const Dataset& train, const ConfidenceVector& gamma, const BoostConfig& cfg);

// Single stump fitted on uniform weights, as a one-term ensemble.
Ensemble train_single_stump(const Dataset& train);

// (1/n) sum_i [gamma_i exp(-y_i f(x_i)) + (1 - gamma_i) exp(y_i f(x_i))];
// without gamma this is the plain exponential risk.
double empirical_risk(const Ensemble& f, const Dataset& ds);
double empirical_risk(const Ensemble& f, const Dataset& ds, const ConfidenceVector& gamma);

enum class SecondPropositionReading { symmetric, literal };

struct PropositionViolation {
    int proposition = 0;
    std::size_t iteration = 0; // 1-based
    std::optional<std::size_t> instance;
    std::string detail;
};

struct PropositionReport {
    std::size_t iterations_checked = 0;
    std::size_t first_checks = 0;
    std::size_t second_checks = 0;
    std::size_t third_strict_checks = 0;
    std::size_t third_equality_checks = 0;
    std::vector<PropositionViolation> violations;

    bool ok() const noexcept { return violations.empty(); }
    std::size_t count(int proposition) const;
};

struct PropositionOptions {
    SecondPropositionReading reading = SecondPropositionReading::symmetric;
    double weight_tolerance = 1e-12; // relative to w1 + w2, absorbs rounding in exp()
    double beta_tolerance = 1e-9;
};

// Replays a trace and checks, per round:
//  1. misclassified instances (h != y') gain weight |w1 - w2|;
//  2. correctly classified instances with max(w1,w2) > e^beta min(w1,w2) lose weight;
//  3. beta < 0.5 ln((1 - e')/e') when c = sum_i min(w1, w2) > 0, with equality when c = 0.
PropositionReport check_propositions(const BoostTrace& trace, const PropositionOptions& options = {});

nlohmann::json config_to_json(const BoostConfig& cfg);
BoostConfig config_from_json(const nlohmann::json& j);

// Versioned model record; thresholds and betas are 17-significant-digit strings.
nlohmann::json ensemble_to_json(const Ensemble& e, const BoostConfig& cfg, std::string_view algorithm);
Ensemble ensemble_from_json(const nlohmann::json& j);

} // namespace cbboost
