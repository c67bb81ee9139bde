#include "cbboost/boost.hpp"
#include "cbboost/error.hpp"

namespace cbboost {

namespace {

constexpr int model_format_version = 1;

} // namespace

nlohmann::json config_to_json(const BoostConfig& cfg)
{
    return {
        {"max_iterations", cfg.max_iterations},
        {"mode", learner_mode_name(cfg.mode)},
        {"seed", cfg.seed},
        {"stop", cfg.stop.to_string()},
        {"epsilon_clamp", format_double(cfg.epsilon_clamp)},
    };
}

BoostConfig config_from_json(const nlohmann::json& j)
{
    BoostConfig cfg;
    try {
        if (j.contains("max_iterations"))
            cfg.max_iterations = j.at("max_iterations").get<std::size_t>();
        if (j.contains("mode"))
            cfg.mode = parse_learner_mode(j.at("mode").get<std::string>());
        if (j.contains("seed"))
            cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("stop"))
            cfg.stop = StopRule::parse(j.at("stop").get<std::string>());
        if (j.contains("epsilon_clamp")) {
            const auto& e = j.at("epsilon_clamp");
            cfg.epsilon_clamp = e.is_string() ? parse_double(e.get<std::string>()) : e.get<double>();
        }
    } catch (const nlohmann::json::exception& ex) {
        throw Error("config", std::string("malformed boosting config: ") + ex.what());
    }
    cfg.validate();
    return cfg;
}

nlohmann::json ensemble_to_json(const Ensemble& e, const BoostConfig& cfg, std::string_view algorithm)
{
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : e.terms)
        terms.push_back({
            {"feature", t.stump.feature},
            {"threshold", format_double(t.stump.threshold)},
            {"polarity", t.stump.polarity},
            {"beta", format_double(t.beta)},
        });
    return {
        {"format", "cbboost-ensemble"},
        {"version", model_format_version},
        {"algorithm", algorithm},
        {"config", config_to_json(cfg)},
        {"stopped_at", e.stopped_at()},
        {"terms", std::move(terms)},
    };
}

Ensemble ensemble_from_json(const nlohmann::json& j)
{
    try {
        if (j.at("format").get<std::string>() != "cbboost-ensemble")
            throw Error("model", "not a cbboost ensemble record");
        if (j.at("version").get<int>() != model_format_version)
            throw Error("model", "unsupported model version " + std::to_string(j.at("version").get<int>()));
        Ensemble e;
        for (const auto& t : j.at("terms")) {
            Term term;
            term.stump.feature = t.at("feature").get<std::size_t>();
            term.stump.threshold = parse_double(t.at("threshold").get<std::string>());
            term.stump.polarity = t.at("polarity").get<int>();
            term.beta = parse_double(t.at("beta").get<std::string>());
            if (term.stump.polarity != 1 && term.stump.polarity != -1)
                throw Error("model", "polarity must be -1 or +1");
            if (!(term.beta > 0.0))
                throw Error("model", "term coefficients must be positive");
            e.terms.push_back(term);
        }
        if (j.at("stopped_at").get<std::size_t>() != e.terms.size())
            throw Error("model", "stopped_at disagrees with the number of terms");
        return e;
    } catch (const nlohmann::json::exception& ex) {
        throw Error("model", std::string("malformed model record: ") + ex.what());
    }
}

} // namespace cbboost
