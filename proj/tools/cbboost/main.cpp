// cbboost: synth -> noise -> confidence -> train / eval, and bench for full grids.

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "cbboost/boost.hpp"
#include "cbboost/confidence.hpp"
#include "cbboost/dataset.hpp"
#include "cbboost/error.hpp"
#include "cbboost/harness.hpp"
#include "cbboost/random.hpp"
#include "cbboost/synth.hpp"
#include "cbboost/version.hpp"
#include "manifest.hpp"

namespace fs = std::filesystem;
using namespace cbboost;
using cli::RunManifest;

namespace {

using Clock = std::chrono::steady_clock;

// Shortest decimal that parses back to the same double.
std::string exact_decimal(double v)
{
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

double seconds_since(Clock::time_point t)
{
    return std::chrono::duration<double>(Clock::now() - t).count();
}

nlohmann::json read_json(const fs::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("io", "cannot read '" + path.string() + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& ex) {
        throw Error("json", path.string() + ": " + ex.what());
    }
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path);
    if (!out)
        throw Error("io", "cannot write '" + path.string() + "'");
    out << text;
}

struct CsvFlags {
    std::string label_column = "label";
    std::string positive_label = "1";

    void add(CLI::App* app)
    {
        app->add_option("--label-column", label_column, "Name of the label column")->capture_default_str();
        app->add_option("--positive-label", positive_label, "Label value mapped to +1")->capture_default_str();
    }
    CsvOptions options() const { return {label_column, positive_label}; }
    nlohmann::json json() const { return {{"label_column", label_column}, {"positive_label", positive_label}}; }
};

std::vector<std::string> g_argv;

// ---- synth ------------------------------------------------------------------

struct SynthArgs {
    std::string scenario;
    std::size_t n = 0;
    std::uint64_t seed = 1;
    fs::path out;
};

void cmd_synth(const SynthArgs& a)
{
    const auto t0 = Clock::now();
    const Dataset ds = generate(parse_scenario(a.scenario), a.n, a.seed);
    write_csv(ds, a.out);
    RunManifest m("synth", g_argv);
    m.config() = {{"scenario", a.scenario}, {"n", a.n}};
    m.seeds() = {{"seed", a.seed}};
    m.add_output(a.out);
    m.add_timing("generate", seconds_since(t0));
    m.write(cli::manifest_path_for(a.out));
    spdlog::info("wrote {} points to {}", ds.size(), a.out.string());
}

// ---- noise ------------------------------------------------------------------

struct NoiseArgs {
    fs::path in, out, mask_out;
    double noise_level = 0.0;
    std::uint64_t seed = 1;
    CsvFlags csv;
};

void cmd_noise(const NoiseArgs& a)
{
    const auto t0 = Clock::now();
    const Dataset ds = load_csv(a.in, a.csv.options());
    const NoisyDataset noisy = inject_label_noise(ds, a.noise_level, a.seed);
    write_csv(noisy.data, a.out);
    RunManifest m("noise", g_argv);
    m.config() = {{"noise_level", a.noise_level}, {"csv", a.csv.json()}};
    m.seeds() = {{"seed", a.seed}};
    m.add_input(a.in);
    m.add_output(a.out);
    if (!a.mask_out.empty()) {
        std::ofstream mask(a.mask_out);
        if (!mask)
            throw Error("io", "cannot write '" + a.mask_out.string() + "'");
        mask << "flipped\n";
        for (bool f : noisy.mask.flipped)
            mask << (f ? 1 : 0) << '\n';
        mask.close();
        m.add_output(a.mask_out);
    }
    m.add_timing("noise", seconds_since(t0));
    m.write(cli::manifest_path_for(a.out));
    spdlog::info("flipped {} of {} labels", noisy.mask.count(), ds.size());
}

// ---- confidence ---------------------------------------------------------------

struct ConfidenceFlags {
    std::string method = "knn";
    std::size_t k = 5;
    std::optional<std::size_t> filter_k;
    std::vector<double> thresholds = default_filter_thresholds;
    double noise_level = 0.0;
    std::string form = "consistent";
    bool no_standardize = false;

    void add(CLI::App* app, const std::string& method_flag)
    {
        app->add_option(method_flag, method, "knn | bayes")->capture_default_str();
        app->add_option("--k", k, "Neighbours for the KNN confidence")->capture_default_str();
        app->add_option("--filter-k", filter_k, "Neighbours for the noise filter (default: --k)");
        app->add_option("--filter-thresholds", thresholds, "Agreement thresholds, one per filter round")
            ->delimiter(',')
            ->capture_default_str();
        app->add_option("--noise-level", noise_level, "Known noise level for the Bayes method")->capture_default_str();
        app->add_option("--bayes-form", form, "consistent | literal")->capture_default_str();
        app->add_flag("--no-standardize", no_standardize, "Use raw features for distances");
    }

    ConfidenceSettings settings() const
    {
        ConfidenceSettings s;
        s.method = parse_confidence_method(method);
        s.k = k;
        s.filter_k = filter_k.value_or(k);
        s.thresholds = thresholds;
        s.noise_level = noise_level;
        s.form = parse_bayes_form(form);
        s.standardize = !no_standardize;
        return s;
    }

    nlohmann::json json() const
    {
        const ConfidenceSettings s = settings();
        return {{"method", method}, {"k", s.k}, {"filter_k", s.filter_k}, {"thresholds", s.thresholds},
            {"noise_level", s.noise_level}, {"form", form}, {"standardize", s.standardize}};
    }
};

struct ConfidenceArgs {
    fs::path in, out;
    ConfidenceFlags conf;
    CsvFlags csv;
};

void cmd_confidence(const ConfidenceArgs& a)
{
    const auto t0 = Clock::now();
    const Dataset ds = load_csv(a.in, a.csv.options());
    const ConfidenceEstimate est = estimate_confidence(ds, a.conf.settings());
    if (est.filter.aborted)
        spdlog::warn("noise filter stopped early: {}", est.filter.abort_reason);
    if (est.regularized)
        spdlog::warn("a class covariance was singular; added 1e-6 I");
    for (const auto& r : est.filter.rounds)
        spdlog::info("filter round at {}: removed {}", r.threshold, r.removed.size());
    write_gamma_csv(est.gamma, a.out);

    RunManifest m("confidence", g_argv);
    m.config() = {{"confidence", a.conf.json()}, {"csv", a.csv.json()}, {"kept", est.filter.kept.size()},
        {"regularized", est.regularized}};
    m.add_input(a.in);
    m.add_output(a.out);
    m.add_timing("confidence", seconds_since(t0));
    m.write(cli::manifest_path_for(a.out));
}

// ---- train ------------------------------------------------------------------

struct TrainArgs {
    fs::path in, out, gamma, config;
    std::string algo;
    CLI::Option* mode_opt = nullptr;
    CLI::Option* iterations_opt = nullptr;
    CLI::Option* stop_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* clamp_opt = nullptr;
    std::string mode = "weighted";
    std::size_t iterations = 200;
    std::string stop = "fixed";
    std::uint64_t seed = 0;
    double epsilon_clamp = 1e-12;
    double threshold = 0.5;
    ConfidenceFlags conf;
    CsvFlags csv;
};

void cmd_train(const TrainArgs& a)
{
    const auto t0 = Clock::now();
    BoostConfig cfg;
    if (!a.config.empty())
        cfg = config_from_json(read_json(a.config));
    if (a.mode_opt->count())
        cfg.mode = parse_learner_mode(a.mode);
    if (a.iterations_opt->count())
        cfg.max_iterations = a.iterations;
    if (a.stop_opt->count())
        cfg.stop = StopRule::parse(a.stop);
    if (a.seed_opt->count())
        cfg.seed = a.seed;
    if (a.clamp_opt->count())
        cfg.epsilon_clamp = a.epsilon_clamp;
    cfg.record_trace = false;
    cfg.validate();

    const Dataset ds = load_csv(a.in, a.csv.options());
    RunManifest m("train", g_argv);
    m.add_input(a.in);
    if (!a.config.empty())
        m.add_input(a.config);

    const Method method = [&] {
        if (a.algo == "disc" || a.algo == "corr")
            return Method{a.algo == "disc" ? Method::Kind::disc : Method::Kind::corr, a.threshold};
        return Method::parse(a.algo);
    }();
    nlohmann::json conf_json = nullptr;
    std::optional<ConfidenceVector> gamma;
    if (method.needs_confidence()) {
        if (!a.gamma.empty()) {
            gamma = read_gamma_csv(a.gamma);
            m.add_input(a.gamma);
        } else {
            spdlog::info("no --gamma given; estimating confidence");
            gamma = estimate_confidence(ds, a.conf.settings()).gamma;
            conf_json = a.conf.json();
        }
        if (gamma->size() != ds.size())
            throw Error("train", "gamma has " + std::to_string(gamma->size()) + " rows, data has "
                    + std::to_string(ds.size()));
    }
    const auto t1 = Clock::now();

    Ensemble e;
    switch (method.kind) {
    case Method::Kind::stump:
        e = train_single_stump(ds);
        break;
    case Method::Kind::adaboost:
        e = train_adaboost(ds, cfg).ensemble;
        break;
    case Method::Kind::cb:
        e = train_cb_adaboost(ds, *gamma, cfg).ensemble;
        break;
    case Method::Kind::disc:
        e = run_disc(ds, *gamma, method.threshold, cfg);
        break;
    case Method::Kind::corr:
        e = run_corr(ds, *gamma, method.threshold, cfg);
        break;
    }
    write_text(a.out, ensemble_to_json(e, cfg, method.name()).dump(2) + "\n");

    m.config() = {{"algo", method.name()}, {"boost", config_to_json(cfg)}, {"confidence", conf_json},
        {"csv", a.csv.json()}, {"terms", e.stopped_at()}};
    m.seeds() = {{"seed", cfg.seed}};
    m.add_output(a.out);
    m.add_timing("load", seconds_since(t0) - seconds_since(t1));
    m.add_timing("train", seconds_since(t1));
    m.write(cli::manifest_path_for(a.out));
    spdlog::info("{}: {} terms", method.name(), e.stopped_at());
}

// ---- eval -------------------------------------------------------------------

struct EvalArgs {
    fs::path model, in, out;
    CsvFlags csv;
};

void cmd_eval(const EvalArgs& a)
{
    const auto t0 = Clock::now();
    const Ensemble e = ensemble_from_json(read_json(a.model));
    const Dataset ds = load_csv(a.in, a.csv.options());
    const double err = test_error(e, ds);
    std::cout << exact_decimal(err) << '\n';
    if (!a.out.empty()) {
        write_text(a.out, nlohmann::json{{"test_error", err}, {"n", ds.size()}, {"terms", e.stopped_at()}}.dump(2) + "\n");
        RunManifest m("eval", g_argv);
        m.config() = {{"csv", a.csv.json()}};
        m.add_input(a.model);
        m.add_input(a.in);
        m.add_output(a.out);
        m.add_timing("eval", seconds_since(t0));
        m.write(cli::manifest_path_for(a.out));
    }
}

// ---- bench ------------------------------------------------------------------

struct BenchArgs {
    fs::path config, out_dir = ".";
    CLI::Option* jobs_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* reps_opt = nullptr;
    CLI::Option* mode_opt = nullptr;
    CLI::Option* iterations_opt = nullptr;
    std::size_t jobs = 1;
    std::uint64_t seed = 1;
    std::size_t repetitions = 30;
    std::string mode = "weighted";
    std::size_t iterations = 200;
};

void cmd_bench(const BenchArgs& a)
{
    const auto t0 = Clock::now();
    nlohmann::json raw = read_json(a.config);
    if (raw.contains("csv") && raw["csv"].is_string()) {
        // relative CSV paths are taken relative to the config file
        const fs::path p = raw["csv"].get<std::string>();
        if (p.is_relative())
            raw["csv"] = (a.config.parent_path() / p).string();
    }
    ExperimentConfig cfg = experiment_config_from_json(raw);
    if (a.jobs_opt->count())
        cfg.jobs = a.jobs;
    if (a.seed_opt->count())
        cfg.base_seed = a.seed;
    if (a.reps_opt->count())
        cfg.repetitions = a.repetitions;
    if (a.mode_opt->count())
        cfg.boost.mode = parse_learner_mode(a.mode);
    if (a.iterations_opt->count())
        cfg.boost.max_iterations = a.iterations;
    cfg.boost.record_trace = cfg.weight_traces;
    cfg.validate();

    fs::create_directories(a.out_dir);
    const ResultsTable table = run_experiment(cfg);
    const double run_seconds = seconds_since(t0);

    const fs::path json_out = a.out_dir / "results.json";
    const fs::path csv_out = a.out_dir / "results.csv";
    nlohmann::json results = results_to_json(table);
    results["manifest"] = "manifest.json";
    write_text(json_out, results.dump(2) + "\n");
    {
        std::ofstream out(csv_out);
        if (!out)
            throw Error("io", "cannot write '" + csv_out.string() + "'");
        write_results_csv(table, out);
    }
    RunManifest m("bench", g_argv);
    m.config() = experiment_config_to_json(cfg);
    nlohmann::json reps = nlohmann::json::array();
    for (std::size_t r = 0; r < cfg.repetitions; ++r) {
        nlohmann::json s{{"repetition", r}};
        if (cfg.source.scenario) {
            s["train-data"] = derive_seed(cfg.base_seed, r, "train-data");
            s["test-data"] = derive_seed(cfg.base_seed, r, "test-data");
        } else {
            s["split"] = derive_seed(cfg.base_seed, r, "split");
        }
        for (double e : cfg.noise_levels)
            s["noise:" + format_double(e)] = derive_seed(cfg.base_seed, r, "noise:" + format_double(e));
        reps.push_back(std::move(s));
    }
    m.seeds() = {{"base_seed", cfg.base_seed}, {"derivation", "derive_seed(base_seed, repetition, stage tag)"},
        {"repetitions", std::move(reps)}};
    if (!cfg.source.scenario)
        m.add_input(cfg.source.csv);
    m.add_input(a.config);
    m.add_output(json_out);
    m.add_output(csv_out);
    if (cfg.weight_traces) {
        const fs::path traces_out = a.out_dir / "traces.csv";
        std::ofstream out(traces_out);
        if (!out)
            throw Error("io", "cannot write '" + traces_out.string() + "'");
        write_traces_csv(table, out);
        out.close();
        m.add_output(traces_out);
    }
    m.add_timing("experiment", run_seconds);
    m.write(a.out_dir / "manifest.json");

    for (const auto& c : table.cells)
        std::cout << c.method.name() << " noise=" << c.noise_level << " mean=" << c.mean << " std=" << c.stddev
                  << " completed=" << c.completed << "/" << c.errors.size() << '\n';
}

void setup_logging()
{
    auto logger = spdlog::stderr_color_mt("cbboost");
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("CBBOOST_LOG")) {
        const auto level = spdlog::level::from_str(env);
        // from_str maps unknown names to off; only honour real names
        if (level != spdlog::level::off || std::string(env) == "off")
            spdlog::set_level(level);
    }
}

} // namespace

int main(int argc, char** argv)
{
    g_argv.assign(argv, argv + argc);
    setup_logging();

    CLI::App app{"Confidence-based AdaBoost for label-noise data", "cbboost"};
    app.set_version_flag("--version", cbboost::version);
    app.require_subcommand(1);

    SynthArgs synth;
    auto* s = app.add_subcommand("synth", "Generate a synthetic scenario as CSV");
    s->add_option("--scenario", synth.scenario, "normal | sine")->required();
    s->add_option("--n", synth.n, "Number of points")->required();
    s->add_option("--seed", synth.seed, "Random seed")->capture_default_str();
    s->add_option("--out", synth.out, "Output CSV")->required();

    NoiseArgs noise;
    auto* n = app.add_subcommand("noise", "Flip a fraction of the labels");
    n->add_option("--in", noise.in, "Input CSV")->required()->check(CLI::ExistingFile);
    n->add_option("--out", noise.out, "Output CSV")->required();
    n->add_option("--noise-level", noise.noise_level, "Fraction of labels to flip, in [0, 0.5)")->required();
    n->add_option("--seed", noise.seed, "Random seed")->capture_default_str();
    n->add_option("--mask-out", noise.mask_out, "Optional CSV of flipped flags");
    noise.csv.add(n);

    ConfidenceArgs conf;
    auto* c = app.add_subcommand("confidence", "Estimate label confidence");
    c->add_option("--in", conf.in, "Input CSV")->required()->check(CLI::ExistingFile);
    c->add_option("--out", conf.out, "Output gamma CSV")->required();
    conf.conf.add(c, "--method");
    conf.csv.add(c);

    TrainArgs train;
    auto* t = app.add_subcommand("train", "Train a model");
    t->add_option("--in", train.in, "Training CSV")->required()->check(CLI::ExistingFile);
    t->add_option("--out", train.out, "Output model JSON")->required();
    t->add_option("--algo", train.algo, "stump | adaboost | cb | disc | corr")
        ->required()
        ->check(CLI::IsMember({"stump", "adaboost", "cb", "disc", "corr"}));
    t->add_option("--gamma", train.gamma, "Confidence CSV (cb, disc, corr)")->check(CLI::ExistingFile);
    t->add_option("--config", train.config, "Boost config JSON; flags override it")->check(CLI::ExistingFile);
    train.mode_opt = t->add_option("--mode", train.mode, "weighted | resample")->capture_default_str();
    train.iterations_opt = t->add_option("--iterations", train.iterations, "Maximum rounds M")->capture_default_str();
    train.stop_opt = t->add_option("--stop", train.stop, "fixed | consistency[:A]")->capture_default_str();
    train.seed_opt = t->add_option("--seed", train.seed, "Seed for resample mode")->capture_default_str();
    train.clamp_opt = t->add_option("--epsilon-clamp", train.epsilon_clamp, "Lower clamp for the weighted error");
    t->add_option("--threshold", train.threshold, "Confidence threshold for disc / corr")->capture_default_str();
    train.conf.add(t, "--confidence-method");
    train.csv.add(t);

    EvalArgs eval;
    auto* e = app.add_subcommand("eval", "Print the test error of a model");
    e->add_option("--model", eval.model, "Model JSON")->required()->check(CLI::ExistingFile);
    e->add_option("--in", eval.in, "Test CSV")->required()->check(CLI::ExistingFile);
    e->add_option("--out", eval.out, "Optional metrics JSON");
    eval.csv.add(e);

    BenchArgs bench;
    auto* b = app.add_subcommand("bench", "Run a repeated experiment grid");
    b->add_option("--config", bench.config, "Experiment config JSON")->required()->check(CLI::ExistingFile);
    b->add_option("--out-dir", bench.out_dir, "Directory for results and manifest")->capture_default_str();
    bench.jobs_opt = b->add_option("--jobs", bench.jobs, "Worker threads")->capture_default_str();
    bench.seed_opt = b->add_option("--seed", bench.seed, "Override base_seed");
    bench.reps_opt = b->add_option("--repetitions", bench.repetitions, "Override repetitions");
    bench.mode_opt = b->add_option("--mode", bench.mode, "Override learner mode");
    bench.iterations_opt = b->add_option("--iterations", bench.iterations, "Override M");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& ex) {
        return app.exit(ex);
    } catch (const CLI::CallForAllHelp& ex) {
        return app.exit(ex);
    } catch (const CLI::CallForVersion& ex) {
        return app.exit(ex);
    } catch (const CLI::ParseError& ex) {
        const auto subs = app.get_subcommands();
        std::cerr << (subs.empty() ? app.help() : subs.front()->help());
        std::string msg = ex.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        std::cerr << "error: usage: " << msg << '\n';
        return 2;
    }

    try {
        if (*s)
            cmd_synth(synth);
        else if (*n)
            cmd_noise(noise);
        else if (*c)
            cmd_confidence(conf);
        else if (*t)
            cmd_train(train);
        else if (*e)
            cmd_eval(eval);
        else if (*b)
            cmd_bench(bench);
    } catch (const std::exception& ex) {
        std::string msg = ex.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        // library errors already carry "code: message"
        if (!dynamic_cast<const Error*>(&ex))
            msg = "internal: " + msg;
        std::cerr << "error: " << msg << '\n';
        return 1;
    }
    return 0;
}
