#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace cbboost::cli {

std::string sha256_file(const std::filesystem::path& path);

// Provenance record written next to a command's outputs.
class RunManifest {
public:
    RunManifest(std::string command, std::vector<std::string> argv);

    nlohmann::json& config() { return config_; }
    nlohmann::json& seeds() { return seeds_; }
    void add_input(const std::filesystem::path& path);
    void add_output(const std::filesystem::path& path);
    void add_timing(const std::string& stage, double seconds);

    // Writes the manifest to `path` with digests taken now.
    void write(const std::filesystem::path& path) const;

private:
    std::string command_;
    std::vector<std::string> argv_;
    nlohmann::json config_ = nlohmann::json::object();
    nlohmann::json seeds_ = nlohmann::json::object();
    std::vector<std::filesystem::path> inputs_;
    std::vector<std::filesystem::path> outputs_;
    nlohmann::json timings_ = nlohmann::json::object();
    std::chrono::steady_clock::time_point start_;
    std::string started_at_;
};

// "<output>.manifest.json"
std::filesystem::path manifest_path_for(const std::filesystem::path& output);

} // namespace cbboost::cli
