#include "manifest.hpp"

#include <array>
#include <ctime>
#include <fstream>
#include <memory>

#include <openssl/evp.h>

#include "cbboost/error.hpp"
#include "cbboost/version.hpp"

namespace cbboost::cli {

std::string sha256_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("io", "cannot read '" + path.string() + "'");
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
        throw Error("digest", "cannot initialise SHA-256");
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0)
            EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md, &len);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

RunManifest::RunManifest(std::string command, std::vector<std::string> argv)
    : command_(std::move(command)), argv_(std::move(argv)), start_(std::chrono::steady_clock::now())
{
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    started_at_ = buf;
}

void RunManifest::add_input(const std::filesystem::path& path)
{
    inputs_.push_back(path);
}

void RunManifest::add_output(const std::filesystem::path& path)
{
    outputs_.push_back(path);
}

void RunManifest::add_timing(const std::string& stage, double seconds)
{
    timings_[stage] = seconds;
}

void RunManifest::write(const std::filesystem::path& path) const
{
    nlohmann::json files_in = nlohmann::json::array();
    for (const auto& p : inputs_)
        files_in.push_back({{"path", p.string()}, {"sha256", sha256_file(p)}});
    nlohmann::json files_out = nlohmann::json::array();
    for (const auto& p : outputs_)
        files_out.push_back({{"path", p.string()}, {"sha256", sha256_file(p)}});
    nlohmann::json timings = timings_;
    timings["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();

    const nlohmann::json j{
        {"format", "cbboost-manifest"},
        {"version", 1},
        {"tool_version", cbboost::version},
        {"command", command_},
        {"argv", argv_},
        {"started_at", started_at_},
        {"config", config_},
        {"seeds", seeds_},
        {"inputs", files_in},
        {"outputs", files_out},
        {"timings", timings},
    };
    std::ofstream out(path);
    if (!out)
        throw Error("io", "cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
}

std::filesystem::path manifest_path_for(const std::filesystem::path& output)
{
    return output.string() + ".manifest.json";
}

} // namespace cbboost::cli
