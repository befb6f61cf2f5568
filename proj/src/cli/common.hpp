#ifndef FLAGDECOMP_CLI_COMMON_HPP
#define FLAGDECOMP_CLI_COMMON_HPP

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "flagdecomp/flagspace.hpp"
#include "json.hpp"

namespace flagdecomp::cli {

using nlohmann::json;
namespace fs = std::filesystem;

/// Options every subcommand accepts.
struct CommonOptions {
    fs::path out = ".";
    std::optional<std::uint64_t> seed;
    int threads = 1;
};

/// Collects what a run did and writes manifest.json next to its outputs.
class RunRecord {
public:
    RunRecord(std::string command, const CommonOptions& common);

    json& config() { return config_; }
    void set_seed(std::uint64_t seed) { seed_ = seed; }
    /// Records the SHA-256 of an input file.
    void add_input(const fs::path& path);
    const fs::path& out_dir() const { return out_; }
    fs::path output(const std::string& name) const { return out_ / name; }

    void write_manifest() const;

private:
    std::string command_;
    fs::path out_;
    json config_ = json::object();
    std::optional<std::uint64_t> seed_;
    std::vector<std::pair<std::string, std::string>> inputs_;
    std::string started_at_;
    std::chrono::steady_clock::time_point start_;
};

std::string sha256_file(const fs::path& path);

/// Reads a JSON document; syntax errors become ParseErrors.
json load_json(const fs::path& path);

/// Resolves a path found inside a JSON file relative to that file's directory.
fs::path resolve_relative(const fs::path& base_file, const std::string& entry);

/// Rejects keys outside `allowed` so typos in configs fail loudly.
void require_keys(const json& obj, const std::vector<std::string>& allowed,
                  const std::string& where);

/// Typed field access with ParseErrors naming the offending key.
template <typename T>
T get_field(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) {
        throw ParseError(where + ": missing field '" + key + "'");
    }
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ParseError(where + ": field '" + key + "' has the wrong type");
    }
}

template <typename T>
T get_field(const json& obj, const std::string& key, const std::string& where, T fallback) {
    return obj.contains(key) ? get_field<T>(obj, key, where) : fallback;
}

/// "2,4" or [2, 4].
std::vector<Index> signature_field(const json& value, const std::string& where);

/// Flag type whose ambient dimension comes from the data. Syntax errors are input errors,
/// a type that does not fit the data is a domain error.
FlagType flag_type_for(const std::string& text, Index ambient);

}  // namespace flagdecomp::cli

#endif
