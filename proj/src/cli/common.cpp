#include "common.hpp"

#include <openssl/evp.h>

#include <array>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "flagdecomp/cli.hpp"
#include "flagdecomp/io.hpp"

namespace flagdecomp::cli {

namespace {

std::string utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

}  // namespace

RunRecord::RunRecord(std::string command, const CommonOptions& common)
    : command_(std::move(command)),
      out_(common.out),
      seed_(common.seed),
      started_at_(utc_now()),
      start_(std::chrono::steady_clock::now()) {
    std::error_code ec;
    fs::create_directories(out_, ec);
    if (ec) {
        throw InvalidArgument("cannot create output directory " + out_.string() + ": " +
                              ec.message());
    }
}

void RunRecord::add_input(const fs::path& path) {
    inputs_.emplace_back(path.string(), sha256_file(path));
}

void RunRecord::write_manifest() const {
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    json inputs = json::array();
    for (const auto& [path, digest] : inputs_) {
        inputs.push_back({{"path", path}, {"sha256", digest}});
    }
    const json manifest{{"command", command_},
                        {"config", config_},
                        {"seed", seed_ ? json(*seed_) : json(nullptr)},
                        {"version", kVersion},
                        {"inputs", inputs},
                        {"started_at", started_at_},
                        {"duration_seconds", seconds}};
    io::write_text(output("manifest.json"), manifest.dump(2) + "\n");
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InvalidArgument("cannot open " + path.string());
    }
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw Error("sha256: digest initialisation failed");
    }
    std::array<char, 1 << 16> buffer{};
    while (in) {
        in.read(buffer.data(), buffer.size());
        if (in.gcount() > 0) EVP_DigestUpdate(ctx, buffer.data(), static_cast<std::size_t>(in.gcount()));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int length = 0;
    EVP_DigestFinal_ex(ctx, digest.data(), &length);
    EVP_MD_CTX_free(ctx);
    std::ostringstream os;
    for (unsigned int i = 0; i < length; ++i) {
        os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    }
    return os.str();
}

json load_json(const fs::path& path) {
    const std::string text = io::read_text(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

fs::path resolve_relative(const fs::path& base_file, const std::string& entry) {
    const fs::path p(entry);
    return p.is_absolute() ? p : base_file.parent_path() / p;
}

void require_keys(const json& obj, const std::vector<std::string>& allowed,
                  const std::string& where) {
    if (!obj.is_object()) {
        throw ParseError(where + ": expected a JSON object");
    }
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const auto& key : allowed) known = known || key == item.key();
        if (!known) {
            throw ParseError(where + ": unknown field '" + item.key() + "'");
        }
    }
}

std::vector<Index> signature_field(const json& value, const std::string& where) {
    if (value.is_string()) {
        return FlagType::parse(value.get<std::string>(), std::numeric_limits<Index>::max())
            .signature();
    }
    try {
        return value.get<std::vector<Index>>();
    } catch (const json::exception&) {
        throw ParseError(where + ": flag_type must be \"n1,n2,...\" or an integer array");
    }
}

FlagType flag_type_for(const std::string& text, Index ambient) {
    const FlagType loose = FlagType::parse(text, std::numeric_limits<Index>::max());
    if (loose.top() > ambient) {
        throw FlagTypeError("flag type " + text + " needs n_k = " + std::to_string(loose.top()) +
                            " but the data has only " + std::to_string(ambient) + " rows");
    }
    return FlagType(loose.signature(), ambient);
}

}  // namespace flagdecomp::cli
