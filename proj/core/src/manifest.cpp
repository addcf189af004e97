#include <algorithm>
#include <cstdio>
#include <fstream>

#include "agb/error.hpp"
#include "agb/manifest.hpp"
#include "agb/rng.hpp"

namespace agb {

namespace {

std::string hex64(std::uint64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace

std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot hash missing file: " + path.string());
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[65536];
    while (in) {
        in.read(buf, sizeof(buf));
        const auto got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

void Manifest::set_config(const nlohmann::json& config, std::uint64_t seed) {
    config_hash_ = hex64(fnv1a64(config.dump()));
    seed_ = seed;
}

void Manifest::set_failed_stage(const std::string& stage) { failed_stage_ = stage; }

void Manifest::add(const std::filesystem::path& file) {
    const auto rel = std::filesystem::relative(file, root_);
    outputs_.push_back({{"path", rel.generic_string()},
                        {"bytes", std::filesystem::file_size(file)},
                        {"fnv1a64", hex64(fnv1a64_file(file))}});
}

void Manifest::write(const std::filesystem::path& path) const {
    auto sorted = outputs_;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        return a.at("path").template get<std::string>() <
               b.at("path").template get<std::string>();
    });
    nlohmann::json j = {{"tool", "agbmap"},
                        {"version", "0.1.0"},
                        {"config_hash", config_hash_},
                        {"seed", seed_},
                        {"complete", failed_stage_.empty()},
                        {"outputs", sorted}};
    if (!failed_stage_.empty()) j["failed_stage"] = failed_stage_;
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << j.dump(2) << '\n';
}

}  // namespace agb
