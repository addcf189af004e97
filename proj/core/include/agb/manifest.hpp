#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace agb {

std::uint64_t fnv1a64_file(const std::filesystem::path& path);

/// Run manifest: every output file with a content hash, plus the config
/// hash and seeds. Contains nothing time-dependent, so reruns of the same
/// configuration produce byte-identical manifests.
class Manifest {
public:
    explicit Manifest(std::filesystem::path root) : root_(std::move(root)) {}

    void set_config(const nlohmann::json& config, std::uint64_t seed);
    void set_failed_stage(const std::string& stage);

    /// Record a file below the manifest root (hashed immediately).
    void add(const std::filesystem::path& file);

    void write(const std::filesystem::path& path) const;

private:
    std::filesystem::path root_;
    std::string config_hash_;
    std::uint64_t seed_ = 0;
    std::string failed_stage_;
    std::vector<nlohmann::json> outputs_;
};

}  // namespace agb
