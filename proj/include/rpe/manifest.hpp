#pragma once

#include <filesystem>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "rpe/config.hpp"

namespace rpe {

/// Snapshot written next to every command's outputs. Re-running the same
/// command from the manifest reproduces the outputs byte-for-byte offline
/// (timestamps aside).
struct RunManifest {
    std::string command;  // "invert" | "benchmark" | "usecase"
    RunConfig config;
    std::vector<std::string> methods;
    std::string prompt_set;         // input path, benchmark only
    nlohmann::json inputs = nlohmann::json::object();  // command-specific inputs
    std::string template_digest;
    std::string started_at;         // ISO-8601 UTC
    std::string finished_at;
    std::map<std::string, std::string> artifacts;  // name -> relative path

    nlohmann::json to_json() const;
    static RunManifest from_json(const nlohmann::json& doc);

    void save(const std::filesystem::path& path) const;
    static RunManifest load(const std::filesystem::path& path);
};

/// Current wall-clock time as ISO-8601 UTC.
std::string iso8601_now();

}  // namespace rpe
