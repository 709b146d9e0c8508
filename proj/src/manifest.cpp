#include "rpe/manifest.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include "rpe/errors.hpp"

namespace rpe {

using nlohmann::json;

json RunManifest::to_json() const {
    return json{
        {"command", command},
        {"config", config.to_json()},
        {"methods", methods},
        {"prompt_set", prompt_set},
        {"inputs", inputs},
        {"template_digest", template_digest},
        {"started_at", started_at},
        {"finished_at", finished_at},
        {"artifacts", artifacts},
    };
}

RunManifest RunManifest::from_json(const json& doc) {
    RunManifest manifest;
    manifest.command = doc.at("command").get<std::string>();
    manifest.config = RunConfig::from_json(doc.at("config"));
    manifest.methods = doc.value("methods", std::vector<std::string>{});
    manifest.prompt_set = doc.value("prompt_set", "");
    manifest.inputs = doc.value("inputs", json::object());
    manifest.template_digest = doc.value("template_digest", "");
    manifest.started_at = doc.value("started_at", "");
    manifest.finished_at = doc.value("finished_at", "");
    manifest.artifacts = doc.value("artifacts", std::map<std::string, std::string>{});
    return manifest;
}

void RunManifest::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write manifest " + path.string());
    out << to_json().dump(2) << "\n";
}

RunManifest RunManifest::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open manifest " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("bad manifest " + path.string() + ": " + e.what());
    }
    return from_json(doc);
}

std::string iso8601_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace rpe
