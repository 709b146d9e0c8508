#include "rpe/live_backend.hpp"

#include <httplib.h>

#include <nlohmann/json.hpp>

#include "rpe/errors.hpp"

namespace rpe {

namespace {

using nlohmann::json;

// Splits "https://host:port/v1" into client target and path prefix.
struct ParsedUrl {
    std::string origin;  // scheme://host[:port]
    std::string prefix;  // path portion, no trailing slash
};

ParsedUrl parse_base_url(const std::string& base_url) {
    auto scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError("live backend: base_url needs a scheme: " + base_url);
    }
    auto path_start = base_url.find('/', scheme_end + 3);
    ParsedUrl parsed;
    if (path_start == std::string::npos) {
        parsed.origin = base_url;
    } else {
        parsed.origin = base_url.substr(0, path_start);
        parsed.prefix = base_url.substr(path_start);
    }
    while (!parsed.prefix.empty() && parsed.prefix.back() == '/') parsed.prefix.pop_back();
    return parsed;
}

}  // namespace

struct LiveBackend::Impl {
    Options options;
    ParsedUrl url;
    std::unique_ptr<httplib::Client> client;

    explicit Impl(Options opts) : options(std::move(opts)), url(parse_base_url(options.base_url)) {
        client = std::make_unique<httplib::Client>(url.origin);
        client->set_connection_timeout(options.timeout_seconds);
        client->set_read_timeout(options.timeout_seconds);
        client->set_write_timeout(options.timeout_seconds);
        if (!options.api_key.empty()) {
            client->set_default_headers({{"Authorization", "Bearer " + options.api_key}});
        }
    }

    json post(const std::string& path, const json& body) {
        auto res = client->Post(url.prefix + path, body.dump(), "application/json");
        if (!res) {
            throw RetryableBackendError("transport failure: " + httplib::to_string(res.error()));
        }
        if (res->status >= 500) {
            throw RetryableBackendError("server error " + std::to_string(res->status) + ": " +
                                        res->body);
        }
        if (res->status < 200 || res->status >= 300) {
            throw RemoteError(res->status, res->body);
        }
        try {
            return json::parse(res->body);
        } catch (const json::exception& e) {
            throw RemoteError(res->status, std::string("unparseable response body: ") + e.what());
        }
    }
};

LiveBackend::LiveBackend(Options options) : impl_(std::make_unique<Impl>(std::move(options))) {}

LiveBackend::~LiveBackend() = default;

std::string LiveBackend::id() const {
    return "live:" + impl_->options.base_url;
}

std::string LiveBackend::complete(const std::string& prompt, const GenerationParams& params,
                                  int /*sample_index*/) {
    // sample_index only disambiguates cache keys; each sample is its own call.
    json body = {
        {"model", params.model_id},
        {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
        {"temperature", params.temperature},
        {"max_tokens", params.max_tokens},
    };
    if (params.seed) body["seed"] = *params.seed;
    const json reply = impl_->post("/chat/completions", body);
    try {
        return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw RemoteError(200, std::string("unexpected completion shape: ") + e.what());
    }
}

EmbeddingVector LiveBackend::embed(const std::string& text, const std::string& model_id) {
    const json reply = impl_->post("/embeddings", json{{"model", model_id}, {"input", text}});
    EmbeddingVector vec;
    vec.model_id = model_id;
    try {
        vec.values = reply.at("data").at(0).at("embedding").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw RemoteError(200, std::string("unexpected embedding shape: ") + e.what());
    }
    if (vec.values.empty()) throw RemoteError(200, "empty embedding vector");
    return vec;
}

}  // namespace rpe
