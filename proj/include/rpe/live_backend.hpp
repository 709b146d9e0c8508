#pragma once

#include <memory>
#include <string>

#include "rpe/gateway.hpp"

namespace rpe {

/// HTTP client for a chat-completions style endpoint. One request per
/// sample; transport failures and 5xx responses surface as
/// RetryableBackendError so the gateway's retry policy applies, other
/// non-2xx statuses as RemoteError with the response payload.
class LiveBackend : public Backend {
public:
    struct Options {
        std::string base_url;  // e.g. "https://api.openai.com/v1"
        std::string api_key;
        int timeout_seconds = 120;
    };

    explicit LiveBackend(Options options);
    ~LiveBackend() override;

    std::string id() const override;
    std::string complete(const std::string& prompt, const GenerationParams& params,
                         int sample_index) override;
    EmbeddingVector embed(const std::string& text, const std::string& model_id) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace rpe
