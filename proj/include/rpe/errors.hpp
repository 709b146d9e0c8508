#pragma once

#include <stdexcept>
#include <string>

namespace rpe {

/// Base class for every error raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A caller violated a documented precondition (empty input, bad range, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Vectors of different lengths were combined.
class DimensionMismatchError : public Error {
public:
    using Error::Error;
};

/// An input is degenerate for the requested operation (e.g. zero-norm vector).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

/// Two embeddings from different models were compared.
class EmbeddingModelMismatchError : public Error {
public:
    using Error::Error;
};

/// Bad configuration: duplicate mock scripts, unknown backend kind, ...
class ConfigError : public Error {
public:
    using Error::Error;
};

/// The backend could not be reached after the configured retries.
class BackendUnavailableError : public Error {
public:
    using Error::Error;
};

/// Transient transport failure; retried internally, never escapes the gateway.
class RetryableBackendError : public Error {
public:
    using Error::Error;
};

/// The remote endpoint rejected the request (non-retryable status).
class RemoteError : public Error {
public:
    RemoteError(int status, const std::string& payload)
        : Error("remote error, status " + std::to_string(status) + ": " + payload),
          status_(status),
          payload_(payload) {}

    int status() const { return status_; }
    const std::string& payload() const { return payload_; }

private:
    int status_;
    std::string payload_;
};

/// A strict mock backend received a prompt no script matches.
class UnscriptedPromptError : public Error {
public:
    using Error::Error;
};

/// A structured text file could not be parsed; message names the line.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Parsed input violates a semantic constraint (duplicate ids, empty text).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Template file or rendering problem (unknown section, unresolved placeholder).
class TemplateError : public Error {
public:
    using Error::Error;
};

}  // namespace rpe
