#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace rpe {

/// FNV-1a over bytes. Not cryptographic; used for deterministic bucketing
/// and seeding only.
std::uint64_t fnv1a64(std::string_view data);

/// One step of the splitmix64 sequence; mutates the state in place.
std::uint64_t splitmix64(std::uint64_t& state);

/// Deterministic counter-free PRNG stream over a 64-bit seed.
class SplitMix {
public:
    explicit SplitMix(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() { return splitmix64(state_); }

    /// Uniform double in [0, 1).
    double next_unit();

    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t next_below(std::uint64_t bound);

private:
    std::uint64_t state_;
};

/// Hex-encoded SHA-256 of the input bytes.
std::string sha256_hex(std::string_view data);

}  // namespace rpe
