#include "rpe/hashing.hpp"

#include <openssl/evp.h>

#include <stdexcept>

namespace rpe {

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double SplitMix::next_unit() {
    // 53 high-quality bits -> [0, 1)
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::uint64_t SplitMix::next_below(std::uint64_t bound) {
    // Rejection sampling keeps the draw exactly uniform.
    const auto span = static_cast<unsigned __int128>(1) << 64;
    const std::uint64_t cutoff = static_cast<std::uint64_t>(span / bound * bound - 1);
    std::uint64_t v = next();
    while (v > cutoff) v = next();
    return v % bound;
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 digest failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

}  // namespace rpe
