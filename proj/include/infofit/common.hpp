#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace infofit {

inline constexpr const char* kVersion = "0.1.0";

// Seed-derivation and sampling scheme identifier, recorded in dataset
// manifests. Bump the suffix whenever derive_seed, uniform01 or
// exp_sample change their output for a given seed.
inline constexpr const char* kRngScheme = "splitmix64+mt19937_64/v1";

struct TooFewSamples : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct LengthMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct NonPositiveSigma : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct SingularTime : std::domain_error {
    using std::domain_error::domain_error;
};
struct NonFiniteState : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegeneratePool : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Independent stream seeds from one master seed. Changing `stream` gives an
// unrelated seed; changing `master` changes every stream.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t s = master ^ (0x9e3779b97f4a7c15ull * (stream + 1));
    return splitmix64(s);
}

// Uniform double in [0, 1) built from the top 53 bits of the raw engine
// output. std::uniform_real_distribution is implementation-defined; this is
// portable across standard libraries.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Exponential with the given rate via inversion.
inline double exp_sample(std::mt19937_64& rng, double rate) {
    double u = uniform01(rng);
    return -std::log1p(-u) / rate;
}

inline std::uint64_t fnv1a64(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::uint64_t fnv1a64(const std::string& s) {
    return fnv1a64(s.data(), s.size());
}

}  // namespace infofit
