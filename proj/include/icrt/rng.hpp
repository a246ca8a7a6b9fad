#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace icrt {

// Stateless 64-bit finalizer (splitmix64 output function).
std::uint64_t mix64(std::uint64_t x);

// Combine a key with a value; order sensitive.
inline std::uint64_t hash_combine(std::uint64_t key, std::uint64_t value) {
    return mix64(key ^ (value + 0x9e3779b97f4a7c15ULL + (key << 6) + (key >> 2)));
}

std::uint64_t hash_name(std::string_view name);

// Map 64 random bits to (0,1]; 53-bit resolution.
inline double bits_to_open_unit(std::uint64_t bits) {
    return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

// Standard normal from a key, deterministic (Box-Muller on two hashed uniforms).
double hashed_normal(std::uint64_t key);

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Named independent substream of a master seed.
    static Rng substream(std::uint64_t master, std::string_view name);
    static Rng substream(std::uint64_t master, std::string_view name, std::uint64_t index);

    // Uniform on (0,1].
    double uniform() { return bits_to_open_unit(engine_()); }
    // Uniform on [0,1).
    double uniform01() { return 1.0 - uniform(); }
    double uniform(double a, double b) { return a + (b - a) * uniform01(); }
    double exponential(double rate);
    double normal();
    // Uniform index in [0, n).
    std::uint64_t index(std::uint64_t n);
    std::uint64_t bits() { return engine_(); }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace icrt
