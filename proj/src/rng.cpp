#include "icrt/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace icrt {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t hash_name(std::string_view name) {
    // FNV-1a, then finalized.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : name) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return mix64(h);
}

double hashed_normal(std::uint64_t key) {
    const double u1 = bits_to_open_unit(mix64(key ^ 0x243f6a8885a308d3ULL));
    const double u2 = bits_to_open_unit(mix64(key ^ 0x13198a2e03707344ULL));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Rng Rng::substream(std::uint64_t master, std::string_view name) {
    return Rng(hash_combine(mix64(master), hash_name(name)));
}

Rng Rng::substream(std::uint64_t master, std::string_view name, std::uint64_t index) {
    return Rng(hash_combine(hash_combine(mix64(master), hash_name(name)), index));
}

double Rng::exponential(double rate) { return -std::log(uniform()) / rate; }

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
}

std::uint64_t Rng::index(std::uint64_t n) {
    // Modulo with rejection of the biased top range.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t r;
    do {
        r = engine_();
    } while (r >= limit);
    return r % n;
}

}  // namespace icrt
