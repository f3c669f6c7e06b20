#include "sart/rng.hpp"

#include <cmath>
#include <numbers>

namespace sart {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t i, std::uint64_t j, std::uint64_t k) {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ stream);
    h = mix64(h ^ i);
    h = mix64(h ^ j);
    h = mix64(h ^ k);
    // 53 random bits mapped into (0, 1).
    return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

double standard_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t i, std::uint64_t j, std::uint64_t k) {
    double u1 = uniform01(seed, stream, i, j, 2 * k);
    double u2 = uniform01(seed, stream, i, j, 2 * k + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace sart
