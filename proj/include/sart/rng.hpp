#pragma once

#include <cstdint>

namespace sart {

// Counter-based generator: every deviate is a pure function of its key, so
// fields can be filled in any order or in parallel with identical results.
std::uint64_t mix64(std::uint64_t x);
double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t i, std::uint64_t j, std::uint64_t k);
double standard_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t i, std::uint64_t j, std::uint64_t k);

}  // namespace sart
