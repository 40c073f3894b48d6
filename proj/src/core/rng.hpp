#pragma once

#include <cstdint>
#include <random>

namespace mcr {

/// Seeded uniform stream. The mapping from engine output to [0,1) is fixed
/// here rather than left to std::uniform_real_distribution so draws are
/// identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() {
        ++draws_;
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    std::uint64_t draws() const { return draws_; }

private:
    std::mt19937_64 engine_;
    std::uint64_t draws_ = 0;
};

} // namespace mcr
