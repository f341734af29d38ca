#pragma once

#include <array>
#include <cstdint>

namespace sie {

/// Philox4x32-10 block function (Salmon et al.). Stateless: a 128-bit
/// counter and a 64-bit key map to 128 random bits.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Independent randomness domains; each consumer gets its own so that adding
/// draws in one place never shifts another.
enum class RngDomain : std::uint32_t {
    brownian = 1,
    bridge = 2,
    initial_law = 3,
    probe = 4,
    bounds = 5,
};

/// Counter-based generator addressed by (stream, index). Any draw can be
/// computed in isolation, which makes parallel generation schedule-free.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, RngDomain domain) : seed_(seed), domain_(domain) {}

    /// Two uniforms in (0, 1] for block `block` of `stream`.
    std::array<double, 2> uniform_pair(std::uint32_t stream, std::uint64_t block) const;

    /// Two independent standard normals (Box-Muller) for block `block`.
    std::array<double, 2> normal_pair(std::uint32_t stream, std::uint64_t block) const;

    /// The index-th draw of a stream; draws 2k and 2k+1 share one block.
    double uniform(std::uint32_t stream, std::uint64_t index) const {
        return uniform_pair(stream, index / 2)[index % 2];
    }
    double normal(std::uint32_t stream, std::uint64_t index) const {
        return normal_pair(stream, index / 2)[index % 2];
    }

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    RngDomain domain_;
};

}  // namespace sie
