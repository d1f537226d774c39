#pragma once

#include <array>
#include <cstdint>
#include <utility>

namespace sphgrf {

/// Philox4x32-10 block cipher (Salmon et al., SC'11): a pure function of
/// (counter, key). No internal state.
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

[[nodiscard]] PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) noexcept;

/// Address of one pair of standard normal variates in the coefficient stream.
struct StreamAddress {
    std::uint64_t sample = 0;
    int ell = 0;
    int m = 0;
    std::uint32_t step = 0;
};

/// Counter-based normal generator: the variate at (seed, sample, l, m,
/// component, step) is a fixed function of those values, independent of call
/// order, thread count, or band limit.
///
/// Each address (sample, l, m, step) maps to one Philox block; the block's
/// 128 bits give two uniforms and, via Box-Muller, the component-1 and
/// component-2 variates.
class RngStream {
public:
    RngStream() = default;
    explicit RngStream(std::uint64_t seed) noexcept : seed_(seed) {}

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

    /// (component 1, component 2) standard normals at the address.
    [[nodiscard]] std::pair<double, double> normal_pair(const StreamAddress& addr) const noexcept;

    /// One standard normal; component is 1 or 2.
    [[nodiscard]] double normal(std::uint64_t sample, int ell, int m, int component,
                                std::uint32_t step = 0) const noexcept;

private:
    std::uint64_t seed_ = 0;
};

}  // namespace sphgrf
