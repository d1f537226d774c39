#include "sphgrf/rng.hpp"

#include <cmath>
#include <numbers>

namespace sphgrf {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    lo = static_cast<std::uint32_t>(p);
    hi = static_cast<std::uint32_t>(p >> 32);
}

// 53-bit uniform in the open interval (0, 1).
inline double to_unit_open(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) noexcept {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kPhiloxW0;
            key[1] += kPhiloxW1;
        }
        std::uint32_t lo0, hi0, lo1, hi1;
        mulhilo(kPhiloxM0, ctr[0], lo0, hi0);
        mulhilo(kPhiloxM1, ctr[2], lo1, hi1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

std::pair<double, double> RngStream::normal_pair(const StreamAddress& addr) const noexcept {
    // l and m each fit in 16 bits for any band limit this library supports.
    const PhiloxCounter ctr = {
        (static_cast<std::uint32_t>(addr.ell) << 16) | static_cast<std::uint32_t>(addr.m & 0xFFFF),
        addr.step,
        static_cast<std::uint32_t>(addr.sample),
        static_cast<std::uint32_t>(addr.sample >> 32),
    };
    const PhiloxKey key = {static_cast<std::uint32_t>(seed_),
                           static_cast<std::uint32_t>(seed_ >> 32)};
    const PhiloxCounter r = philox4x32_10(ctr, key);
    const double u1 = to_unit_open(r[0], r[1]);
    const double u2 = to_unit_open(r[2], r[3]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

double RngStream::normal(std::uint64_t sample, int ell, int m, int component,
                         std::uint32_t step) const noexcept {
    const auto [z1, z2] = normal_pair({sample, ell, m, step});
    return component == 2 ? z2 : z1;
}

}  // namespace sphgrf
