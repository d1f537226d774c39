#include <doctest.h>

#include <cmath>
#include <set>

#include "sphgrf/rng.hpp"
#include "test_util.hpp"

using namespace sphgrf;

TEST_CASE("Philox4x32-10 known-answer vectors") {
    // Reference vectors published with the Random123 library.
    CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) ==
          PhiloxCounter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          PhiloxCounter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          PhiloxCounter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("stream is a pure function of its address") {
    const RngStream a(42), b(42), c(43);
    const StreamAddress addr{7, 12, 5, 3};
    CHECK(a.normal_pair(addr) == b.normal_pair(addr));
    CHECK(a.normal_pair(addr) != c.normal_pair(addr));
    CHECK(a.normal(7, 12, 5, 1, 3) == a.normal_pair(addr).first);
    CHECK(a.normal(7, 12, 5, 2, 3) == a.normal_pair(addr).second);
    // Call order does not matter.
    const double first = a.normal(1, 2, 1, 1);
    for (int k = 0; k < 100; ++k) (void)a.normal(static_cast<std::uint64_t>(k), k, 0, 1);
    CHECK(a.normal(1, 2, 1, 1) == first);

    // Distinct addresses give distinct values (no aliasing between fields).
    std::set<double> seen;
    for (std::uint64_t s : {0ull, 1ull, 1ull << 32, (1ull << 32) + 1}) {
        for (int l = 0; l < 8; ++l) {
            for (int m = 0; m <= l; ++m) {
                for (std::uint32_t step : {0u, 1u}) {
                    const auto [z1, z2] = a.normal_pair({s, l, m, step});
                    seen.insert(z1);
                    seen.insert(z2);
                }
            }
        }
    }
    CHECK(seen.size() == 4u * 36u * 2u * 2u);
}

TEST_CASE("normal variates: moments and independence") {
    const RngStream rng(2024);
    testutil::Moments z1, z2, prod, fourth;
    std::size_t within_one = 0;
    constexpr std::uint64_t n = 200000;
    for (std::uint64_t s = 0; s < n; ++s) {
        const auto [a, b] = rng.normal_pair({s, 3, 1, 0});
        z1.add(a);
        z2.add(b);
        prod.add(a * rng.normal(s, 3, 2, 1));
        fourth.add(a * a * a * a);
        if (std::abs(b) < 1.0) ++within_one;
    }
    const double se = 1.0 / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(z1.mean) < 4.0 * se);
    CHECK(std::abs(z2.mean) < 4.0 * se);
    // Var of the sample variance of N(0,1) is 2/n.
    CHECK(std::abs(z1.variance() - 1.0) < 4.0 * std::sqrt(2.0) * se);
    CHECK(std::abs(z2.variance() - 1.0) < 4.0 * std::sqrt(2.0) * se);
    CHECK(std::abs(prod.mean) < 4.0 * se);
    // E z^4 = 3, Var z^4 = 96.
    CHECK(std::abs(fourth.mean - 3.0) < 4.0 * std::sqrt(96.0) * se);
    // P(|z| < 1) = 0.682689...
    const double p = 0.6826894921370859;
    CHECK(std::abs(static_cast<double>(within_one) / n - p) < 4.0 * std::sqrt(p * (1 - p)) * se);
}
