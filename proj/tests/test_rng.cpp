#include <array>
#include <cstdint>

#include <doctest.h>

#include "ezmfg/rng.hpp"

using namespace ezmfg;

// Known-answer vectors for Philox4x32-10 from the Random123 reference
// implementation.
TEST_CASE("philox4x32-10 known answers") {
    SUBCASE("all-zero counter and key") {
        auto out = Philox4x32::block({0u, 0u, 0u, 0u}, {0u, 0u});
        CHECK(out[0] == 0x6627e8d5u);
        CHECK(out[1] == 0xe169c58du);
        CHECK(out[2] == 0xbc57ac4cu);
        CHECK(out[3] == 0x9b00dbd8u);
    }
    SUBCASE("all-ones counter and key") {
        auto out = Philox4x32::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                     {0xffffffffu, 0xffffffffu});
        CHECK(out[0] == 0x408f276du);
        CHECK(out[1] == 0x41c83b0eu);
        CHECK(out[2] == 0xa20bc7c6u);
        CHECK(out[3] == 0x6d5451fdu);
    }
    SUBCASE("pi digits") {
        auto out = Philox4x32::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                     {0xa4093822u, 0x299f31d0u});
        CHECK(out[0] == 0xd16cfe09u);
        CHECK(out[1] == 0x94fdccebu);
        CHECK(out[2] == 0x5001e420u);
        CHECK(out[3] == 0x24126ea1u);
    }
}

TEST_CASE("uniform01 maps words into the open unit interval") {
    CHECK(uniform01(0u) == doctest::Approx(0.5 / 4294967296.0).epsilon(1e-15));
    CHECK(uniform01(0xffffffffu) == doctest::Approx((4294967295.0 + 0.5) / 4294967296.0)
                                        .epsilon(1e-15));
    CHECK(uniform01(0u) > 0.0);
    CHECK(uniform01(0xffffffffu) < 1.0);
    // the lattice straddles 1/2 symmetrically: w and ~w are mirror images
    CHECK(uniform01(0x7fffffffu) < 0.5);
    CHECK(uniform01(0x80000000u) > 0.5);
    for (std::uint32_t w : {0u, 1u, 0x12345678u, 0x7fffffffu}) {
        CHECK(uniform01(w) + uniform01(~w) == 1.0);
    }
}

TEST_CASE("counter blocks decorrelate across agents and time") {
    // neighboring counters give unrelated words; a crude but effective check
    auto a = Philox4x32::block({1u, 0u, 0u, 0u}, {42u, 0u});
    auto b = Philox4x32::block({2u, 0u, 0u, 0u}, {42u, 0u});
    auto c = Philox4x32::block({1u, 1u, 0u, 0u}, {42u, 0u});
    int same_ab = 0, same_ac = 0;
    for (int i = 0; i < 4; ++i) {
        same_ab += a[i] == b[i];
        same_ac += a[i] == c[i];
    }
    CHECK(same_ab == 0);
    CHECK(same_ac == 0);
}
