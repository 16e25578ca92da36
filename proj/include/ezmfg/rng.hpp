#pragma once

#include <array>
#include <cstdint>

namespace ezmfg {

// Philox 4x32, 10 rounds: a stateless counter-based generator. The same
// (counter, key) pair always produces the same four words, so per-agent
// streams are reproducible and partition-order independent.
struct Philox4x32 {
    static constexpr const char* algorithm = "philox4x32-10";

    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = 0xD2511F53ULL * ctr[0];
            const std::uint64_t p1 = 0xCD9E8D57ULL * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
                   static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
                   static_cast<std::uint32_t>(p0)};
            key[0] += 0x9E3779B9u;
            key[1] += 0xBB67AE85u;
        }
        return ctr;
    }
};

// maps a word into (0,1); both endpoints are unreachable
inline double uniform01(std::uint32_t w) {
    return (static_cast<double>(w) + 0.5) * 0x1.0p-32;
}

}  // namespace ezmfg
