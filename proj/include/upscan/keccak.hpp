// upscan: upgradeable smart contract analysis toolkit
// Copyright 2026 The upscan Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

namespace upscan
{
namespace keccak_detail
{
// Round constants and rotation offsets are generated from the reference
// recurrences at compile time instead of being written out as tables. The
// resulting digests are pinned against tests/oracles/keccak_oracle.py in the
// unit tests.
constexpr std::array<std::uint64_t, 24> round_constants() noexcept
{
    std::array<std::uint64_t, 24> rc{};
    for (int ir = 0; ir < 24; ++ir)
    {
        std::uint64_t v = 0;
        for (int j = 0; j < 7; ++j)
        {
            // LFSR x^8 + x^6 + x^5 + x^4 + 1, bit at t = j + 7*ir
            unsigned r = 1;
            for (int t = 0; t < j + 7 * ir; ++t)
            {
                r <<= 1;
                if (r & 0x100)
                    r ^= 0x171;
            }
            if (r & 1)
                v |= std::uint64_t{1} << ((1 << j) - 1);
        }
        rc[static_cast<std::size_t>(ir)] = v;
    }
    return rc;
}

constexpr std::array<int, 25> rotation_offsets() noexcept
{
    std::array<int, 25> offs{};
    int x = 1, y = 0;
    for (int t = 0; t < 24; ++t)
    {
        offs[static_cast<std::size_t>(x + 5 * y)] = ((t + 1) * (t + 2) / 2) % 64;
        const int nx = y;
        y = (2 * x + 3 * y) % 5;
        x = nx;
    }
    return offs;
}

inline constexpr auto kRoundConstants = round_constants();
inline constexpr auto kRotations = rotation_offsets();

constexpr std::uint64_t rotl(std::uint64_t v, int n) noexcept
{
    return n == 0 ? v : (v << n) | (v >> (64 - n));
}

inline void permute(std::uint64_t* s) noexcept
{
    for (std::size_t round = 0; round < 24; ++round)
    {
        std::uint64_t c[5];
        for (int x = 0; x < 5; ++x)
            c[x] = s[x] ^ s[x + 5] ^ s[x + 10] ^ s[x + 15] ^ s[x + 20];
        for (int x = 0; x < 5; ++x)
        {
            const std::uint64_t d = c[(x + 4) % 5] ^ rotl(c[(x + 1) % 5], 1);
            for (int y = 0; y < 5; ++y)
                s[x + 5 * y] ^= d;
        }

        std::uint64_t b[25];
        for (int x = 0; x < 5; ++x)
            for (int y = 0; y < 5; ++y)
                b[y + 5 * ((2 * x + 3 * y) % 5)] = rotl(s[x + 5 * y], kRotations[static_cast<std::size_t>(x + 5 * y)]);

        for (int x = 0; x < 5; ++x)
            for (int y = 0; y < 5; ++y)
                s[x + 5 * y] = b[x + 5 * y] ^ (~b[(x + 1) % 5 + 5 * y] & b[(x + 2) % 5 + 5 * y]);

        s[0] ^= kRoundConstants[round];
    }
}
}  // namespace keccak_detail

/// Keccak-256 over raw bytes: the original 0x01-padded Keccak used by the EVM
/// for event topics and storage-slot derivation, not FIPS-202 SHA3-256.
inline std::array<std::uint8_t, 32> keccak256(const void* data, std::size_t size) noexcept
{
    constexpr std::size_t rate = 136;
    std::uint64_t state[25] = {};
    const auto* in = static_cast<const std::uint8_t*>(data);

    while (size >= rate)
    {
        for (std::size_t i = 0; i < rate / 8; ++i)
        {
            std::uint64_t lane;
            std::memcpy(&lane, in + 8 * i, 8);
            state[i] ^= lane;  // little-endian host assumed
        }
        keccak_detail::permute(state);
        in += rate;
        size -= rate;
    }

    std::uint8_t block[rate] = {};
    std::memcpy(block, in, size);
    block[size] = 0x01;
    block[rate - 1] |= 0x80;
    for (std::size_t i = 0; i < rate / 8; ++i)
    {
        std::uint64_t lane;
        std::memcpy(&lane, block + 8 * i, 8);
        state[i] ^= lane;
    }
    keccak_detail::permute(state);

    std::array<std::uint8_t, 32> out;
    std::memcpy(out.data(), state, 32);
    return out;
}

inline std::array<std::uint8_t, 32> keccak256(std::string_view text) noexcept
{
    return keccak256(text.data(), text.size());
}

/// Keccak-256 digest as 64 lowercase hex digits (no 0x prefix).
inline std::string keccak256_hex(std::string_view text)
{
    const auto digest = keccak256(text);
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(64, '0');
    for (std::size_t i = 0; i < 32; ++i)
    {
        out[2 * i] = digits[digest[i] >> 4];
        out[2 * i + 1] = digits[digest[i] & 0x0f];
    }
    return out;
}

/// Event-signature topic hash ("Upgraded(address)" -> 0x-prefixed 32-byte hex).
inline std::string event_topic_hash(std::string_view signature)
{
    return "0x" + keccak256_hex(signature);
}
}  // namespace upscan
