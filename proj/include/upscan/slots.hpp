// upscan: upgradeable smart contract analysis toolkit
// Copyright 2026 The upscan Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <upscan/keccak.hpp>

#include <string>
#include <string_view>

namespace upscan
{
/// keccak256(label) - 1 as 0x-prefixed hex, the derivation EIP-1967 uses so a
/// slot has no known keccak preimage.
inline std::string keccak_minus_one_hex(std::string_view label)
{
    auto digest = keccak256(label);
    for (std::size_t i = 32; i-- > 0;)
    {
        if (digest[i]-- != 0)
            break;  // no borrow past a nonzero byte
    }
    static constexpr char hexdigits[] = "0123456789abcdef";
    std::string out = "0x";
    for (const auto byte : digest)
    {
        out.push_back(hexdigits[byte >> 4]);
        out.push_back(hexdigits[byte & 0x0f]);
    }
    return out;
}

// Well-known proxy storage slots. Computed from their defining labels rather
// than pasted in, and pinned to published values in the unit tests.
inline const std::string kEip1967ImplementationSlot = keccak_minus_one_hex("eip1967.proxy.implementation");
inline const std::string kEip1967AdminSlot = keccak_minus_one_hex("eip1967.proxy.admin");
inline const std::string kEip1967BeaconSlot = keccak_minus_one_hex("eip1967.proxy.beacon");
inline const std::string kEip1822ProxiableSlot = "0x" + keccak256_hex("PROXIABLE");
}  // namespace upscan
