// upscan: upgradeable smart contract analysis toolkit
// Copyright 2026 The upscan Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <upscan/errors.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace upscan
{
inline constexpr int hex_digit(char c) noexcept
{
    if (c >= '0' && c <= '9')
        return c - '0';
    if (c >= 'a' && c <= 'f')
        return c - 'a' + 10;
    if (c >= 'A' && c <= 'F')
        return c - 'A' + 10;
    return -1;
}

inline std::string_view strip_hex_prefix(std::string_view s) noexcept
{
    if (s.size() >= 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X'))
        s.remove_prefix(2);
    return s;
}

/// True iff s is hex of exactly n_bytes bytes, any letter case, 0x optional.
inline bool is_hex_bytes(std::string_view s, std::size_t n_bytes) noexcept
{
    s = strip_hex_prefix(s);
    if (s.size() != 2 * n_bytes)
        return false;
    for (char c : s)
        if (hex_digit(c) < 0)
            return false;
    return true;
}

/// True iff s matches ^0x[0-9a-f]{40}$ (the canonical lowercase address form).
inline bool is_address(std::string_view s) noexcept
{
    if (s.size() != 42 || s[0] != '0' || s[1] != 'x')
        return false;
    for (std::size_t i = 2; i < 42; ++i)
    {
        const char c = s[i];
        if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f')))
            return false;
    }
    return true;
}

inline std::string to_lower_ascii(std::string_view s)
{
    std::string out{s};
    for (char& c : out)
        if (c >= 'A' && c <= 'Z')
            c = static_cast<char>(c - 'A' + 'a');
    return out;
}

/// Lowercases a 20-byte hex identifier, adding the 0x prefix if missing.
/// Throws ValidationError when the input is not 40 hex digits.
inline std::string normalize_address(std::string_view s)
{
    std::string_view digits = strip_hex_prefix(s);
    if (digits.size() != 40)
        throw ValidationError{"malformed address: " + std::string{s}};
    std::string out = "0x";
    out.reserve(42);
    for (char c : digits)
    {
        if (hex_digit(c) < 0)
            throw ValidationError{"malformed address: " + std::string{s}};
        out.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
    }
    return out;
}

/// Decodes hex (with or without 0x) into bytes.
/// Throws ValidationError on odd length or a non-hex digit.
inline std::vector<std::uint8_t> from_hex(std::string_view s)
{
    std::string_view digits = strip_hex_prefix(s);
    if (digits.size() % 2 != 0)
        throw ValidationError{"odd-length hex string"};
    std::vector<std::uint8_t> out;
    out.reserve(digits.size() / 2);
    for (std::size_t i = 0; i < digits.size(); i += 2)
    {
        const int hi = hex_digit(digits[i]);
        const int lo = hex_digit(digits[i + 1]);
        if (hi < 0 || lo < 0)
            throw ValidationError{"non-hex digit in hex string"};
        out.push_back(static_cast<std::uint8_t>(hi << 4 | lo));
    }
    return out;
}

inline std::string to_hex(const std::uint8_t* data, std::size_t size, bool prefix = false)
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * size + 2);
    if (prefix)
        out += "0x";
    for (std::size_t i = 0; i < size; ++i)
    {
        out.push_back(digits[data[i] >> 4]);
        out.push_back(digits[data[i] & 0x0f]);
    }
    return out;
}

inline std::string to_hex(const std::vector<std::uint8_t>& data, bool prefix = false)
{
    return to_hex(data.data(), data.size(), prefix);
}

/// Extracts the 20-byte address packed into the low bytes of a 32-byte word
/// (the ABI encoding used by indexed event arguments and data words).
inline std::string address_from_word(std::string_view word_hex)
{
    if (!is_hex_bytes(word_hex, 32))
        throw ValidationError{"expected 32-byte hex word, got: " + std::string{word_hex}};
    std::string_view digits = strip_hex_prefix(word_hex);
    return normalize_address(digits.substr(24));
}
}  // namespace upscan
