// upscan: upgradeable smart contract analysis toolkit
// Copyright 2026 The upscan Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <upscan/errors.hpp>
#include <upscan/hex.hpp>
#include <upscan/types.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace upscan {

inline constexpr std::uint64_t kGasBaseTx = 21000;
inline constexpr std::uint64_t kGasCreation = 32000;
inline constexpr std::uint64_t kGasPerCodeByte = 200;
inline constexpr std::uint64_t kGasPerNonzeroByte = 16;
inline constexpr std::uint64_t kGasPerZeroByte = 4;

namespace gas_detail
{
inline std::uint64_t calldata_cost(std::string_view init_hex)
{
    std::uint64_t cost = 0;
    for (std::size_t i = 0; i + 2 <= init_hex.size(); i += 2)
        cost += (init_hex[i] == '0' && init_hex[i + 1] == '0') ? kGasPerZeroByte : kGasPerNonzeroByte;
    return cost;
}

inline std::string_view checked_hex(std::string_view hex, const char* what)
{
    const std::string_view digits = strip_hex_prefix(hex);
    if (digits.size() % 2 != 0)
        throw ValidationError{std::string{what} + " has odd hex length " + std::to_string(digits.size())};
    for (const char c : digits)
        if (hex_digit(c) < 0)
            throw ValidationError{std::string{what} + " contains a non-hex character"};
    return digits;
}
}  // namespace gas_detail

// Static deployment cost: base transaction + creation surcharge + code
// deposit per deployed byte + calldata cost of the init code. When no init
// code is supplied the deployed code stands in for it.
inline GasEstimate estimate_deploy_gas(std::string_view deployed_code_hex,
    std::string_view init_code_hex = {})
{
    const std::string_view code = gas_detail::checked_hex(deployed_code_hex, "deployed code");
    const std::string_view init =
        init_code_hex.empty() ? code : gas_detail::checked_hex(init_code_hex, "init code");

    GasEstimate est;
    est.base_tx_cost = kGasBaseTx;
    est.creation_surcharge = kGasCreation;
    est.code_deposit_cost = kGasPerCodeByte * (code.size() / 2);
    est.calldata_cost = gas_detail::calldata_cost(init);
    est.deploy_gas =
        est.base_tx_cost + est.creation_surcharge + est.code_deposit_cost + est.calldata_cost;
    est.source_length_based = false;
    return est;
}

// Fallback when only source is available: the canonical text length stands
// in for the code size, with every stand-in byte priced as nonzero calldata.
// Comparable only against other source-length estimates.
inline GasEstimate estimate_deploy_gas_from_source(std::size_t canonical_length)
{
    GasEstimate est;
    est.base_tx_cost = kGasBaseTx;
    est.creation_surcharge = kGasCreation;
    est.code_deposit_cost = kGasPerCodeByte * canonical_length;
    est.calldata_cost = kGasPerNonzeroByte * canonical_length;
    est.deploy_gas =
        est.base_tx_cost + est.creation_surcharge + est.code_deposit_cost + est.calldata_cost;
    est.source_length_based = true;
    return est;
}

// Preferred-input helper: bytecode when the record has it, source length
// otherwise.
inline GasEstimate estimate_deploy_gas_for(const ContractRecord& record,
    const NormalizedSource* normalized)
{
    const std::string_view code = strip_hex_prefix(record.bytecode);
    if (!code.empty())
        return estimate_deploy_gas(record.bytecode);
    return estimate_deploy_gas_from_source(normalized ? normalized->canonical_text.size() : 0);
}

}  // namespace upscan
