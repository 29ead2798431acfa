// upscan: upgradeable smart contract analysis toolkit
// Copyright 2026 The upscan Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace upscan
{
/// Base class for all upscan errors.
struct Error : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

/// Malformed domain value (bad address, bad hex, broken invariant).
struct ValidationError : Error
{
    using Error::Error;
};

/// Malformed input file or payload (CSV schema, JSON findings, API response).
struct FormatError : Error
{
    using Error::Error;
};

/// Lexing failure in Solidity source, carries the 1-based line number.
struct LexError : Error
{
    std::size_t line;

    LexError(const std::string& msg, std::size_t line_no)
      : Error(msg + " at line " + std::to_string(line_no)), line{line_no}
    {}
};

/// Unresolvable multi-file bundle (import cycles and the like).
struct FlattenError : Error
{
    using Error::Error;
};

/// Invalid run configuration; maps to process exit code 2.
struct ConfigError : Error
{
    using Error::Error;
};

/// HTTP or network failure that survived the retry budget.
struct TransportError : Error
{
    using Error::Error;
};

/// Regression design matrix is rank deficient.
struct DegenerateDesignError : Error
{
    using Error::Error;
};

/// A pipeline stage failed mid-run; maps to process exit code 3.
struct StageError : Error
{
    std::string stage;

    StageError(std::string stage_name, const std::string& msg)
      : Error("stage " + stage_name + ": " + msg), stage{std::move(stage_name)}
    {}
};
}  // namespace upscan
