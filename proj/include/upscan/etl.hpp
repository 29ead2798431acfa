// upscan: upgradeable smart contract analysis toolkit
// Copyright 2026 The upscan Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <upscan/csv.hpp>
#include <upscan/timeutil.hpp>
#include <upscan/types.hpp>

#include <istream>
#include <string>
#include <vector>

namespace upscan
{
struct EtlLogRow
{
    std::size_t log_index = 0;
    std::string transaction_hash;
    std::string address;  // emitting contract
    std::string data;     // unprefixed hex payload
    std::vector<std::string> topics;  // 0..4 entries, each 0x + 64 hex
    std::int64_t block_number = 0;
    std::int64_t block_timestamp = 0;
};

struct EtlTransactionRow
{
    std::string hash;
    std::string from_address;
    std::string to_address;  // empty for contract creations
    std::string input;
    std::int64_t block_timestamp = 0;
    std::string receipt_contract_address;  // set for creations
};

struct EtlTraceRow
{
    std::string transaction_hash;
    std::string from_address;
    std::string to_address;
    std::string call_type;
    std::int64_t block_number = 0;
    std::int64_t block_timestamp = 0;
};

/// Parsed rows plus an account of everything that was not parsed, so callers
/// can check rows.size() + skipped == input row count.
template <typename T>
struct ReadResult
{
    std::vector<T> rows;
    std::size_t skipped = 0;
    std::vector<std::string> errors;  // one entry per skipped row

    void reject(std::size_t row_no, const std::string& reason)
    {
        ++skipped;
        errors.push_back("row " + std::to_string(row_no) + ": " + reason);
    }
};

namespace etl_detail
{
/// Topics arrive joined with ';' in some exports and ',' in others.
inline std::vector<std::string> split_topics(const std::string& joined)
{
    std::vector<std::string> out;
    if (joined.empty())
        return out;
    const char sep = joined.find(';') != std::string::npos ? ';' : ',';
    std::size_t start = 0;
    while (true)
    {
        const std::size_t end = joined.find(sep, start);
        const std::string piece = joined.substr(start, end - start);
        if (!piece.empty())
            out.push_back(piece);
        if (end == std::string::npos)
            break;
        start = end + 1;
    }
    return out;
}

inline std::int64_t parse_int(const std::string& s)
{
    if (s.empty())
        return 0;
    return std::stoll(s);
}
}  // namespace etl_detail

/// Reads a contracts export (columns: address, bytecode, block_timestamp,
/// optionally creator, compiler_version, solidity_version, tx_received) into
/// source-less ContractRecords. Rows with unparseable addresses are skipped
/// and counted, never fatal.
inline ReadResult<ContractRecord> read_etl_contracts(std::istream& in)
{
    csv::Reader reader{in};
    std::vector<std::string> row;
    if (!reader.next(row))
        throw FormatError{"empty contracts CSV: header row required"};
    const csv::HeaderIndex header{row};
    const auto col_address = header.require("address");
    const auto col_bytecode = header.require("bytecode");
    const auto col_timestamp = header.require("block_timestamp");
    const auto col_creator = header.find("creator");
    const auto col_compiler = header.find("compiler_version");
    const auto col_solidity = header.find("solidity_version");
    const auto col_tx = header.find("tx_received");

    ReadResult<ContractRecord> result;
    std::size_t row_no = 1;
    while (reader.next(row))
    {
        ++row_no;
        ContractRecord record;
        try
        {
            record.address = normalize_address(csv::field(row, col_address));
            const std::string creator = csv::field(row, col_creator);
            record.creator = creator.empty() ? std::string{} : normalize_address(creator);
            record.deployed_at = parse_timestamp(csv::field(row, col_timestamp));
            record.bytecode = to_lower_ascii(strip_hex_prefix(csv::field(row, col_bytecode)));
            record.compiler_version = csv::field(row, col_compiler);
            record.solidity_version = csv::field(row, col_solidity);
            const std::string tx = csv::field(row, col_tx);
            record.tx_received = tx.empty() ? 0 : static_cast<std::uint64_t>(std::stoull(tx));
            record.verified = false;
            record.validate();
        }
        catch (const Error& e)
        {
            result.reject(row_no, e.what());
            continue;
        }
        result.rows.push_back(std::move(record));
    }
    return result;
}

/// Reads a logs export. Each row's topics column is split into a list; rows
/// with more than 4 topics or malformed topic hex are skipped and counted.
inline ReadResult<EtlLogRow> read_etl_logs(std::istream& in)
{
    csv::Reader reader{in};
    std::vector<std::string> row;
    if (!reader.next(row))
        throw FormatError{"empty logs CSV: header row required"};
    const csv::HeaderIndex header{row};
    const auto col_log_index = header.require("log_index");
    const auto col_tx_hash = header.require("transaction_hash");
    const auto col_address = header.require("address");
    const auto col_data = header.require("data");
    const auto col_topics = header.require("topics");
    const auto col_block = header.require("block_number");
    const auto col_timestamp = header.require("block_timestamp");

    ReadResult<EtlLogRow> result;
    std::size_t row_no = 1;
    while (reader.next(row))
    {
        ++row_no;
        EtlLogRow log;
        try
        {
            log.log_index = static_cast<std::size_t>(etl_detail::parse_int(csv::field(row, col_log_index)));
            log.transaction_hash = to_lower_ascii(csv::field(row, col_tx_hash));
            log.address = normalize_address(csv::field(row, col_address));
            log.data = to_lower_ascii(strip_hex_prefix(csv::field(row, col_data)));
            log.topics = etl_detail::split_topics(csv::field(row, col_topics));
            if (log.topics.size() > 4)
                throw ValidationError{"log has " + std::to_string(log.topics.size()) +
                                      " topics, at most 4 allowed"};
            for (std::string& topic : log.topics)
            {
                if (!is_hex_bytes(topic, 32))
                    throw ValidationError{"malformed 32-byte topic: " + topic};
                topic = "0x" + to_lower_ascii(strip_hex_prefix(topic));
            }
            log.block_number = etl_detail::parse_int(csv::field(row, col_block));
            log.block_timestamp = parse_timestamp(csv::field(row, col_timestamp));
        }
        catch (const std::exception& e)
        {
            result.reject(row_no, e.what());
            continue;
        }
        result.rows.push_back(std::move(log));
    }
    return result;
}

/// Reads a transactions export. Creation rows must carry an empty to_address
/// and a non-empty receipt_contract_address.
inline ReadResult<EtlTransactionRow> read_etl_transactions(std::istream& in)
{
    csv::Reader reader{in};
    std::vector<std::string> row;
    if (!reader.next(row))
        throw FormatError{"empty transactions CSV: header row required"};
    const csv::HeaderIndex header{row};
    const auto col_hash = header.require("hash");
    const auto col_from = header.require("from_address");
    const auto col_to = header.require("to_address");
    const auto col_input = header.require("input");
    const auto col_timestamp = header.require("block_timestamp");
    const auto col_receipt = header.find("receipt_contract_address");

    ReadResult<EtlTransactionRow> result;
    std::size_t row_no = 1;
    while (reader.next(row))
    {
        ++row_no;
        EtlTransactionRow tx;
        try
        {
            tx.hash = to_lower_ascii(csv::field(row, col_hash));
            tx.from_address = normalize_address(csv::field(row, col_from));
            const std::string to = csv::field(row, col_to);
            tx.to_address = to.empty() ? std::string{} : normalize_address(to);
            tx.input = to_lower_ascii(strip_hex_prefix(csv::field(row, col_input)));
            tx.block_timestamp = parse_timestamp(csv::field(row, col_timestamp));
            const std::string receipt = csv::field(row, col_receipt);
            tx.receipt_contract_address = receipt.empty() ? std::string{} : normalize_address(receipt);
            if (tx.to_address.empty() && tx.receipt_contract_address.empty())
                throw ValidationError{"creation row lacks receipt_contract_address"};
        }
        catch (const std::exception& e)
        {
            result.reject(row_no, e.what());
            continue;
        }
        result.rows.push_back(std::move(tx));
    }
    return result;
}

/// Reads a traces export (internal call records). call_type is kept verbatim;
/// lineage filtering for delegatecall happens downstream.
inline ReadResult<EtlTraceRow> read_etl_traces(std::istream& in)
{
    csv::Reader reader{in};
    std::vector<std::string> row;
    if (!reader.next(row))
        throw FormatError{"empty traces CSV: header row required"};
    const csv::HeaderIndex header{row};
    const auto col_from = header.require("from_address");
    const auto col_to = header.require("to_address");
    const auto col_call_type = header.require("call_type");
    const auto col_timestamp = header.require("block_timestamp");
    const auto col_tx_hash = header.find("transaction_hash");
    const auto col_block = header.find("block_number");

    ReadResult<EtlTraceRow> result;
    std::size_t row_no = 1;
    while (reader.next(row))
    {
        ++row_no;
        EtlTraceRow trace;
        try
        {
            trace.transaction_hash = to_lower_ascii(csv::field(row, col_tx_hash));
            trace.from_address = normalize_address(csv::field(row, col_from));
            trace.to_address = normalize_address(csv::field(row, col_to));
            trace.call_type = to_lower_ascii(csv::field(row, col_call_type));
            trace.block_number = etl_detail::parse_int(csv::field(row, col_block));
            trace.block_timestamp = parse_timestamp(csv::field(row, col_timestamp));
        }
        catch (const std::exception& e)
        {
            result.reject(row_no, e.what());
            continue;
        }
        result.rows.push_back(std::move(trace));
    }
    return result;
}
}  // namespace upscan
