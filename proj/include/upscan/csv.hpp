// upscan: upgradeable smart contract analysis toolkit
// Copyright 2026 The upscan Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <upscan/errors.hpp>

#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace upscan::csv
{
/// RFC-4180 record reader: quoted fields, doubled-quote escapes, embedded
/// newlines, and CRLF line ends. One call to next() per record.
class Reader
{
public:
    explicit Reader(std::istream& in) : in_{in} {}

    /// Reads the next record into `out`. Returns false at end of input.
    /// Throws FormatError on an unterminated quoted field.
    bool next(std::vector<std::string>& out)
    {
        out.clear();
        int c = in_.get();
        if (c == std::istream::traits_type::eof())
            return false;

        std::string field;
        bool quoted = false;
        bool any = false;
        while (true)
        {
            if (c == std::istream::traits_type::eof())
            {
                if (quoted)
                    throw FormatError{"unterminated quoted field at record " +
                                      std::to_string(record_ + 1)};
                break;
            }
            const char ch = static_cast<char>(c);
            if (quoted)
            {
                if (ch == '"')
                {
                    const int peek = in_.peek();
                    if (peek == '"')
                    {
                        field.push_back('"');
                        in_.get();
                    }
                    else
                        quoted = false;
                }
                else
                    field.push_back(ch);
            }
            else if (ch == '"' && field.empty() && !any)
            {
                quoted = true;
                any = true;
            }
            else if (ch == ',')
            {
                out.push_back(std::move(field));
                field.clear();
                any = false;
            }
            else if (ch == '\n')
                break;
            else if (ch == '\r' && in_.peek() == '\n')
            {
                in_.get();
                break;
            }
            else
            {
                field.push_back(ch);
                any = true;
            }
            c = in_.get();
        }
        out.push_back(std::move(field));
        ++record_;
        return true;
    }

private:
    std::istream& in_;
    std::size_t record_ = 0;
};

/// Maps header names to column indices; lookups by name keep row parsing
/// independent of export column order.
class HeaderIndex
{
public:
    explicit HeaderIndex(const std::vector<std::string>& header)
    {
        for (std::size_t i = 0; i < header.size(); ++i)
            index_.emplace(header[i], i);
    }

    /// Index of a required column; throws FormatError naming the column.
    std::size_t require(const std::string& column) const
    {
        const auto it = index_.find(column);
        if (it == index_.end())
            throw FormatError{"missing required CSV column: " + column};
        return it->second;
    }

    std::optional<std::size_t> find(const std::string& column) const
    {
        const auto it = index_.find(column);
        if (it == index_.end())
            return std::nullopt;
        return it->second;
    }

private:
    std::map<std::string, std::size_t> index_;
};

/// Field accessor tolerating short rows (missing trailing fields are empty).
inline std::string field(const std::vector<std::string>& row, std::size_t index)
{
    return index < row.size() ? row[index] : std::string{};
}

inline std::string field(const std::vector<std::string>& row, std::optional<std::size_t> index)
{
    return index ? field(row, *index) : std::string{};
}
}  // namespace upscan::csv
