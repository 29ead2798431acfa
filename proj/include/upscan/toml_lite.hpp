// upscan: upgradeable smart contract analysis toolkit
// Copyright 2026 The upscan Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <upscan/errors.hpp>

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace upscan::toml
{
// Minimal TOML subset: [tables], [[arrays of tables]], and key = value lines
// where value is a basic string, integer, float, boolean, or a single-line
// array of those. Covers rules.toml, upgrade_events.toml, and pipeline
// config files without pulling in a full TOML dependency.

class Value
{
public:
    enum class Type
    {
        String,
        Integer,
        Float,
        Boolean,
        Array
    };

    Type type = Type::String;
    std::string str;
    std::int64_t integer = 0;
    double real = 0.0;
    bool boolean = false;
    std::vector<Value> array;

    const std::string& as_string() const
    {
        if (type != Type::String)
            throw ConfigError{"expected string value"};
        return str;
    }

    std::int64_t as_integer() const
    {
        if (type != Type::Integer)
            throw ConfigError{"expected integer value"};
        return integer;
    }

    double as_number() const
    {
        if (type == Type::Float)
            return real;
        if (type == Type::Integer)
            return static_cast<double>(integer);
        throw ConfigError{"expected numeric value"};
    }

    bool as_bool() const
    {
        if (type != Type::Boolean)
            throw ConfigError{"expected boolean value"};
        return boolean;
    }

    std::vector<std::string> as_string_array() const
    {
        if (type != Type::Array)
            throw ConfigError{"expected array value"};
        std::vector<std::string> out;
        out.reserve(array.size());
        for (const Value& v : array)
            out.push_back(v.as_string());
        return out;
    }
};

using Table = std::map<std::string, Value>;

struct Document
{
    Table root;
    std::map<std::string, Table> tables;
    std::map<std::string, std::vector<Table>> table_arrays;

    const Table* table(const std::string& name) const
    {
        const auto it = tables.find(name);
        return it == tables.end() ? nullptr : &it->second;
    }

    const std::vector<Table>* table_array(const std::string& name) const
    {
        const auto it = table_arrays.find(name);
        return it == table_arrays.end() ? nullptr : &it->second;
    }
};

namespace detail
{
inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

// Cuts a trailing # comment, honouring quoted strings.
inline std::string_view strip_comment(std::string_view line)
{
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i)
    {
        const char c = line[i];
        if (in_string)
        {
            if (c == '\\')
                ++i;
            else if (c == '"')
                in_string = false;
        }
        else if (c == '"')
            in_string = true;
        else if (c == '#')
            return line.substr(0, i);
    }
    return line;
}

inline Value parse_scalar(std::string_view text, std::size_t line_no);

inline Value parse_string(std::string_view text, std::size_t line_no, std::size_t& consumed)
{
    Value v;
    v.type = Value::Type::String;
    std::size_t i = 1;
    for (; i < text.size(); ++i)
    {
        const char c = text[i];
        if (c == '\\')
        {
            if (i + 1 >= text.size())
                throw ConfigError{"dangling escape at line " + std::to_string(line_no)};
            const char esc = text[++i];
            switch (esc)
            {
            case '"': v.str.push_back('"'); break;
            case '\\': v.str.push_back('\\'); break;
            case 'n': v.str.push_back('\n'); break;
            case 't': v.str.push_back('\t'); break;
            case 'r': v.str.push_back('\r'); break;
            default:
                throw ConfigError{"unsupported escape \\" + std::string(1, esc) + " at line " +
                                  std::to_string(line_no)};
            }
        }
        else if (c == '"')
        {
            consumed = i + 1;
            return v;
        }
        else
            v.str.push_back(c);
    }
    throw ConfigError{"unterminated string at line " + std::to_string(line_no)};
}

inline Value parse_value(std::string_view text, std::size_t line_no)
{
    text = trim(text);
    if (text.empty())
        throw ConfigError{"missing value at line " + std::to_string(line_no)};

    if (text.front() == '"')
    {
        std::size_t consumed = 0;
        Value v = parse_string(text, line_no, consumed);
        if (!trim(text.substr(consumed)).empty())
            throw ConfigError{"trailing characters after string at line " + std::to_string(line_no)};
        return v;
    }

    if (text.front() == '[')
    {
        if (text.back() != ']')
            throw ConfigError{"unterminated array at line " + std::to_string(line_no)};
        Value v;
        v.type = Value::Type::Array;
        std::string_view body = text.substr(1, text.size() - 2);
        std::size_t depth = 0;
        bool in_string = false;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= body.size(); ++i)
        {
            const bool at_end = i == body.size();
            const char c = at_end ? ',' : body[i];
            if (in_string)
            {
                if (c == '\\')
                    ++i;
                else if (c == '"')
                    in_string = false;
                continue;
            }
            if (c == '"')
                in_string = true;
            else if (c == '[')
                ++depth;
            else if (c == ']')
                --depth;
            else if (c == ',' && depth == 0)
            {
                const auto piece = trim(body.substr(start, i - start));
                if (!piece.empty())
                    v.array.push_back(parse_value(piece, line_no));
                start = i + 1;
            }
        }
        return v;
    }

    return parse_scalar(text, line_no);
}

inline Value parse_scalar(std::string_view text, std::size_t line_no)
{
    Value v;
    if (text == "true" || text == "false")
    {
        v.type = Value::Type::Boolean;
        v.boolean = text == "true";
        return v;
    }

    const std::string s{text};
    bool integral = true;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (!(s[i] >= '0' && s[i] <= '9') && !(i == 0 && (s[i] == '-' || s[i] == '+')) && s[i] != '_')
            integral = false;
    try
    {
        if (integral && !s.empty())
        {
            std::string digits;
            for (char c : s)
                if (c != '_')
                    digits.push_back(c);
            v.type = Value::Type::Integer;
            v.integer = std::stoll(digits);
            return v;
        }
        std::size_t pos = 0;
        v.type = Value::Type::Float;
        v.real = std::stod(s, &pos);
        if (pos != s.size())
            throw std::invalid_argument{s};
        return v;
    }
    catch (const std::exception&)
    {
        throw ConfigError{"unparseable value '" + s + "' at line " + std::to_string(line_no)};
    }
}
}  // namespace detail

inline Document parse(std::string_view text, const std::string& origin = "<toml>")
{
    Document doc;
    Table* current = &doc.root;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size())
    {
        const std::size_t eol = text.find('\n', pos);
        std::string_view raw =
            text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        const std::string_view line = detail::trim(detail::strip_comment(raw));
        if (line.empty())
            continue;

        if (line.starts_with("[["))
        {
            if (!line.ends_with("]]"))
                throw ConfigError{origin + ": malformed table array header at line " + std::to_string(line_no)};
            const std::string name{detail::trim(line.substr(2, line.size() - 4))};
            doc.table_arrays[name].emplace_back();
            current = &doc.table_arrays[name].back();
            continue;
        }
        if (line.front() == '[')
        {
            if (line.back() != ']')
                throw ConfigError{origin + ": malformed table header at line " + std::to_string(line_no)};
            const std::string name{detail::trim(line.substr(1, line.size() - 2))};
            current = &doc.tables[name];
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError{origin + ": expected key = value at line " + std::to_string(line_no)};
        const std::string key{detail::trim(line.substr(0, eq))};
        if (key.empty())
            throw ConfigError{origin + ": empty key at line " + std::to_string(line_no)};
        (*current)[key] = detail::parse_value(line.substr(eq + 1), line_no);
    }
    return doc;
}

inline Document parse_file(const std::string& path)
{
    std::ifstream in{path};
    if (!in)
        throw ConfigError{"cannot open config file: " + path};
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path);
}
}  // namespace upscan::toml
