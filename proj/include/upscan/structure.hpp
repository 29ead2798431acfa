// upscan: upgradeable smart contract analysis toolkit
// Copyright 2026 The upscan Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <upscan/lexer.hpp>

#include <cctype>
#include <optional>
#include <string>
#include <vector>

namespace upscan
{
/// Half-open token index range [begin, end) into the lexed stream.
struct TokenRange
{
    std::size_t begin = 0;
    std::size_t end = 0;

    bool empty() const noexcept { return begin >= end; }
};

struct FunctionInfo
{
    std::string name;           // "constructor", "fallback", "receive", or identifier
    bool is_constructor = false;
    std::string visibility;     // empty means unspecified (treated as public downstream)
    bool is_view_or_pure = false;
    std::vector<std::string> modifiers;  // invoked modifier names
    TokenRange body;            // tokens strictly inside the braces; empty for declarations
    std::size_t line = 0;       // declaration line
};

struct StateVarInfo
{
    std::string name;
    std::string type_text;      // joined type tokens, e.g. "mapping(bytes4=>address)"
    bool is_mapping = false;
    bool is_constant = false;   // constant or immutable
    std::string visibility;
    std::string const_hex;      // 32-byte hex initializer when present, lowercase 0x form
    std::size_t line = 0;
};

struct ModifierInfo
{
    std::string name;
    TokenRange body;
};

struct ContractInfo
{
    std::string kind;  // contract | interface | library
    std::string name;
    std::vector<std::string> bases;  // inherited names
    std::vector<FunctionInfo> functions;
    std::vector<StateVarInfo> state_vars;
    std::vector<ModifierInfo> modifiers;
    TokenRange body;
};

struct Structure
{
    std::vector<Token> tokens;
    std::vector<ContractInfo> contracts;

    const StateVarInfo* find_state_var(std::string_view name) const
    {
        for (const ContractInfo& c : contracts)
            for (const StateVarInfo& v : c.state_vars)
                if (v.name == name)
                    return &v;
        return nullptr;
    }

    const ModifierInfo* find_modifier(std::string_view name) const
    {
        for (const ContractInfo& c : contracts)
            for (const ModifierInfo& m : c.modifiers)
                if (m.name == name)
                    return &m;
        return nullptr;
    }

    bool has_declared_type(std::string_view name) const
    {
        for (const ContractInfo& c : contracts)
            if (c.name == name)
                return true;
        return false;
    }
};

namespace structure_detail
{
/// Index of the '}' matching the '{' at `open`, or the stream end.
inline std::size_t matching_brace(const std::vector<Token>& tokens, std::size_t open)
{
    std::size_t depth = 0;
    for (std::size_t i = open; i < tokens.size(); ++i)
    {
        if (tokens[i].is_punct("{"))
            ++depth;
        else if (tokens[i].is_punct("}"))
        {
            --depth;
            if (depth == 0)
                return i;
        }
    }
    return tokens.size();
}

inline std::size_t matching_paren(const std::vector<Token>& tokens, std::size_t open)
{
    std::size_t depth = 0;
    for (std::size_t i = open; i < tokens.size(); ++i)
    {
        if (tokens[i].is_punct("("))
            ++depth;
        else if (tokens[i].is_punct(")"))
        {
            --depth;
            if (depth == 0)
                return i;
        }
    }
    return tokens.size();
}

inline bool is_visibility(const Token& t)
{
    return t.kind == TokenKind::Keyword &&
           (t.text == "public" || t.text == "external" || t.text == "internal" || t.text == "private");
}

inline bool is_type_start(const Token& t)
{
    if (t.kind == TokenKind::Identifier)
        return true;
    if (t.kind != TokenKind::Keyword)
        return false;
    return t.text == "address" || t.text == "bool" || t.text == "string" || t.text == "bytes" ||
           t.text == "mapping" || lexer_detail::is_type_keyword_shape(t.text);
}

/// Parses a state variable declaration starting at `i` (member level).
/// On success returns the declaration and advances `i` past the ';'.
inline std::optional<StateVarInfo> parse_state_var(const std::vector<Token>& tokens, std::size_t& i,
    std::size_t end)
{
    const std::size_t start = i;
    std::size_t j = i;
    if (j >= end || !is_type_start(tokens[j]))
        return std::nullopt;

    StateVarInfo var;
    var.line = tokens[j].line;
    std::string type_text;
    const auto append_type = [&](const std::string& piece) {
        if (!type_text.empty() && (std::isalnum(static_cast<unsigned char>(piece[0])) != 0) &&
            (std::isalnum(static_cast<unsigned char>(type_text.back())) != 0))
            type_text.push_back(' ');
        type_text += piece;
    };

    if (tokens[j].is(TokenKind::Keyword, "mapping"))
    {
        var.is_mapping = true;
        append_type("mapping");
        ++j;
        if (j >= end || !tokens[j].is_punct("("))
            return std::nullopt;
        const std::size_t close = matching_paren(tokens, j);
        if (close >= end)
            return std::nullopt;
        for (std::size_t k = j; k <= close; ++k)
            type_text += tokens[k].text;
        j = close + 1;
    }
    else
    {
        append_type(tokens[j].text);
        ++j;
        // Qualified names (A.B) for library-scoped types.
        while (j + 1 < end && tokens[j].is_punct(".") && tokens[j + 1].kind == TokenKind::Identifier)
        {
            type_text += "." + tokens[j + 1].text;
            j += 2;
        }
        if (j < end && tokens[j].is(TokenKind::Keyword, "payable"))
        {
            append_type("payable");
            ++j;
        }
    }
    while (j + 1 < end && tokens[j].is_punct("["))
    {
        std::size_t k = j + 1;
        std::size_t depth = 1;
        while (k < end && depth > 0)
        {
            if (tokens[k].is_punct("["))
                ++depth;
            else if (tokens[k].is_punct("]"))
                --depth;
            ++k;
        }
        for (std::size_t m = j; m < k; ++m)
            type_text += tokens[m].text;
        j = k;
    }

    while (j < end && tokens[j].kind == TokenKind::Keyword)
    {
        const std::string& w = tokens[j].text;
        if (w == "public" || w == "external" || w == "internal" || w == "private")
            var.visibility = w;
        else if (w == "constant" || w == "immutable")
            var.is_constant = true;
        else if (w == "override" || w == "payable")
            ;  // ignored qualifiers
        else
            return std::nullopt;
        ++j;
    }

    if (j >= end || tokens[j].kind != TokenKind::Identifier)
        return std::nullopt;
    var.name = tokens[j].text;
    ++j;

    if (j < end && tokens[j].is_punct("="))
    {
        ++j;
        while (j < end && !tokens[j].is_punct(";"))
        {
            if (tokens[j].kind == TokenKind::HexNumber && tokens[j].text.size() == 66)
            {
                std::string lower = tokens[j].text;
                for (char& ch : lower)
                    if (ch >= 'A' && ch <= 'F')
                        ch = static_cast<char>(ch - 'A' + 'a');
                var.const_hex = lower;
            }
            ++j;
        }
    }
    if (j >= end || !tokens[j].is_punct(";"))
    {
        i = start;
        return std::nullopt;
    }
    var.type_text = std::move(type_text);
    i = j + 1;
    return var;
}

inline FunctionInfo parse_function(const std::vector<Token>& tokens, std::size_t& i, std::size_t end,
    const std::string& contract_name)
{
    FunctionInfo fn;
    fn.line = tokens[i].line;
    const std::string& intro = tokens[i].text;
    ++i;
    if (intro == "constructor")
    {
        fn.name = "constructor";
        fn.is_constructor = true;
    }
    else if (intro == "fallback" || intro == "receive")
        fn.name = intro;
    else  // "function"
    {
        if (i < end && (tokens[i].kind == TokenKind::Identifier || tokens[i].kind == TokenKind::Keyword))
        {
            fn.name = tokens[i].text;
            ++i;
        }
        // Solidity <0.5 constructors are functions named after the contract.
        if (fn.name == contract_name)
            fn.is_constructor = true;
    }

    if (i < end && tokens[i].is_punct("("))
        i = matching_paren(tokens, i) + 1;

    while (i < end && !tokens[i].is_punct("{") && !tokens[i].is_punct(";"))
    {
        const Token& t = tokens[i];
        if (is_visibility(t))
            fn.visibility = t.text;
        else if (t.is(TokenKind::Keyword, "view") || t.is(TokenKind::Keyword, "pure") ||
                 t.is(TokenKind::Keyword, "constant"))
            fn.is_view_or_pure = true;
        else if (t.is(TokenKind::Keyword, "returns") && i + 1 < end && tokens[i + 1].is_punct("("))
        {
            i = matching_paren(tokens, i + 1) + 1;
            continue;
        }
        else if (t.kind == TokenKind::Identifier)
        {
            fn.modifiers.push_back(t.text);
            if (i + 1 < end && tokens[i + 1].is_punct("("))
            {
                i = matching_paren(tokens, i + 1) + 1;
                continue;
            }
        }
        ++i;
    }

    if (i < end && tokens[i].is_punct("{"))
    {
        const std::size_t close = matching_brace(tokens, i);
        fn.body = {i + 1, close};
        i = close + 1;
    }
    else if (i < end)
        ++i;  // declaration-only, consume ';'
    return fn;
}
}  // namespace structure_detail

/// Extracts contracts, functions, state variables, and modifiers from a
/// token stream by brace matching. This is shape recovery for pattern
/// checks, not a compiler front end: unrecognized members are skipped.
inline Structure analyze_structure(std::vector<Token> tokens)
{
    using namespace structure_detail;
    Structure out;
    out.tokens = std::move(tokens);
    const std::vector<Token>& ts = out.tokens;

    std::size_t i = 0;
    while (i < ts.size())
    {
        if (!(ts[i].is(TokenKind::Keyword, "contract") || ts[i].is(TokenKind::Keyword, "interface") ||
                ts[i].is(TokenKind::Keyword, "library")))
        {
            ++i;
            continue;
        }
        ContractInfo contract;
        contract.kind = ts[i].text;
        ++i;
        if (i < ts.size() && ts[i].kind == TokenKind::Identifier)
        {
            contract.name = ts[i].text;
            ++i;
        }
        if (i < ts.size() && ts[i].is(TokenKind::Keyword, "is"))
        {
            ++i;
            while (i < ts.size() && !ts[i].is_punct("{"))
            {
                if (ts[i].kind == TokenKind::Identifier)
                    contract.bases.push_back(ts[i].text);
                if (ts[i].is_punct("("))
                {
                    i = matching_paren(ts, i) + 1;
                    continue;
                }
                ++i;
            }
        }
        while (i < ts.size() && !ts[i].is_punct("{"))
            ++i;
        if (i >= ts.size())
            break;
        const std::size_t close = matching_brace(ts, i);
        contract.body = {i + 1, close};

        std::size_t m = contract.body.begin;
        const std::size_t end = contract.body.end;
        while (m < end)
        {
            const Token& t = ts[m];
            if (t.is(TokenKind::Keyword, "function") || t.is(TokenKind::Keyword, "constructor") ||
                t.is(TokenKind::Keyword, "fallback") || t.is(TokenKind::Keyword, "receive"))
            {
                contract.functions.push_back(parse_function(ts, m, end, contract.name));
                continue;
            }
            if (t.is(TokenKind::Keyword, "modifier"))
            {
                ModifierInfo mod;
                ++m;
                if (m < end && ts[m].kind == TokenKind::Identifier)
                {
                    mod.name = ts[m].text;
                    ++m;
                }
                while (m < end && !ts[m].is_punct("{") && !ts[m].is_punct(";"))
                    ++m;
                if (m < end && ts[m].is_punct("{"))
                {
                    const std::size_t mclose = matching_brace(ts, m);
                    mod.body = {m + 1, mclose};
                    m = mclose + 1;
                }
                else if (m < end)
                    ++m;
                contract.modifiers.push_back(std::move(mod));
                continue;
            }
            if (t.is(TokenKind::Keyword, "event") || t.is(TokenKind::Keyword, "error") ||
                t.is(TokenKind::Keyword, "using"))
            {
                while (m < end && !ts[m].is_punct(";"))
                    ++m;
                ++m;
                continue;
            }
            if (t.is(TokenKind::Keyword, "struct") || t.is(TokenKind::Keyword, "enum"))
            {
                while (m < end && !ts[m].is_punct("{"))
                    ++m;
                if (m < end)
                    m = matching_brace(ts, m) + 1;
                continue;
            }
            if (auto var = parse_state_var(ts, m, end))
            {
                contract.state_vars.push_back(std::move(*var));
                continue;
            }
            // Unrecognized member: skip one statement or block.
            while (m < end && !ts[m].is_punct(";") && !ts[m].is_punct("{"))
                ++m;
            if (m < end && ts[m].is_punct("{"))
                m = matching_brace(ts, m) + 1;
            else
                ++m;
        }
        i = close + 1;
        out.contracts.push_back(std::move(contract));
    }
    return out;
}
}  // namespace upscan
