// upscan: upgradeable smart contract analysis toolkit
// Copyright 2026 The upscan Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <upscan/errors.hpp>

#include <array>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace upscan
{
enum class TokenKind
{
    Identifier,
    Keyword,
    Number,
    HexNumber,
    StringLiteral,  // text excludes the quotes
    Punct,
};

struct Token
{
    TokenKind kind = TokenKind::Punct;
    std::string text;
    std::size_t line = 0;  // 0-based canonical line index

    bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
    bool is_word(std::string_view t) const
    {
        return (kind == TokenKind::Identifier || kind == TokenKind::Keyword) && text == t;
    }
    bool is_punct(std::string_view t) const { return kind == TokenKind::Punct && text == t; }
};

namespace lexer_detail
{
inline const std::set<std::string, std::less<>>& keywords()
{
    static const std::set<std::string, std::less<>> kw = {
        "abstract", "address", "anonymous", "as", "assembly", "bool", "break", "bytes", "calldata",
        "constant", "constructor", "continue", "contract", "delete", "do", "else", "emit", "enum",
        "error", "event", "external", "fallback", "for", "function", "if", "immutable", "import",
        "indexed", "interface", "internal", "is", "let", "library", "mapping", "memory", "modifier",
        "new", "override", "payable", "pragma", "private", "public", "pure", "receive", "require",
        "return", "returns", "revert", "storage", "string", "struct", "this", "throw", "true",
        "false", "try", "catch", "type", "unchecked", "using", "view", "virtual", "while",
    };
    return kw;
}

inline bool is_ident_start(char c)
{
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '$';
}

inline bool is_ident_char(char c)
{
    return is_ident_start(c) || (c >= '0' && c <= '9');
}

// Elementary type names follow the uintN / bytesN / fixed patterns, so they
// are matched by shape instead of being enumerated.
inline bool is_type_keyword_shape(std::string_view word)
{
    for (const std::string_view prefix : {"uint", "int", "bytes", "fixed", "ufixed"})
    {
        if (!word.starts_with(prefix))
            continue;
        const auto rest = word.substr(prefix.size());
        bool digits_only = true;
        for (const char c : rest)
            if (!(c >= '0' && c <= '9') && c != 'x')
                digits_only = false;
        if (digits_only)
            return true;
    }
    return false;
}

inline const std::array<std::string_view, 30>& multichar_puncts()
{
    // Longest first within each first-character family.
    static const std::array<std::string_view, 30> ops = {
        ">>=", "<<=", "**=", ":=", "=>", "==", "!=", "<=", ">=", "&&", "||", "->", "++", "--",
        "+=", "-=", "*=", "/=", "%=", "|=", "&=", "^=", "<<", ">>", "**", "..", "::", "?.",
        "~=", "!!",
    };
    return ops;
}

inline bool is_hex_digit_char(char c)
{
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}
}  // namespace lexer_detail

/// Lexes canonical (comment-free) Solidity-like text into a flat token
/// stream. Lines are tracked so evidence can point back into the text. This
/// is deliberately a lexer, not a parser: structural checks downstream
/// operate on token patterns and stay robust to non-compilable fixtures.
inline std::vector<Token> lex(std::string_view text)
{
    using namespace lexer_detail;
    std::vector<Token> tokens;
    std::size_t line = 0;
    std::size_t i = 0;
    while (i < text.size())
    {
        const char c = text[i];
        if (c == '\n')
        {
            ++line;
            ++i;
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r')
        {
            ++i;
            continue;
        }
        if (c == '"' || c == '\'')
        {
            const char quote = c;
            std::string value;
            ++i;
            while (i < text.size() && text[i] != quote && text[i] != '\n')
            {
                if (text[i] == '\\' && i + 1 < text.size())
                {
                    value.push_back(text[i]);
                    ++i;
                }
                value.push_back(text[i]);
                ++i;
            }
            if (i < text.size() && text[i] == quote)
                ++i;
            tokens.push_back({TokenKind::StringLiteral, std::move(value), line});
            continue;
        }
        if (is_ident_start(c))
        {
            std::size_t j = i + 1;
            while (j < text.size() && is_ident_char(text[j]))
                ++j;
            std::string word{text.substr(i, j - i)};
            const bool kw = keywords().contains(word) || is_type_keyword_shape(word);
            tokens.push_back({kw ? TokenKind::Keyword : TokenKind::Identifier, std::move(word), line});
            i = j;
            continue;
        }
        if (c >= '0' && c <= '9')
        {
            std::size_t j = i + 1;
            const bool hex = c == '0' && i + 1 < text.size() && (text[i + 1] == 'x' || text[i + 1] == 'X');
            if (hex)
            {
                ++j;
                while (j < text.size() && (is_hex_digit_char(text[j]) || text[j] == '_'))
                    ++j;
            }
            else
            {
                while (j < text.size() &&
                       ((text[j] >= '0' && text[j] <= '9') || text[j] == '.' || text[j] == '_' ||
                           text[j] == 'e' || text[j] == 'E'))
                    ++j;
            }
            tokens.push_back({hex ? TokenKind::HexNumber : TokenKind::Number,
                std::string{text.substr(i, j - i)}, line});
            i = j;
            continue;
        }
        bool matched = false;
        for (const std::string_view op : multichar_puncts())
        {
            if (text.substr(i).starts_with(op))
            {
                tokens.push_back({TokenKind::Punct, std::string{op}, line});
                i += op.size();
                matched = true;
                break;
            }
        }
        if (!matched)
        {
            tokens.push_back({TokenKind::Punct, std::string(1, c), line});
            ++i;
        }
    }
    return tokens;
}
}  // namespace upscan
