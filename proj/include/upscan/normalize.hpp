// upscan: upgradeable smart contract analysis toolkit
// Copyright 2026 The upscan Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <upscan/keccak.hpp>
#include <upscan/types.hpp>

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace upscan
{
/// Removes `//` line comments and `/* */` block comments (NatSpec included),
/// leaving string literal contents untouched. A block comment becomes a
/// single space so adjacent tokens stay separated, and any newlines it
/// spanned are kept so line numbering survives.
/// Throws LexError for an unterminated block comment.
inline std::string strip_comments(std::string_view source)
{
    std::string out;
    out.reserve(source.size());
    std::size_t line = 1;
    std::size_t i = 0;
    while (i < source.size())
    {
        const char c = source[i];
        if (c == '"' || c == '\'')
        {
            // String literal: copy verbatim until the closing quote. Solidity
            // forbids raw newlines in strings, so a newline also ends the scan
            // and an unterminated literal cannot eat the rest of the file.
            const char quote = c;
            out.push_back(c);
            ++i;
            while (i < source.size())
            {
                const char s = source[i];
                out.push_back(s);
                ++i;
                if (s == '\\' && i < source.size())
                {
                    out.push_back(source[i]);
                    ++i;
                    continue;
                }
                if (s == quote)
                    break;
                if (s == '\n')
                {
                    ++line;
                    break;
                }
            }
            continue;
        }
        if (c == '/' && i + 1 < source.size() && source[i + 1] == '/')
        {
            i += 2;
            while (i < source.size() && source[i] != '\n')
                ++i;
            continue;  // the newline itself is handled by the outer loop
        }
        if (c == '/' && i + 1 < source.size() && source[i + 1] == '*')
        {
            const std::size_t start_line = line;
            i += 2;
            bool closed = false;
            out.push_back(' ');
            while (i < source.size())
            {
                if (source[i] == '*' && i + 1 < source.size() && source[i + 1] == '/')
                {
                    i += 2;
                    closed = true;
                    break;
                }
                if (source[i] == '\n')
                {
                    out.push_back('\n');
                    ++line;
                }
                ++i;
            }
            if (!closed)
                throw LexError{"unterminated block comment", start_line};
            continue;
        }
        if (c == '\n')
            ++line;
        out.push_back(c);
        ++i;
    }
    return out;
}

/// CRLF to LF, tabs to spaces, space runs collapsed, lines trimmed, blank
/// lines dropped. Idempotent. No trailing newline.
inline std::string canonicalize_whitespace(std::string_view text)
{
    std::string out;
    out.reserve(text.size());
    std::string current;
    const auto flush = [&] {
        while (!current.empty() && current.back() == ' ')
            current.pop_back();
        if (!current.empty())
        {
            if (!out.empty())
                out.push_back('\n');
            out += current;
        }
        current.clear();
    };
    for (std::size_t i = 0; i < text.size(); ++i)
    {
        char c = text[i];
        if (c == '\r')
        {
            if (i + 1 < text.size() && text[i + 1] == '\n')
                continue;  // swallowed; the '\n' ends the line
            c = '\n';
        }
        if (c == '\n')
        {
            flush();
            continue;
        }
        if (c == '\t')
            c = ' ';
        if (c == ' ' && (current.empty() || current.back() == ' '))
            continue;  // leading space or run of spaces
        current.push_back(c);
    }
    flush();
    return out;
}

namespace normalize_detail
{
struct OriginLine
{
    std::string text;
    LineOrigin origin;
};

inline std::string_view trim_view(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

inline bool is_import_line(std::string_view line)
{
    const auto t = trim_view(line);
    return t.starts_with("import") && (t.size() == 6 || t[6] == ' ' || t[6] == '\t' ||
                                          t[6] == '"' || t[6] == '\'' || t[6] == '{');
}

inline bool is_solidity_pragma(std::string_view line)
{
    const auto t = trim_view(line);
    if (!t.starts_with("pragma"))
        return false;
    const auto rest = trim_view(t.substr(6));
    return rest.starts_with("solidity");
}

/// The quoted path of an import statement, or empty if none parses.
inline std::string import_target(std::string_view line)
{
    const auto t = trim_view(line);
    for (const char quote : {'"', '\''})
    {
        const std::size_t open = t.find(quote);
        if (open == std::string_view::npos)
            continue;
        const std::size_t close = t.find(quote, open + 1);
        if (close == std::string_view::npos)
            continue;
        return std::string{t.substr(open + 1, close - open - 1)};
    }
    return {};
}

/// Lexically resolves "." and ".." segments of `relative` against the
/// directory of `importer`.
inline std::string resolve_path(const std::string& importer, const std::string& relative)
{
    std::vector<std::string> parts;
    const std::size_t slash = importer.find_last_of('/');
    if (slash != std::string::npos)
    {
        std::string dir = importer.substr(0, slash);
        std::size_t start = 0;
        while (start <= dir.size())
        {
            const std::size_t end = dir.find('/', start);
            parts.push_back(dir.substr(start, end - start));
            if (end == std::string::npos)
                break;
            start = end + 1;
        }
    }
    std::size_t start = 0;
    while (start <= relative.size())
    {
        const std::size_t end = relative.find('/', start);
        const std::string seg = relative.substr(start, end - start);
        if (seg == "..")
        {
            if (!parts.empty())
                parts.pop_back();
        }
        else if (seg != "." && !seg.empty())
            parts.push_back(seg);
        if (end == std::string::npos)
            break;
        start = end + 1;
    }
    std::string joined;
    for (const std::string& p : parts)
    {
        if (!joined.empty())
            joined.push_back('/');
        joined += p;
    }
    return joined;
}

inline std::vector<std::string> split_lines(std::string_view text)
{
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size())
    {
        const std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos)
        {
            lines.emplace_back(text.substr(start));
            break;
        }
        lines.emplace_back(text.substr(start, end - start));
        start = end + 1;
    }
    if (!lines.empty() && lines.back().empty() && text.ends_with('\n'))
        lines.pop_back();
    return lines;
}
}  // namespace normalize_detail

struct FlattenResult
{
    std::vector<normalize_detail::OriginLine> lines;  // import lines removed
    std::vector<std::string> warnings;                // external/unresolved imports
};

/// Concatenates the bundle's files with imported files before their
/// importers (stable by original file order among independents), drops all
/// import statements, and keeps only the first `pragma solidity` line.
/// Throws FlattenError naming the cycle when local imports are circular.
inline FlattenResult flatten_bundle_lines(const SourceBundle& bundle)
{
    using namespace normalize_detail;
    bundle.validate();

    const std::size_t n = bundle.files.size();
    std::map<std::string, std::size_t> by_path;
    for (std::size_t i = 0; i < n; ++i)
        by_path.emplace(bundle.files[i].path, i);
    std::map<std::string, std::vector<std::size_t>> by_basename;
    for (std::size_t i = 0; i < n; ++i)
    {
        const std::string& path = bundle.files[i].path;
        const std::size_t slash = path.find_last_of('/');
        by_basename[slash == std::string::npos ? path : path.substr(slash + 1)].push_back(i);
    }

    // A target resolves to a bundle file by resolved relative path, exact
    // path, or unique basename; otherwise it is external.
    const auto resolve = [&](std::size_t importer, const std::string& target) -> std::optional<std::size_t> {
        const std::string resolved = resolve_path(bundle.files[importer].path, target);
        if (const auto it = by_path.find(resolved); it != by_path.end())
            return it->second;
        if (const auto it = by_path.find(target); it != by_path.end())
            return it->second;
        const std::size_t slash = target.find_last_of('/');
        const std::string base = slash == std::string::npos ? target : target.substr(slash + 1);
        if (const auto it = by_basename.find(base); it != by_basename.end() && it->second.size() == 1)
            return it->second[0];
        return std::nullopt;
    };

    FlattenResult result;
    std::vector<std::set<std::size_t>> deps(n);
    std::vector<std::vector<std::string>> file_lines(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        file_lines[i] = split_lines(bundle.files[i].content);
        for (const std::string& line : file_lines[i])
        {
            if (!is_import_line(line))
                continue;
            const std::string target = import_target(line);
            if (target.empty())
            {
                result.warnings.push_back(bundle.files[i].path + ": unparseable import dropped: " +
                                          std::string{trim_view(line)});
                continue;
            }
            if (const auto dep = resolve(i, target))
                deps[i].insert(*dep);  // self-import counts as a cycle
            else
                result.warnings.push_back(bundle.files[i].path + ": external import dropped: " + target);
        }
    }

    // Kahn's algorithm, always taking the lowest-index ready file so the
    // original bundle order breaks ties deterministically.
    std::vector<bool> emitted(n, false);
    std::vector<std::size_t> order;
    for (std::size_t round = 0; round < n; ++round)
    {
        std::size_t pick = n;
        for (std::size_t i = 0; i < n && pick == n; ++i)
        {
            if (emitted[i])
                continue;
            bool ready = true;
            for (const std::size_t d : deps[i])
                if (!emitted[d])
                    ready = false;
            if (ready)
                pick = i;
        }
        if (pick == n)
        {
            // Remaining files form at least one cycle; walk one for the error.
            std::size_t at = 0;
            while (emitted[at])
                ++at;
            std::vector<std::size_t> trail;
            std::set<std::size_t> seen;
            while (!seen.contains(at))
            {
                trail.push_back(at);
                seen.insert(at);
                std::size_t next = n;
                for (const std::size_t d : deps[at])
                    if (!emitted[d])
                    {
                        next = d;
                        break;
                    }
                at = next;
            }
            std::string message = "cyclic imports: ";
            bool in_cycle = false;
            for (const std::size_t node : trail)
            {
                if (node == at)
                    in_cycle = true;
                if (!in_cycle)
                    continue;
                message += bundle.files[node].path + " -> ";
            }
            message += bundle.files[at].path;
            throw FlattenError{message};
        }
        emitted[pick] = true;
        order.push_back(pick);
    }

    bool pragma_seen = false;
    for (const std::size_t file : order)
    {
        for (std::size_t ln = 0; ln < file_lines[file].size(); ++ln)
        {
            const std::string& line = file_lines[file][ln];
            if (is_import_line(line))
                continue;
            if (is_solidity_pragma(line))
            {
                if (pragma_seen)
                    continue;
                pragma_seen = true;
            }
            result.lines.push_back({line, {bundle.files[file].path, ln + 1}});
        }
    }
    return result;
}

/// flatten_bundle_lines joined back into one text.
inline std::string flatten_bundle(const SourceBundle& bundle)
{
    const FlattenResult flat = flatten_bundle_lines(bundle);
    std::string out;
    for (std::size_t i = 0; i < flat.lines.size(); ++i)
    {
        if (i > 0)
            out.push_back('\n');
        out += flat.lines[i].text;
    }
    return out;
}

/// Full preprocessing for one contract: flatten, strip comments,
/// canonicalize whitespace, hash, and record where every canonical line came
/// from. Warnings from flattening are appended to `warnings` when non-null.
inline NormalizedSource normalize_source(const std::string& address, const SourceBundle& bundle,
    std::vector<std::string>* warnings = nullptr)
{
    using namespace normalize_detail;
    const FlattenResult flat = flatten_bundle_lines(bundle);
    if (warnings != nullptr)
        for (const std::string& w : flat.warnings)
            warnings->push_back(address + ": " + w);

    // Comment stripping runs over the joined text so block comments may span
    // lines; it preserves line counts, so origins stay index-aligned.
    std::string joined;
    for (std::size_t i = 0; i < flat.lines.size(); ++i)
    {
        if (i > 0)
            joined.push_back('\n');
        joined += flat.lines[i].text;
    }
    const std::string stripped = strip_comments(joined);
    const std::vector<std::string> stripped_lines = split_lines(stripped);

    NormalizedSource out;
    out.address = address;
    std::string canonical;
    for (std::size_t i = 0; i < stripped_lines.size(); ++i)
    {
        const std::string line = canonicalize_whitespace(stripped_lines[i]);
        if (line.empty())
            continue;
        if (!canonical.empty())
            canonical.push_back('\n');
        canonical += line;
        out.line_map.push_back(i < flat.lines.size() ? flat.lines[i].origin : LineOrigin{});
    }
    out.canonical_text = std::move(canonical);
    out.content_hash = keccak256_hex(out.canonical_text);
    return out;
}

/// Convenience overload for already-single-file sources.
inline NormalizedSource normalize_source(const std::string& address, const std::string& path,
    const std::string& content, std::vector<std::string>* warnings = nullptr)
{
    return normalize_source(address, SourceBundle{{{path, content}}, ""}, warnings);
}

/// Partitions normalized sources by content hash. The representative is the
/// member with the earliest deployment (ties: lowest address); addresses
/// missing from `deployed_at` sort after all dated ones. Groups are returned
/// ordered by group id, members sorted.
inline std::vector<DuplicateGroup> group_duplicates(const std::vector<NormalizedSource>& sources,
    const std::map<std::string, std::int64_t>& deployed_at)
{
    constexpr std::int64_t kUndated = std::numeric_limits<std::int64_t>::max();
    const auto date_of = [&](const std::string& address) {
        const auto it = deployed_at.find(address);
        return it == deployed_at.end() ? kUndated : it->second;
    };

    std::map<std::string, DuplicateGroup> groups;
    for (const NormalizedSource& source : sources)
    {
        DuplicateGroup& group = groups[source.content_hash];
        if (group.members.empty())
        {
            group.group_id = source.content_hash;
            group.representative = source.address;
        }
        else
        {
            const auto current = std::make_pair(date_of(group.representative), group.representative);
            const auto candidate = std::make_pair(date_of(source.address), source.address);
            if (candidate < current)
                group.representative = source.address;
        }
        group.members.push_back(source.address);
    }

    std::vector<DuplicateGroup> out;
    out.reserve(groups.size());
    for (auto& [hash, group] : groups)
    {
        std::sort(group.members.begin(), group.members.end());
        group.members.erase(std::unique(group.members.begin(), group.members.end()), group.members.end());
        out.push_back(std::move(group));
    }
    return out;
}
}  // namespace upscan
