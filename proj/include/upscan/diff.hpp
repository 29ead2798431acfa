// upscan: upgradeable smart contract analysis toolkit
// Copyright 2026 The upscan Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <upscan/types.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace upscan {

// Line-based minimal edit script between two canonical texts. Ties in the
// LCS table resolve toward removals, which keeps the output deterministic.
inline VersionDiff diff_lines(const std::vector<std::string>& a, const std::vector<std::string>& b)
{
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    std::vector<std::uint32_t> dp((n + 1) * (m + 1), 0);
    const auto at = [&](std::size_t i, std::size_t j) -> std::uint32_t& {
        return dp[i * (m + 1) + j];
    };
    for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t j = 1; j <= m; ++j)
        {
            if (a[i - 1] == b[j - 1])
                at(i, j) = at(i - 1, j - 1) + 1;
            else
                at(i, j) = std::max(at(i - 1, j), at(i, j - 1));
        }

    VersionDiff diff;
    std::size_t i = n;
    std::size_t j = m;
    while (i > 0 || j > 0)
    {
        if (i > 0 && j > 0 && a[i - 1] == b[j - 1])
        {
            ++diff.unchanged_count;
            --i;
            --j;
        }
        else if (j == 0 || (i > 0 && at(i - 1, j) >= at(i, j - 1)))
        {
            diff.removed_lines.push_back({i - 1, a[i - 1]});
            --i;
        }
        else
        {
            diff.added_lines.push_back({j - 1, b[j - 1]});
            --j;
        }
    }
    std::reverse(diff.added_lines.begin(), diff.added_lines.end());
    std::reverse(diff.removed_lines.begin(), diff.removed_lines.end());
    return diff;
}

inline VersionDiff diff_versions(const NormalizedSource& v1, const NormalizedSource& v2)
{
    return diff_lines(v1.lines(), v2.lines());
}

// Replays a diff produced by diff_lines(a, b) onto `a`; the result is `b`.
inline std::vector<std::string> apply_diff(const VersionDiff& diff, const std::vector<std::string>& a)
{
    std::vector<bool> removed(a.size(), false);
    for (const DiffLine& r : diff.removed_lines)
    {
        if (r.line >= a.size())
            throw ValidationError{"diff removes line " + std::to_string(r.line) +
                                  " beyond input of " + std::to_string(a.size()) + " lines"};
        removed[r.line] = true;
    }
    std::vector<std::string> out;
    out.reserve(a.size() - diff.removed_lines.size() + diff.added_lines.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!removed[i])
            out.push_back(a[i]);
    // added_lines carry their final positions; inserting in ascending order
    // keeps earlier insertions stable.
    for (const DiffLine& add : diff.added_lines)
    {
        if (add.line > out.size())
            throw ValidationError{"diff inserts line " + std::to_string(add.line) +
                                  " beyond output of " + std::to_string(out.size()) + " lines"};
        out.insert(out.begin() + static_cast<std::ptrdiff_t>(add.line), add.text);
    }
    return out;
}

}  // namespace upscan
