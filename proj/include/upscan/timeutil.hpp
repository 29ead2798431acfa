// upscan: upgradeable smart contract analysis toolkit
// Copyright 2026 The upscan Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <upscan/errors.hpp>

#include <cstdint>
#include <cstdio>
#include <ctime>
#include <string>
#include <string_view>

namespace upscan
{
/// Parses a UTC timestamp into epoch seconds. Accepts a plain integer,
/// "YYYY-MM-DD", or "YYYY-MM-DD[T ]HH:MM:SS" with an optional trailing "Z"
/// or " UTC" (the forms seen in ETL exports and on the command line).
inline std::int64_t parse_timestamp(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t'))
        s.remove_suffix(1);
    if (s.empty())
        throw ValidationError{"empty timestamp"};

    if (s.ends_with(" UTC"))
        s.remove_suffix(4);
    else if (s.ends_with("Z"))
        s.remove_suffix(1);

    bool all_digits = true;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (!(s[i] >= '0' && s[i] <= '9') && !(i == 0 && s[i] == '-'))
            all_digits = false;
    if (all_digits)
        return std::stoll(std::string{s});

    int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
    const std::string str{s};
    int matched = std::sscanf(str.c_str(), "%d-%d-%d", &year, &month, &day);
    if (matched != 3)
        throw ValidationError{"unparseable timestamp: " + str};
    if (str.size() > 10)
    {
        if (str.size() < 19 || (str[10] != 'T' && str[10] != ' ') ||
            std::sscanf(str.c_str() + 11, "%d:%d:%d", &hour, &minute, &second) != 3)
            throw ValidationError{"unparseable timestamp: " + str};
    }

    std::tm tm = {};
    tm.tm_year = year - 1900;
    tm.tm_mon = month - 1;
    tm.tm_mday = day;
    tm.tm_hour = hour;
    tm.tm_min = minute;
    tm.tm_sec = second;
    const std::time_t t = timegm(&tm);
    if (t == static_cast<std::time_t>(-1))
        throw ValidationError{"timestamp out of range: " + str};
    return static_cast<std::int64_t>(t);
}

/// Epoch seconds -> "YYYY-MM-DDTHH:MM:SSZ".
inline std::string format_timestamp(std::int64_t epoch_seconds)
{
    const auto t = static_cast<std::time_t>(epoch_seconds);
    std::tm tm = {};
    gmtime_r(&t, &tm);
    char buf[80];  // wide enough for out-of-range tm_year values
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900, tm.tm_mon + 1,
        tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}
}  // namespace upscan
