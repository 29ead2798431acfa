// upscan: upgradeable smart contract analysis toolkit
// Copyright 2026 The upscan Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <upscan/types.hpp>

#include <httplib.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>

namespace upscan
{
/// Injectable time source so rate-limit and retry behavior is testable with a
/// counting fake instead of wall-clock sleeps.
struct Clock
{
    std::function<std::int64_t()> now_ms;
    std::function<void(std::int64_t)> sleep_ms;

    static Clock system()
    {
        return Clock{
            [] {
                return std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now().time_since_epoch())
                    .count();
            },
            [](std::int64_t ms) { std::this_thread::sleep_for(std::chrono::milliseconds(ms)); },
        };
    }
};

/// Client-side pacing: at most rate_per_sec acquisitions per second, enforced
/// by spacing consecutive acquisitions one interval apart. Thread-safe.
class RateLimiter
{
public:
    RateLimiter(double rate_per_sec, Clock clock)
      : interval_ms_{rate_per_sec > 0 ? static_cast<std::int64_t>(1000.0 / rate_per_sec) : 0},
        clock_{std::move(clock)}
    {}

    void acquire()
    {
        std::unique_lock lock{mutex_};
        if (interval_ms_ <= 0)
            return;
        const std::int64_t now = clock_.now_ms();
        if (now < next_allowed_ms_)
        {
            clock_.sleep_ms(next_allowed_ms_ - now);
            next_allowed_ms_ += interval_ms_;
        }
        else
            next_allowed_ms_ = now + interval_ms_;
    }

private:
    std::int64_t interval_ms_;
    std::int64_t next_allowed_ms_ = 0;
    Clock clock_;
    std::mutex mutex_;
};

enum class FetchStatus
{
    Ok,
    NotVerified,
};

struct FetchResult
{
    FetchStatus status = FetchStatus::NotVerified;
    SourceBundle bundle;
    std::string compiler_version;
    std::string solidity_version;
};

struct ExplorerConfig
{
    std::string base_url;  // e.g. http://localhost:8089
    std::string api_key;
    double rate_limit_per_sec = 5.0;
    int max_attempts = 3;
    std::int64_t backoff_base_ms = 250;  // doubles per retry
};

/// "v0.8.17+commit.8df45f5f" -> "0.8.17".
inline std::string solidity_version_from_compiler(const std::string& compiler_version)
{
    std::string v = compiler_version;
    if (!v.empty() && v.front() == 'v')
        v.erase(0, 1);
    const std::size_t plus = v.find('+');
    if (plus != std::string::npos)
        v.resize(plus);
    return v;
}

/// Decodes the explorer's SourceCode field into a bundle. Verified multi-file
/// uploads arrive as a JSON object wrapped in an extra brace pair ("{{...}}");
/// one leading '{' and trailing '}' are stripped before parsing. The inner
/// object is either a compiler standard-input document with a "sources" key
/// or a bare {path: {content}} map. Anything that is not JSON is a plain
/// single-file source.
inline SourceBundle parse_source_payload(const std::string& source_code,
    const std::string& contract_name)
{
    const std::string default_path =
        (contract_name.empty() ? std::string{"Contract"} : contract_name) + ".sol";

    std::string text = source_code;
    bool doubled = false;
    if (text.size() >= 4 && text.compare(0, 2, "{{") == 0)
    {
        std::size_t last = text.find_last_of('}');
        if (last == std::string::npos || last == 0 || text[last - 1] != '}')
            throw FormatError{"multi-file payload starts with {{ but does not end with }}"};
        text = text.substr(1, last - 1);
        doubled = true;
    }

    if (!text.empty() && text.front() == '{')
    {
        json doc;
        try
        {
            doc = json::parse(text);
        }
        catch (const json::parse_error& e)
        {
            if (doubled)
                throw FormatError{std::string{"malformed multi-file payload: "} + e.what()};
            // A plain source file that merely begins with '{' is implausible
            // Solidity, but fall through rather than guess.
            return SourceBundle{{{default_path, source_code}}, contract_name};
        }
        const json& sources = doc.contains("sources") ? doc.at("sources") : doc;
        if (!sources.is_object())
            throw FormatError{"multi-file payload has no object of sources"};
        SourceBundle bundle;
        bundle.entry_contract = contract_name;
        for (const auto& [path, entry] : sources.items())
        {
            if (!entry.is_object() || !entry.contains("content"))
                throw FormatError{"source entry for " + path + " lacks a content field"};
            bundle.files.push_back({path, entry.at("content").get<std::string>()});
        }
        if (bundle.files.empty())
            throw FormatError{"multi-file payload contains no files"};
        return bundle;
    }

    return SourceBundle{{{default_path, source_code}}, contract_name};
}

/// HTTP client for an Etherscan-style contract-source endpoint. Requests are
/// paced by the rate limiter and retried with exponential backoff on
/// transport failures; "contract not verified" is a normal result, never a
/// retry.
class ExplorerClient
{
public:
    explicit ExplorerClient(ExplorerConfig config, Clock clock = Clock::system())
      : config_{std::move(config)},
        clock_{clock},
        limiter_{config_.rate_limit_per_sec, clock}
    {
        if (config_.base_url.empty())
            throw ConfigError{"explorer base URL is empty"};
        if (config_.api_key.empty())
        {
            const char* env = std::getenv("EXPLORER_API_KEY");
            if (env != nullptr)
                config_.api_key = env;
        }
    }

    FetchResult fetch_source(const std::string& address)
    {
        const std::string path = "/api?module=contract&action=getsourcecode&address=" + address +
                                 "&apikey=" + config_.api_key;
        std::string body;
        std::string last_error;
        for (int attempt = 1; attempt <= config_.max_attempts; ++attempt)
        {
            if (attempt > 1)
                clock_.sleep_ms(config_.backoff_base_ms << (attempt - 2));
            limiter_.acquire();
            httplib::Client client{config_.base_url};
            auto res = client.Get(path);
            if (!res)
            {
                last_error = "transport failure: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status != 200)
            {
                last_error = "HTTP status " + std::to_string(res->status);
                continue;
            }
            body = res->body;
            last_error.clear();
            break;
        }
        if (!last_error.empty())
            throw TransportError{"fetch_source(" + address + ") failed after " +
                                 std::to_string(config_.max_attempts) + " attempts: " + last_error};
        return parse_response(address, body);
    }

    static FetchResult parse_response(const std::string& address, const std::string& body)
    {
        json doc;
        try
        {
            doc = json::parse(body);
        }
        catch (const json::parse_error& e)
        {
            throw FormatError{"explorer response for " + address + " is not JSON: " + e.what()};
        }
        if (!doc.contains("result") || !doc.at("result").is_array() || doc.at("result").empty())
            throw FormatError{"explorer response for " + address + " lacks a result array"};
        return parse_result_entry(doc.at("result").at(0));
    }

    /// Shared by the HTTP path and the local sources-directory path.
    static FetchResult parse_result_entry(const json& entry)
    {
        FetchResult result;
        const std::string source_code = entry.value("SourceCode", std::string{});
        if (source_code.empty())
        {
            result.status = FetchStatus::NotVerified;
            return result;
        }
        result.status = FetchStatus::Ok;
        result.compiler_version = entry.value("CompilerVersion", std::string{});
        result.solidity_version = solidity_version_from_compiler(result.compiler_version);
        result.bundle = parse_source_payload(source_code, entry.value("ContractName", std::string{}));
        return result;
    }

private:
    ExplorerConfig config_;
    Clock clock_;
    RateLimiter limiter_;
};

/// Offline substitute for the HTTP client: reads `<dir>/<address>.json` files
/// holding one explorer result entry each. A missing file means the contract
/// is not verified.
inline FetchResult fetch_source_from_dir(const std::filesystem::path& dir, const std::string& address)
{
    const auto path = dir / (address + ".json");
    std::ifstream in{path};
    if (!in)
        return FetchResult{};  // NotVerified
    json entry;
    try
    {
        in >> entry;
    }
    catch (const json::parse_error& e)
    {
        throw FormatError{"malformed source file " + path.string() + ": " + e.what()};
    }
    return ExplorerClient::parse_result_entry(entry);
}
}  // namespace upscan
