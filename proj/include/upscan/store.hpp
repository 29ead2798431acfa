// upscan: upgradeable smart contract analysis toolkit
// Copyright 2026 The upscan Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <upscan/types.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

namespace upscan
{
/// Optional predicates for query_records; unset fields match everything.
struct RecordFilter
{
    std::optional<bool> verified;
    std::optional<UpgradeKind> kind;
    std::optional<std::int64_t> deployed_after;   // inclusive
    std::optional<std::int64_t> deployed_before;  // inclusive
};

/// Line-delimited JSON store shared by all pipeline stages.
///
/// Every entity family lives in one ndjson file keyed by address (reports by
/// "address#from#to").  save() rewrites each file in key order with one JSON
/// object per line, so repeated runs over the same inputs produce
/// byte-identical files.  Reads take a shared lock; writes are exclusive.
class Store
{
public:
    Store() = default;

    explicit Store(const std::filesystem::path& dir) { open(dir); }

    void open(const std::filesystem::path& dir)
    {
        std::unique_lock lock{mutex_};
        dir_ = dir;
        std::filesystem::create_directories(dir_);
        load_file(contracts_path(), contracts_);
        load_file(normalized_path(), normalized_);
        load_file(groups_path(), groups_);
        load_file(verdicts_path(), verdicts_);
        load_file(lineages_path(), lineages_);
        load_file(reports_path(), reports_);
    }

    const std::filesystem::path& dir() const noexcept { return dir_; }

    std::filesystem::path contracts_path() const { return dir_ / "contracts.ndjson"; }
    std::filesystem::path normalized_path() const { return dir_ / "normalized.ndjson"; }
    std::filesystem::path groups_path() const { return dir_ / "groups.ndjson"; }
    std::filesystem::path verdicts_path() const { return dir_ / "verdicts.ndjson"; }
    std::filesystem::path lineages_path() const { return dir_ / "lineages.ndjson"; }
    std::filesystem::path reports_path() const { return dir_ / "reports.ndjson"; }

    void save() const
    {
        std::shared_lock lock{mutex_};
        std::filesystem::create_directories(dir_);
        write_file(contracts_path(), contracts_);
        write_file(normalized_path(), normalized_);
        write_file(groups_path(), groups_);
        write_file(verdicts_path(), verdicts_);
        write_file(lineages_path(), lineages_);
        write_file(reports_path(), reports_);
    }

    // --- contracts ---

    void put_record(const ContractRecord& record)
    {
        record.validate();
        std::unique_lock lock{mutex_};
        contracts_[record.address] = record;
    }

    std::optional<ContractRecord> get_record(const std::string& address) const
    {
        std::shared_lock lock{mutex_};
        const auto it = contracts_.find(address);
        if (it == contracts_.end())
            return std::nullopt;
        return it->second;
    }

    std::vector<ContractRecord> query_records(const RecordFilter& filter = {}) const
    {
        std::shared_lock lock{mutex_};
        std::vector<ContractRecord> out;
        for (const auto& [address, record] : contracts_)
        {
            if (filter.verified && record.verified != *filter.verified)
                continue;
            if (filter.deployed_after && record.deployed_at < *filter.deployed_after)
                continue;
            if (filter.deployed_before && record.deployed_at > *filter.deployed_before)
                continue;
            if (filter.kind)
            {
                const auto it = verdicts_.find(address);
                if (it == verdicts_.end() || it->second.kind != *filter.kind)
                    continue;
            }
            out.push_back(record);
        }
        return out;  // map iteration order means addresses ascend
    }

    std::size_t record_count() const
    {
        std::shared_lock lock{mutex_};
        return contracts_.size();
    }

    // --- normalized sources ---

    void put_normalized(const NormalizedSource& n)
    {
        std::unique_lock lock{mutex_};
        normalized_[n.address] = n;
    }

    std::optional<NormalizedSource> get_normalized(const std::string& address) const
    {
        std::shared_lock lock{mutex_};
        const auto it = normalized_.find(address);
        if (it == normalized_.end())
            return std::nullopt;
        return it->second;
    }

    std::vector<NormalizedSource> all_normalized() const { return all_of(normalized_); }

    // --- duplicate groups ---

    void replace_groups(const std::vector<DuplicateGroup>& groups)
    {
        std::unique_lock lock{mutex_};
        groups_.clear();
        for (const DuplicateGroup& g : groups)
            groups_[g.group_id] = g;
    }

    std::vector<DuplicateGroup> all_groups() const { return all_of(groups_); }

    // --- verdicts ---

    void put_verdict(const PatternVerdict& v)
    {
        std::unique_lock lock{mutex_};
        verdicts_[v.address] = v;
    }

    std::optional<PatternVerdict> get_verdict(const std::string& address) const
    {
        std::shared_lock lock{mutex_};
        const auto it = verdicts_.find(address);
        if (it == verdicts_.end())
            return std::nullopt;
        return it->second;
    }

    std::vector<PatternVerdict> all_verdicts() const { return all_of(verdicts_); }

    // --- lineages ---

    void put_lineage(const VersionLineage& l)
    {
        std::unique_lock lock{mutex_};
        lineages_[l.proxy_address] = l;
    }

    std::optional<VersionLineage> get_lineage(const std::string& address) const
    {
        std::shared_lock lock{mutex_};
        const auto it = lineages_.find(address);
        if (it == lineages_.end())
            return std::nullopt;
        return it->second;
    }

    std::vector<VersionLineage> all_lineages() const { return all_of(lineages_); }

    // --- root cause reports ---

    void put_report(const RootCauseReport& r)
    {
        std::unique_lock lock{mutex_};
        reports_[report_key(r)] = r;
    }

    std::vector<RootCauseReport> all_reports() const { return all_of(reports_); }

    static std::string report_key(const RootCauseReport& r)
    {
        return r.proxy_address + "#" + std::to_string(r.from_version) + "#" +
               std::to_string(r.to_version);
    }

private:
    template <typename T>
    std::vector<T> all_of(const std::map<std::string, T>& m) const
    {
        std::shared_lock lock{mutex_};
        std::vector<T> out;
        out.reserve(m.size());
        for (const auto& [key, value] : m)
            out.push_back(value);
        return out;
    }

    template <typename T>
    static void load_file(const std::filesystem::path& path, std::map<std::string, T>& into)
    {
        into.clear();
        std::ifstream in{path};
        if (!in)
            return;  // absent files mean an empty table
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line))
        {
            ++line_no;
            if (line.empty())
                continue;
            json j;
            try
            {
                j = json::parse(line);
            }
            catch (const json::parse_error& e)
            {
                throw FormatError{path.string() + ":" + std::to_string(line_no) + ": " + e.what()};
            }
            T value = j.get<T>();
            into[key_of(value)] = std::move(value);
        }
    }

    template <typename T>
    static void write_file(const std::filesystem::path& path, const std::map<std::string, T>& from)
    {
        std::ofstream out{path, std::ios::trunc};
        if (!out)
            throw FormatError{"cannot write " + path.string()};
        for (const auto& [key, value] : from)
        {
            const json j = value;
            out << j.dump() << '\n';
        }
    }

    static std::string key_of(const ContractRecord& r) { return r.address; }
    static std::string key_of(const NormalizedSource& n) { return n.address; }
    static std::string key_of(const DuplicateGroup& g) { return g.group_id; }
    static std::string key_of(const PatternVerdict& v) { return v.address; }
    static std::string key_of(const VersionLineage& l) { return l.proxy_address; }
    static std::string key_of(const RootCauseReport& r) { return report_key(r); }

    std::filesystem::path dir_;
    mutable std::shared_mutex mutex_;
    std::map<std::string, ContractRecord> contracts_;
    std::map<std::string, NormalizedSource> normalized_;
    std::map<std::string, DuplicateGroup> groups_;
    std::map<std::string, PatternVerdict> verdicts_;
    std::map<std::string, VersionLineage> lineages_;
    std::map<std::string, RootCauseReport> reports_;
};
}  // namespace upscan
