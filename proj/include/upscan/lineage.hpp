// upscan: upgradeable smart contract analysis toolkit
// Copyright 2026 The upscan Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <upscan/errors.hpp>
#include <upscan/etl.hpp>
#include <upscan/event_registry.hpp>
#include <upscan/types.hpp>

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace upscan {

struct ExtractStats
{
    std::size_t considered = 0;
    std::size_t matched = 0;
    std::size_t unregistered = 0;       // topic0 not in the registry (or no topics)
    std::vector<std::string> errors;    // registered topic but undecodable payload
};

// Turns raw log rows into upgrade events. When `proxies` is non-empty, logs
// emitted by other addresses are ignored. Output is sorted by block number
// (then log index) so downstream code sees chain order even if the export
// was shuffled.
inline std::vector<UpgradeEvent> extract_upgrade_events(const std::vector<EtlLogRow>& logs,
    const EventRegistry& registry, const std::set<std::string>& proxies = {},
    ExtractStats* stats = nullptr)
{
    ExtractStats local;
    ExtractStats& st = stats ? *stats : local;
    std::vector<std::pair<std::size_t, UpgradeEvent>> keyed;  // (log_index, event)
    for (const EtlLogRow& log : logs)
    {
        if (!proxies.empty() && !proxies.count(log.address))
            continue;
        ++st.considered;
        const EventSpec* spec = log.topics.empty() ? nullptr : registry.find_by_topic0(log.topics[0]);
        if (!spec)
        {
            ++st.unregistered;
            continue;
        }
        std::string why;
        const std::optional<std::string> impl = extract_new_implementation(*spec, log, &why);
        if (!impl)
        {
            st.errors.push_back(
                "log " + log.transaction_hash + ":" + std::to_string(log.log_index) + ": " + why);
            continue;
        }
        ++st.matched;
        UpgradeEvent ev;
        ev.proxy_address = log.address;
        ev.new_implementation = *impl;
        ev.block_number = log.block_number;
        ev.timestamp = log.block_timestamp;
        ev.provenance = spec->provenance;
        keyed.emplace_back(log.log_index, ev);
    }
    std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
        if (a.second.block_number != b.second.block_number)
            return a.second.block_number < b.second.block_number;
        return a.first < b.first;
    });
    std::vector<UpgradeEvent> out;
    out.reserve(keyed.size());
    for (auto& [idx, ev] : keyed)
        out.push_back(std::move(ev));
    return out;
}

// Run-length pass over one proxy's delegatecall traces: each change of
// target becomes a version-change event stamped with the first occurrence.
inline std::vector<UpgradeEvent> extract_delegate_targets(const std::vector<EtlTraceRow>& traces,
    const std::string& proxy)
{
    std::vector<const EtlTraceRow*> mine;
    for (const EtlTraceRow& t : traces)
        if (t.call_type == "delegatecall" && t.from_address == proxy && is_address(t.to_address))
            mine.push_back(&t);
    std::stable_sort(mine.begin(), mine.end(), [](const EtlTraceRow* a, const EtlTraceRow* b) {
        if (a->block_timestamp != b->block_timestamp)
            return a->block_timestamp < b->block_timestamp;
        return a->block_number < b->block_number;
    });
    std::vector<UpgradeEvent> out;
    for (const EtlTraceRow* t : mine)
    {
        if (!out.empty() && out.back().new_implementation == t->to_address)
            continue;
        UpgradeEvent ev;
        ev.proxy_address = proxy;
        ev.new_implementation = t->to_address;
        ev.block_number = t->block_number;
        ev.timestamp = t->block_timestamp;
        ev.provenance = EventProvenance::DelegatecallTarget;
        out.push_back(std::move(ev));
    }
    return out;
}

namespace lineage_detail
{
// Explicit upgrade declarations outrank inferred trace targets.
inline int provenance_rank(EventProvenance p)
{
    switch (p)
    {
    case EventProvenance::SignatureTopic:
    case EventProvenance::DiamondCut:
        return 2;
    case EventProvenance::Manual:
        return 1;
    case EventProvenance::DelegatecallTarget:
        return 0;
    }
    return 0;
}
}  // namespace lineage_detail

// Merges events from all provenances into the proxy's ordered version
// history and applies the lifetime rule: each version lives until the next
// one activates; the last lives until the collection date.
//
// Conflicting reports (same timestamp, different implementations, or trace
// data disagreeing with an event) are resolved in favor of events and noted
// in `conflicts` when provided.
inline VersionLineage build_lineage(const std::string& proxy_address,
    std::vector<UpgradeEvent> events, std::int64_t collection_date,
    const std::map<std::string, std::uint64_t>& tx_received_by_impl = {},
    std::vector<std::string>* conflicts = nullptr)
{
    if (events.empty())
        throw ValidationError{"cannot build a lineage for " + proxy_address + " without events"};
    for (const UpgradeEvent& ev : events)
        if (ev.proxy_address != proxy_address)
            throw ValidationError{"event for " + ev.proxy_address + " passed to lineage of " + proxy_address};

    std::stable_sort(events.begin(), events.end(), [](const UpgradeEvent& a, const UpgradeEvent& b) {
        if (a.timestamp != b.timestamp)
            return a.timestamp < b.timestamp;
        return a.block_number < b.block_number;
    });
    if (collection_date < events.back().timestamp)
        throw ValidationError{"collection date " + std::to_string(collection_date) +
                              " precedes last event at " + std::to_string(events.back().timestamp) +
                              " for " + proxy_address};

    // Collapse each equal-timestamp run to a single report. Duplicates keep
    // the strongest provenance; genuinely different implementations keep the
    // chain-order last and the disagreement is surfaced.
    std::vector<UpgradeEvent> collapsed;
    for (std::size_t i = 0; i < events.size();)
    {
        std::size_t j = i;
        while (j < events.size() && events[j].timestamp == events[i].timestamp)
            ++j;
        UpgradeEvent chosen = events[i];
        for (std::size_t k = i + 1; k < j; ++k)
        {
            const UpgradeEvent& ev = events[k];
            if (ev.new_implementation == chosen.new_implementation)
            {
                if (lineage_detail::provenance_rank(ev.provenance) >
                    lineage_detail::provenance_rank(chosen.provenance))
                    chosen.provenance = ev.provenance;
                continue;
            }
            if (conflicts)
                conflicts->push_back(proxy_address + " at " + std::to_string(ev.timestamp) + ": " +
                                     chosen.new_implementation + " vs " + ev.new_implementation);
            if (lineage_detail::provenance_rank(ev.provenance) >=
                lineage_detail::provenance_rank(chosen.provenance))
                chosen = ev;
        }
        collapsed.push_back(std::move(chosen));
        i = j;
    }

    // Repeated sightings of the same implementation are not upgrades.
    std::vector<UpgradeEvent> distinct;
    for (UpgradeEvent& ev : collapsed)
    {
        if (!distinct.empty() && distinct.back().new_implementation == ev.new_implementation)
            continue;
        distinct.push_back(std::move(ev));
    }

    VersionLineage lineage;
    lineage.proxy_address = proxy_address;
    lineage.collection_date = collection_date;
    lineage.versions.reserve(distinct.size());
    for (std::size_t i = 0; i < distinct.size(); ++i)
    {
        ContractVersion v;
        v.version_index = i + 1;
        v.implementation_address = distinct[i].new_implementation;
        v.deployed_at = distinct[i].timestamp;
        v.lifetime_seconds = (i + 1 < distinct.size() ? distinct[i + 1].timestamp : collection_date) -
                             distinct[i].timestamp;
        const auto it = tx_received_by_impl.find(v.implementation_address);
        v.tx_received = it == tx_received_by_impl.end() ? 0 : it->second;
        lineage.versions.push_back(std::move(v));
    }
    return lineage;
}

struct UpgradeRate
{
    std::size_t upgraded = 0;
    std::size_t total = 0;
    std::size_t total_versions = 0;
    std::optional<double> proportion;  // absent when there are no lineages
};

inline UpgradeRate upgrade_rate(const std::vector<VersionLineage>& lineages)
{
    UpgradeRate r;
    r.total = lineages.size();
    for (const VersionLineage& l : lineages)
    {
        if (l.was_upgraded())
            ++r.upgraded;
        r.total_versions += l.versions.size();
    }
    if (r.total > 0)
        r.proportion = static_cast<double>(r.upgraded) / static_cast<double>(r.total);
    return r;
}

inline void to_json(json& j, const UpgradeRate& r)
{
    j = json{{"upgraded", r.upgraded}, {"total", r.total}, {"total_versions", r.total_versions}};
    if (r.proportion)
        j["proportion"] = *r.proportion;
}

}  // namespace upscan
