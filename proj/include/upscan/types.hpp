// upscan: upgradeable smart contract analysis toolkit
// Copyright 2026 The upscan Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <upscan/errors.hpp>
#include <upscan/hex.hpp>

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace upscan
{
// Insertion-ordered JSON keeps ndjson output byte-stable across runs.
using json = nlohmann::ordered_json;

// --- upgrade pattern taxonomy ---

enum class UpgradeKind
{
    NotUpgradeable,
    ForwardProxy,
    UpgradeableProxyTransparent,
    UpgradeableProxyUUPS,
    UpgradeableProxyDiamond,
    DataSeparation,
    Strategy,
};

inline constexpr UpgradeKind kAllUpgradeKinds[] = {
    UpgradeKind::NotUpgradeable,
    UpgradeKind::ForwardProxy,
    UpgradeKind::UpgradeableProxyTransparent,
    UpgradeKind::UpgradeableProxyUUPS,
    UpgradeKind::UpgradeableProxyDiamond,
    UpgradeKind::DataSeparation,
    UpgradeKind::Strategy,
};

inline std::string to_string(UpgradeKind kind)
{
    switch (kind)
    {
    case UpgradeKind::NotUpgradeable: return "NotUpgradeable";
    case UpgradeKind::ForwardProxy: return "ForwardProxy";
    case UpgradeKind::UpgradeableProxyTransparent: return "UpgradeableProxyTransparent";
    case UpgradeKind::UpgradeableProxyUUPS: return "UpgradeableProxyUUPS";
    case UpgradeKind::UpgradeableProxyDiamond: return "UpgradeableProxyDiamond";
    case UpgradeKind::DataSeparation: return "DataSeparation";
    case UpgradeKind::Strategy: return "Strategy";
    }
    throw ValidationError{"unknown UpgradeKind"};
}

inline UpgradeKind upgrade_kind_from_string(const std::string& s)
{
    for (const UpgradeKind k : kAllUpgradeKinds)
        if (to_string(k) == s)
            return k;
    throw ValidationError{"unknown UpgradeKind: " + s};
}

/// A forward proxy routes requests but cannot be upgraded; both it and
/// NotUpgradeable are excluded from upgradeable aggregates.
inline constexpr bool is_upgradeable_kind(UpgradeKind kind) noexcept
{
    return kind != UpgradeKind::NotUpgradeable && kind != UpgradeKind::ForwardProxy;
}

/// Kinds that route calls through delegatecall (proxy family).
inline constexpr bool is_proxy_kind(UpgradeKind kind) noexcept
{
    return kind == UpgradeKind::ForwardProxy || kind == UpgradeKind::UpgradeableProxyTransparent ||
           kind == UpgradeKind::UpgradeableProxyUUPS || kind == UpgradeKind::UpgradeableProxyDiamond;
}

// --- contract records ---

struct SourceFile
{
    std::string path;
    std::string content;

    friend bool operator==(const SourceFile&, const SourceFile&) = default;
};

struct SourceBundle
{
    std::vector<SourceFile> files;
    std::string entry_contract;  // empty when unknown

    friend bool operator==(const SourceBundle&, const SourceBundle&) = default;

    void validate() const
    {
        if (files.empty())
            throw ValidationError{"source bundle must contain at least one file"};
        for (std::size_t i = 0; i < files.size(); ++i)
            for (std::size_t j = i + 1; j < files.size(); ++j)
                if (files[i].path == files[j].path)
                    throw ValidationError{"duplicate path in source bundle: " + files[i].path};
    }
};

struct ContractRecord
{
    std::string address;   // 0x + 40 lowercase hex
    std::string creator;   // same form, may be empty
    std::int64_t deployed_at = 0;
    std::string compiler_version;
    std::string solidity_version;
    std::string bytecode;  // hex, may be empty for source-only fixtures
    std::optional<SourceBundle> source;
    std::uint64_t tx_received = 0;
    bool verified = false;

    friend bool operator==(const ContractRecord&, const ContractRecord&) = default;

    void validate() const
    {
        if (!is_address(address))
            throw ValidationError{"malformed address: " + address};
        if (verified != source.has_value())
            throw ValidationError{"verified flag must match source presence for " + address};
        if (source)
            source->validate();
    }
};

// --- detection verdicts ---

struct EvidenceSpan
{
    std::string rule_id;
    std::size_t line_begin = 0;  // inclusive, 0-based canonical line index
    std::size_t line_end = 0;    // inclusive
    std::string matched;

    friend bool operator==(const EvidenceSpan&, const EvidenceSpan&) = default;
};

struct PatternVerdict
{
    std::string address;
    UpgradeKind kind = UpgradeKind::NotUpgradeable;
    std::vector<EvidenceSpan> evidence;
    bool is_upgradeable = false;

    friend bool operator==(const PatternVerdict&, const PatternVerdict&) = default;
};

// --- normalized sources ---

struct LineOrigin
{
    std::string path;
    std::size_t line = 0;  // 1-based line in the original file

    friend bool operator==(const LineOrigin&, const LineOrigin&) = default;
};

struct NormalizedSource
{
    std::string address;
    std::string canonical_text;
    std::string content_hash;          // 64 lowercase hex digits
    std::vector<LineOrigin> line_map;  // one entry per canonical line

    friend bool operator==(const NormalizedSource&, const NormalizedSource&) = default;

    std::vector<std::string> lines() const
    {
        std::vector<std::string> out;
        std::size_t start = 0;
        while (start < canonical_text.size())
        {
            std::size_t end = canonical_text.find('\n', start);
            if (end == std::string::npos)
                end = canonical_text.size();
            out.push_back(canonical_text.substr(start, end - start));
            start = end + 1;
        }
        return out;
    }
};

struct DuplicateGroup
{
    std::string group_id;  // content hash shared by all members
    std::string representative;
    std::vector<std::string> members;  // sorted addresses

    friend bool operator==(const DuplicateGroup&, const DuplicateGroup&) = default;
};

// --- version lineages ---

enum class EventProvenance
{
    SignatureTopic,
    DelegatecallTarget,
    DiamondCut,
    Manual,
};

inline std::string to_string(EventProvenance p)
{
    switch (p)
    {
    case EventProvenance::SignatureTopic: return "SignatureTopic";
    case EventProvenance::DelegatecallTarget: return "DelegatecallTarget";
    case EventProvenance::DiamondCut: return "DiamondCut";
    case EventProvenance::Manual: return "Manual";
    }
    throw ValidationError{"unknown EventProvenance"};
}

inline EventProvenance provenance_from_string(const std::string& s)
{
    for (const auto p : {EventProvenance::SignatureTopic, EventProvenance::DelegatecallTarget,
             EventProvenance::DiamondCut, EventProvenance::Manual})
        if (to_string(p) == s)
            return p;
    throw ValidationError{"unknown EventProvenance: " + s};
}

struct UpgradeEvent
{
    std::string proxy_address;
    std::string new_implementation;
    std::int64_t block_number = 0;
    std::int64_t timestamp = 0;
    EventProvenance provenance = EventProvenance::Manual;

    friend bool operator==(const UpgradeEvent&, const UpgradeEvent&) = default;
};

struct ContractVersion
{
    std::size_t version_index = 0;  // 1-based
    std::string implementation_address;
    std::int64_t deployed_at = 0;
    std::int64_t lifetime_seconds = 0;
    std::uint64_t tx_received = 0;

    friend bool operator==(const ContractVersion&, const ContractVersion&) = default;
};

struct VersionLineage
{
    std::string proxy_address;
    std::vector<ContractVersion> versions;
    std::int64_t collection_date = 0;

    friend bool operator==(const VersionLineage&, const VersionLineage&) = default;

    bool was_upgraded() const noexcept { return versions.size() >= 2; }
};

// --- root cause reports ---

struct VulnerabilityFinding
{
    std::string detector_id;
    std::string category;
    std::size_t line_begin = 0;  // inclusive, 0-based canonical line index
    std::size_t line_end = 0;    // inclusive
    std::string fingerprint;     // digest of (category, slice text)

    friend bool operator==(const VulnerabilityFinding&, const VulnerabilityFinding&) = default;
};

enum class RootCauseLabel
{
    BugFix,
    NewFeature,
    GasOptimization,
    Other,
};

inline std::string to_string(RootCauseLabel label)
{
    switch (label)
    {
    case RootCauseLabel::BugFix: return "BugFix";
    case RootCauseLabel::NewFeature: return "NewFeature";
    case RootCauseLabel::GasOptimization: return "GasOptimization";
    case RootCauseLabel::Other: return "Other";
    }
    throw ValidationError{"unknown RootCauseLabel"};
}

inline RootCauseLabel root_cause_label_from_string(const std::string& s)
{
    for (const auto l : {RootCauseLabel::BugFix, RootCauseLabel::NewFeature,
             RootCauseLabel::GasOptimization, RootCauseLabel::Other})
        if (to_string(l) == s)
            return l;
    throw ValidationError{"unknown RootCauseLabel: " + s};
}

struct GasEstimate
{
    std::uint64_t deploy_gas = 0;
    std::uint64_t base_tx_cost = 0;
    std::uint64_t creation_surcharge = 0;
    std::uint64_t code_deposit_cost = 0;
    std::uint64_t calldata_cost = 0;
    bool source_length_based = false;  // true when no bytecode was available

    friend bool operator==(const GasEstimate&, const GasEstimate&) = default;
};

struct DiffLine
{
    std::size_t line = 0;  // 0-based canonical line index (v2 for added, v1 for removed)
    std::string text;

    friend bool operator==(const DiffLine&, const DiffLine&) = default;
};

struct VersionDiff
{
    std::vector<DiffLine> added_lines;
    std::vector<DiffLine> removed_lines;
    std::size_t unchanged_count = 0;

    friend bool operator==(const VersionDiff&, const VersionDiff&) = default;
};

struct RootCauseReport
{
    std::string proxy_address;
    std::size_t from_version = 0;
    std::size_t to_version = 0;
    std::vector<RootCauseLabel> labels;
    std::vector<VulnerabilityFinding> bug_fixes;  // findings resolved in the new version
    std::vector<DiffLine> new_features;           // added lines outside finding spans
    std::vector<DiffLine> other;                  // removed lines outside finding spans
    std::optional<std::pair<GasEstimate, GasEstimate>> gas_notes;  // (old, new)
    // Gas comparison is a static deployment estimate, never a measured cost.
    std::string gas_method = "static-deploy-estimate";

    friend bool operator==(const RootCauseReport&, const RootCauseReport&) = default;

    bool has_label(RootCauseLabel label) const
    {
        for (const auto l : labels)
            if (l == label)
                return true;
        return false;
    }
};

// --- JSON serialization (ndjson store format) ---

inline void to_json(json& j, const SourceFile& f)
{
    j = json{{"path", f.path}, {"content", f.content}};
}

inline void from_json(const json& j, SourceFile& f)
{
    j.at("path").get_to(f.path);
    j.at("content").get_to(f.content);
}

inline void to_json(json& j, const SourceBundle& b)
{
    j = json{{"files", b.files}, {"entry_contract", b.entry_contract}};
}

inline void from_json(const json& j, SourceBundle& b)
{
    j.at("files").get_to(b.files);
    b.entry_contract = j.value("entry_contract", std::string{});
}

inline void to_json(json& j, const ContractRecord& r)
{
    j = json{{"address", r.address}, {"creator", r.creator}, {"deployed_at", r.deployed_at},
        {"compiler_version", r.compiler_version}, {"solidity_version", r.solidity_version},
        {"bytecode", r.bytecode}, {"tx_received", r.tx_received}, {"verified", r.verified}};
    if (r.source)
        j["source"] = *r.source;
}

inline void from_json(const json& j, ContractRecord& r)
{
    j.at("address").get_to(r.address);
    r.creator = j.value("creator", std::string{});
    j.at("deployed_at").get_to(r.deployed_at);
    r.compiler_version = j.value("compiler_version", std::string{});
    r.solidity_version = j.value("solidity_version", std::string{});
    r.bytecode = j.value("bytecode", std::string{});
    j.at("tx_received").get_to(r.tx_received);
    j.at("verified").get_to(r.verified);
    if (j.contains("source"))
        r.source = j.at("source").get<SourceBundle>();
    else
        r.source.reset();
}

inline void to_json(json& j, const EvidenceSpan& e)
{
    j = json{{"rule_id", e.rule_id}, {"line_begin", e.line_begin}, {"line_end", e.line_end},
        {"matched", e.matched}};
}

inline void from_json(const json& j, EvidenceSpan& e)
{
    j.at("rule_id").get_to(e.rule_id);
    j.at("line_begin").get_to(e.line_begin);
    j.at("line_end").get_to(e.line_end);
    j.at("matched").get_to(e.matched);
}

inline void to_json(json& j, const PatternVerdict& v)
{
    j = json{{"address", v.address}, {"kind", to_string(v.kind)}, {"is_upgradeable", v.is_upgradeable},
        {"evidence", v.evidence}};
}

inline void from_json(const json& j, PatternVerdict& v)
{
    j.at("address").get_to(v.address);
    v.kind = upgrade_kind_from_string(j.at("kind").get<std::string>());
    j.at("is_upgradeable").get_to(v.is_upgradeable);
    j.at("evidence").get_to(v.evidence);
}

inline void to_json(json& j, const NormalizedSource& n)
{
    json map = json::array();
    for (const LineOrigin& o : n.line_map)
        map.push_back(json::array({o.path, o.line}));
    j = json{{"address", n.address}, {"content_hash", n.content_hash},
        {"canonical_text", n.canonical_text}, {"line_map", std::move(map)}};
}

inline void from_json(const json& j, NormalizedSource& n)
{
    j.at("address").get_to(n.address);
    j.at("content_hash").get_to(n.content_hash);
    j.at("canonical_text").get_to(n.canonical_text);
    n.line_map.clear();
    for (const auto& entry : j.at("line_map"))
        n.line_map.push_back(LineOrigin{entry.at(0).get<std::string>(), entry.at(1).get<std::size_t>()});
}

inline void to_json(json& j, const DuplicateGroup& g)
{
    j = json{{"group_id", g.group_id}, {"representative", g.representative}, {"members", g.members}};
}

inline void from_json(const json& j, DuplicateGroup& g)
{
    j.at("group_id").get_to(g.group_id);
    j.at("representative").get_to(g.representative);
    j.at("members").get_to(g.members);
}

inline void to_json(json& j, const UpgradeEvent& e)
{
    j = json{{"proxy_address", e.proxy_address}, {"new_implementation", e.new_implementation},
        {"block_number", e.block_number}, {"timestamp", e.timestamp},
        {"provenance", to_string(e.provenance)}};
}

inline void from_json(const json& j, UpgradeEvent& e)
{
    j.at("proxy_address").get_to(e.proxy_address);
    j.at("new_implementation").get_to(e.new_implementation);
    j.at("block_number").get_to(e.block_number);
    j.at("timestamp").get_to(e.timestamp);
    e.provenance = provenance_from_string(j.at("provenance").get<std::string>());
}

inline void to_json(json& j, const ContractVersion& v)
{
    j = json{{"version_index", v.version_index}, {"implementation_address", v.implementation_address},
        {"deployed_at", v.deployed_at}, {"lifetime_seconds", v.lifetime_seconds},
        {"tx_received", v.tx_received}};
}

inline void from_json(const json& j, ContractVersion& v)
{
    j.at("version_index").get_to(v.version_index);
    j.at("implementation_address").get_to(v.implementation_address);
    j.at("deployed_at").get_to(v.deployed_at);
    j.at("lifetime_seconds").get_to(v.lifetime_seconds);
    j.at("tx_received").get_to(v.tx_received);
}

inline void to_json(json& j, const VersionLineage& l)
{
    j = json{{"proxy_address", l.proxy_address}, {"collection_date", l.collection_date},
        {"was_upgraded", l.was_upgraded()}, {"versions", l.versions}};
}

inline void from_json(const json& j, VersionLineage& l)
{
    j.at("proxy_address").get_to(l.proxy_address);
    j.at("collection_date").get_to(l.collection_date);
    j.at("versions").get_to(l.versions);
}

inline void to_json(json& j, const VulnerabilityFinding& f)
{
    j = json{{"detector_id", f.detector_id}, {"category", f.category}, {"line_begin", f.line_begin},
        {"line_end", f.line_end}, {"fingerprint", f.fingerprint}};
}

inline void from_json(const json& j, VulnerabilityFinding& f)
{
    j.at("detector_id").get_to(f.detector_id);
    j.at("category").get_to(f.category);
    j.at("line_begin").get_to(f.line_begin);
    j.at("line_end").get_to(f.line_end);
    j.at("fingerprint").get_to(f.fingerprint);
}

inline void to_json(json& j, const GasEstimate& g)
{
    j = json{{"deploy_gas", g.deploy_gas}, {"base_tx_cost", g.base_tx_cost},
        {"creation_surcharge", g.creation_surcharge}, {"code_deposit_cost", g.code_deposit_cost},
        {"calldata_cost", g.calldata_cost}, {"source_length_based", g.source_length_based}};
}

inline void from_json(const json& j, GasEstimate& g)
{
    j.at("deploy_gas").get_to(g.deploy_gas);
    j.at("base_tx_cost").get_to(g.base_tx_cost);
    j.at("creation_surcharge").get_to(g.creation_surcharge);
    j.at("code_deposit_cost").get_to(g.code_deposit_cost);
    j.at("calldata_cost").get_to(g.calldata_cost);
    g.source_length_based = j.value("source_length_based", false);
}

inline void to_json(json& j, const DiffLine& d)
{
    j = json::array({d.line, d.text});
}

inline void from_json(const json& j, DiffLine& d)
{
    d.line = j.at(0).get<std::size_t>();
    d.text = j.at(1).get<std::string>();
}

inline void to_json(json& j, const RootCauseReport& r)
{
    json labels = json::array();
    for (const auto label : r.labels)
        labels.push_back(to_string(label));
    j = json{{"proxy_address", r.proxy_address}, {"from_version", r.from_version},
        {"to_version", r.to_version}, {"labels", std::move(labels)}, {"bug_fixes", r.bug_fixes},
        {"new_features", r.new_features}, {"other", r.other}, {"gas_method", r.gas_method}};
    if (r.gas_notes)
        j["gas_notes"] = json{{"old", r.gas_notes->first}, {"new", r.gas_notes->second}};
}

inline void from_json(const json& j, RootCauseReport& r)
{
    j.at("proxy_address").get_to(r.proxy_address);
    j.at("from_version").get_to(r.from_version);
    j.at("to_version").get_to(r.to_version);
    r.labels.clear();
    for (const auto& label : j.at("labels"))
        r.labels.push_back(root_cause_label_from_string(label.get<std::string>()));
    j.at("bug_fixes").get_to(r.bug_fixes);
    j.at("new_features").get_to(r.new_features);
    j.at("other").get_to(r.other);
    r.gas_method = j.value("gas_method", std::string{"static-deploy-estimate"});
    if (j.contains("gas_notes"))
        r.gas_notes = std::make_pair(j.at("gas_notes").at("old").get<GasEstimate>(),
            j.at("gas_notes").at("new").get<GasEstimate>());
    else
        r.gas_notes.reset();
}
}  // namespace upscan
