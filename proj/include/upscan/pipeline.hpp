// upscan: upgradeable smart contract analysis toolkit
// Copyright 2026 The upscan Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <upscan/activity.hpp>
#include <upscan/detect.hpp>
#include <upscan/detectors.hpp>
#include <upscan/etl.hpp>
#include <upscan/explorer.hpp>
#include <upscan/gas.hpp>
#include <upscan/lineage.hpp>
#include <upscan/normalize.hpp>
#include <upscan/rootcause.hpp>
#include <upscan/store.hpp>
#include <upscan/timeutil.hpp>
#include <upscan/toml_lite.hpp>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <random>
#include <set>
#include <thread>

namespace upscan {

inline constexpr const char* kToolVersion = "0.1.0";

struct StageToggles
{
    bool ingest = true;
    bool normalize = true;
    bool detect = true;
    bool trace = true;
    bool rootcause = true;
    bool activity = true;

    bool* by_name(const std::string& name)
    {
        if (name == "ingest")
            return &ingest;
        if (name == "normalize")
            return &normalize;
        if (name == "detect")
            return &detect;
        if (name == "trace")
            return &trace;
        if (name == "rootcause")
            return &rootcause;
        if (name == "activity")
            return &activity;
        return nullptr;
    }
};

struct PipelineConfig
{
    std::string store_dir = "store";

    // input files
    std::string contracts_csv;
    std::string logs_csv;
    std::string traces_csv;
    std::string findings_file;
    std::string sources_dir;  // offline <address>.json payloads

    // explorer API
    std::string api_url;
    std::string api_key;  // falls back to EXPLORER_API_KEY

    // stage parameters
    std::string collected_at;  // timestamp closing every open lifetime
    std::string rules_file;
    std::string events_file;
    std::string activity_out;  // defaults to <store>/activity.json
    bool log_transform = false;
    std::size_t sample = 0;  // trace at most this many contracts; 0 = all
    std::uint64_t seed = 0;

    std::size_t workers = 0;  // 0 = logical CPUs
    bool verbose = false;
    StageToggles stages;

    std::filesystem::path activity_report_path() const
    {
        if (!activity_out.empty())
            return activity_out;
        return std::filesystem::path{store_dir} / "activity.json";
    }
};

struct StageStats
{
    std::string stage;
    std::size_t inputs = 0;
    std::size_t outputs = 0;
    std::size_t skipped = 0;
    std::size_t errors = 0;
    double wall_ms = 0.0;
};

struct RunManifest
{
    std::string tool_version = kToolVersion;
    json config;
    std::vector<StageStats> stages;
    bool ok = true;
    std::string failure;  // "<stage>: <reason>" when a stage halted the run
};

inline void to_json(json& j, const StageStats& s)
{
    j = json{{"stage", s.stage}, {"inputs", s.inputs}, {"outputs", s.outputs},
        {"skipped", s.skipped}, {"errors", s.errors}, {"wall_ms", s.wall_ms}};
}

inline void to_json(json& j, const RunManifest& m)
{
    j = json{{"tool_version", m.tool_version}, {"config", m.config}, {"stages", m.stages},
        {"ok", m.ok}};
    if (!m.failure.empty())
        j["failure"] = m.failure;
}

inline json config_snapshot(const PipelineConfig& c)
{
    return json{{"store", c.store_dir}, {"contracts_csv", c.contracts_csv},
        {"logs_csv", c.logs_csv}, {"traces_csv", c.traces_csv},
        {"findings_file", c.findings_file}, {"sources_dir", c.sources_dir},
        {"api_url", c.api_url}, {"collected_at", c.collected_at}, {"rules_file", c.rules_file},
        {"events_file", c.events_file}, {"activity_out", c.activity_out},
        {"log_transform", c.log_transform}, {"sample", c.sample}, {"seed", c.seed},
        {"workers", c.workers},
        {"stages", json{{"ingest", c.stages.ingest}, {"normalize", c.stages.normalize},
                       {"detect", c.stages.detect}, {"trace", c.stages.trace},
                       {"rootcause", c.stages.rootcause}, {"activity", c.stages.activity}}}};
}

namespace pipeline_detail
{
inline std::string get_string(const toml::Table& t, const std::string& key, std::string fallback)
{
    const auto it = t.find(key);
    return it == t.end() ? std::move(fallback) : it->second.as_string();
}

inline bool get_bool(const toml::Table& t, const std::string& key, bool fallback)
{
    const auto it = t.find(key);
    return it == t.end() ? fallback : it->second.as_bool();
}

inline std::int64_t get_int(const toml::Table& t, const std::string& key, std::int64_t fallback)
{
    const auto it = t.find(key);
    return it == t.end() ? fallback : it->second.as_integer();
}

inline void require_file(const std::string& path, const std::string& what)
{
    if (path.empty())
        throw ConfigError{what + " is required but not configured"};
    if (!std::filesystem::exists(path))
        throw ConfigError{what + " not found: " + path};
}
}  // namespace pipeline_detail

/// TOML layout mirrors PipelineConfig: top-level store/workers/verbose, plus
/// [inputs], [api], [params], and [stages] tables. Unknown keys are ignored
/// so configs stay forward-compatible.
inline PipelineConfig pipeline_config_from_toml(const toml::Document& doc,
    PipelineConfig base = {})
{
    using namespace pipeline_detail;
    PipelineConfig c = std::move(base);
    c.store_dir = get_string(doc.root, "store", c.store_dir);
    c.workers = static_cast<std::size_t>(
        get_int(doc.root, "workers", static_cast<std::int64_t>(c.workers)));
    c.verbose = get_bool(doc.root, "verbose", c.verbose);

    if (const toml::Table* inputs = doc.table("inputs"))
    {
        c.contracts_csv = get_string(*inputs, "contracts_csv", c.contracts_csv);
        c.logs_csv = get_string(*inputs, "logs_csv", c.logs_csv);
        c.traces_csv = get_string(*inputs, "traces_csv", c.traces_csv);
        c.findings_file = get_string(*inputs, "findings", c.findings_file);
        c.sources_dir = get_string(*inputs, "sources_dir", c.sources_dir);
    }
    if (const toml::Table* api = doc.table("api"))
    {
        c.api_url = get_string(*api, "url", c.api_url);
        c.api_key = get_string(*api, "key", c.api_key);
    }
    if (const toml::Table* params = doc.table("params"))
    {
        c.collected_at = get_string(*params, "collected_at", c.collected_at);
        c.rules_file = get_string(*params, "rules", c.rules_file);
        c.events_file = get_string(*params, "events", c.events_file);
        c.activity_out = get_string(*params, "activity_out", c.activity_out);
        c.log_transform = get_bool(*params, "log_transform", c.log_transform);
        c.sample =
            static_cast<std::size_t>(get_int(*params, "sample", static_cast<std::int64_t>(c.sample)));
        c.seed =
            static_cast<std::uint64_t>(get_int(*params, "seed", static_cast<std::int64_t>(c.seed)));
    }
    if (const toml::Table* stages = doc.table("stages"))
    {
        c.stages.ingest = get_bool(*stages, "ingest", c.stages.ingest);
        c.stages.normalize = get_bool(*stages, "normalize", c.stages.normalize);
        c.stages.detect = get_bool(*stages, "detect", c.stages.detect);
        c.stages.trace = get_bool(*stages, "trace", c.stages.trace);
        c.stages.rootcause = get_bool(*stages, "rootcause", c.stages.rootcause);
        c.stages.activity = get_bool(*stages, "activity", c.stages.activity);
    }
    return c;
}

inline PipelineConfig load_pipeline_config(const std::string& path, PipelineConfig base = {})
{
    return pipeline_config_from_toml(toml::parse_file(path), std::move(base));
}

/// Every referenced input is checked before any stage runs, so a bad config
/// never leaves partial outputs behind.
inline void validate_pipeline_config(const PipelineConfig& c)
{
    using namespace pipeline_detail;
    if (c.store_dir.empty())
        throw ConfigError{"store directory is required"};
    std::error_code ec;
    std::filesystem::create_directories(c.store_dir, ec);
    if (ec)
        throw ConfigError{"store directory " + c.store_dir + " is not writable: " + ec.message()};

    if (c.stages.ingest)
    {
        require_file(c.contracts_csv, "contracts CSV");
        if (!c.sources_dir.empty() && !std::filesystem::is_directory(c.sources_dir))
            throw ConfigError{"sources directory not found: " + c.sources_dir};
    }
    if (c.stages.trace)
    {
        if (c.collected_at.empty())
            throw ConfigError{"collected-at timestamp is required when tracing"};
        try
        {
            parse_timestamp(c.collected_at);
        }
        catch (const Error& e)
        {
            throw ConfigError{std::string{"bad collected-at timestamp: "} + e.what()};
        }
        if (c.logs_csv.empty() && c.traces_csv.empty())
            throw ConfigError{"tracing needs a logs CSV or a traces CSV"};
        if (!c.logs_csv.empty())
            require_file(c.logs_csv, "logs CSV");
        if (!c.traces_csv.empty())
            require_file(c.traces_csv, "traces CSV");
    }
    if (c.stages.rootcause && !c.findings_file.empty())
        require_file(c.findings_file, "findings file");
    try
    {
        if (!c.rules_file.empty())
            DetectConfig::from_file(c.rules_file);
        if (!c.events_file.empty())
            EventRegistry::from_file(c.events_file);
    }
    catch (const ConfigError&)
    {
        throw;
    }
    catch (const Error& e)
    {
        throw ConfigError{e.what()};
    }
}

/// Fans per-item work out to a bounded pool. Item order is the caller's; the
/// callback must write only to its own slot or take its own locks.
inline void parallel_for(std::size_t count, std::size_t workers,
    const std::function<void(std::size_t)>& body)
{
    if (workers == 0)
        workers = std::thread::hardware_concurrency();
    if (workers == 0)
        workers = 1;
    workers = std::min(workers, count);
    if (workers <= 1)
    {
        for (std::size_t i = 0; i < count; ++i)
            body(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;)
            {
                const std::size_t i = next.fetch_add(1);
                if (i >= count)
                    return;
                try
                {
                    body(i);
                }
                catch (...)
                {
                    std::lock_guard lock{error_mutex};
                    if (!first_error)
                        first_error = std::current_exception();
                }
            }
        });
    for (std::thread& t : pool)
        t.join();
    if (first_error)
        std::rethrow_exception(first_error);
}

// --- stages ---

inline StageStats run_ingest_stage(Store& store, const PipelineConfig& config,
    std::vector<std::string>* log = nullptr)
{
    StageStats stats;
    stats.stage = "ingest";

    std::ifstream in{config.contracts_csv};
    if (!in)
        throw ConfigError{"cannot open contracts CSV: " + config.contracts_csv};
    ReadResult<ContractRecord> result = read_etl_contracts(in);
    stats.inputs = result.rows.size() + result.skipped;
    stats.skipped = result.skipped;
    stats.errors = result.errors.size();
    if (log != nullptr)
        for (const std::string& e : result.errors)
            log->push_back("ingest: " + e);

    std::optional<ExplorerClient> client;
    if (config.sources_dir.empty() && !config.api_url.empty())
        client.emplace(ExplorerConfig{config.api_url, config.api_key});

    for (ContractRecord& record : result.rows)
    {
        FetchResult fetched;
        if (!config.sources_dir.empty())
            fetched = fetch_source_from_dir(config.sources_dir, record.address);
        else if (client)
            fetched = client->fetch_source(record.address);
        if (fetched.status == FetchStatus::Ok)
        {
            record.source = std::move(fetched.bundle);
            record.verified = true;
            if (record.compiler_version.empty())
                record.compiler_version = fetched.compiler_version;
            if (record.solidity_version.empty())
                record.solidity_version = fetched.solidity_version;
        }
        store.put_record(record);
        ++stats.outputs;
    }
    return stats;
}

inline StageStats run_normalize_stage(Store& store, const PipelineConfig& config,
    std::vector<std::string>* log = nullptr)
{
    StageStats stats;
    stats.stage = "normalize";
    const std::vector<ContractRecord> records = store.query_records();
    stats.inputs = records.size();

    std::vector<const ContractRecord*> with_source;
    for (const ContractRecord& r : records)
    {
        if (r.source)
            with_source.push_back(&r);
        else
            ++stats.skipped;
    }

    std::vector<std::optional<NormalizedSource>> normalized(with_source.size());
    std::vector<std::vector<std::string>> warnings(with_source.size());
    std::atomic<std::size_t> failures{0};
    parallel_for(with_source.size(), config.workers, [&](std::size_t i) {
        try
        {
            normalized[i] = normalize_source(with_source[i]->address, *with_source[i]->source,
                &warnings[i]);
        }
        catch (const Error& e)
        {
            ++failures;
            warnings[i].push_back(with_source[i]->address + ": " + e.what());
        }
    });

    for (std::size_t i = 0; i < normalized.size(); ++i)
    {
        if (log != nullptr)
            for (const std::string& w : warnings[i])
                log->push_back("normalize: " + w);
        if (normalized[i])
        {
            store.put_normalized(*normalized[i]);
            ++stats.outputs;
        }
    }
    stats.errors = failures.load();

    std::map<std::string, std::int64_t> deployed_at;
    for (const ContractRecord& r : records)
        deployed_at[r.address] = r.deployed_at;
    store.replace_groups(group_duplicates(store.all_normalized(), deployed_at));
    return stats;
}

inline StageStats run_detect_stage(Store& store, const PipelineConfig& config)
{
    StageStats stats;
    stats.stage = "detect";
    const DetectConfig rules =
        config.rules_file.empty() ? DetectConfig{} : DetectConfig::from_file(config.rules_file);

    const std::vector<NormalizedSource> sources = store.all_normalized();
    stats.inputs = sources.size();

    // Duplicate groups share canonical text, so each distinct hash is
    // classified once and the verdict fans out to every member.
    std::vector<const NormalizedSource*> unique;
    std::map<std::string, std::size_t> slot_by_hash;
    for (const NormalizedSource& src : sources)
        if (slot_by_hash.emplace(src.content_hash, unique.size()).second)
            unique.push_back(&src);

    std::vector<PatternVerdict> verdicts(unique.size());
    parallel_for(unique.size(), config.workers,
        [&](std::size_t i) { verdicts[i] = classify_pattern(*unique[i], rules); });

    for (const NormalizedSource& src : sources)
    {
        PatternVerdict v = verdicts[slot_by_hash.at(src.content_hash)];
        v.address = src.address;
        store.put_verdict(v);
        ++stats.outputs;
    }
    return stats;
}

namespace pipeline_detail
{
/// Seeded uniform sample without replacement: partial Fisher-Yates over the
/// sorted candidate list, then back to address order. The index arithmetic
/// avoids std::shuffle so the same seed picks the same subset on any
/// platform.
inline std::vector<std::string> sample_addresses(std::vector<std::string> sorted, std::size_t n,
    std::uint64_t seed)
{
    if (n == 0 || n >= sorted.size())
        return sorted;
    std::mt19937_64 rng{seed};
    for (std::size_t i = 0; i < n; ++i)
    {
        const std::size_t j = i + static_cast<std::size_t>(rng() % (sorted.size() - i));
        std::swap(sorted[i], sorted[j]);
    }
    sorted.resize(n);
    std::sort(sorted.begin(), sorted.end());
    return sorted;
}
}  // namespace pipeline_detail

inline StageStats run_trace_stage(Store& store, const PipelineConfig& config,
    std::vector<std::string>* log = nullptr)
{
    StageStats stats;
    stats.stage = "trace";
    const std::int64_t collection_date = parse_timestamp(config.collected_at);
    const EventRegistry registry = config.events_file.empty() ?
                                       EventRegistry::defaults() :
                                       EventRegistry::from_file(config.events_file);

    std::vector<std::string> candidates;
    for (const PatternVerdict& v : store.all_verdicts())
        if (v.is_upgradeable)
            candidates.push_back(v.address);
    std::sort(candidates.begin(), candidates.end());
    candidates = pipeline_detail::sample_addresses(std::move(candidates), config.sample, config.seed);
    stats.inputs = candidates.size();

    std::vector<EtlLogRow> logs;
    if (!config.logs_csv.empty())
    {
        std::ifstream in{config.logs_csv};
        if (!in)
            throw ConfigError{"cannot open logs CSV: " + config.logs_csv};
        ReadResult<EtlLogRow> rows = read_etl_logs(in);
        stats.errors += rows.errors.size();
        if (log != nullptr)
            for (const std::string& e : rows.errors)
                log->push_back("trace: logs " + e);
        logs = std::move(rows.rows);
    }
    std::vector<EtlTraceRow> traces;
    if (!config.traces_csv.empty())
    {
        std::ifstream in{config.traces_csv};
        if (!in)
            throw ConfigError{"cannot open traces CSV: " + config.traces_csv};
        ReadResult<EtlTraceRow> rows = read_etl_traces(in);
        stats.errors += rows.errors.size();
        if (log != nullptr)
            for (const std::string& e : rows.errors)
                log->push_back("trace: traces " + e);
        traces = std::move(rows.rows);
    }

    const std::set<std::string> proxy_set{candidates.begin(), candidates.end()};
    ExtractStats extract_stats;
    const std::vector<UpgradeEvent> events =
        extract_upgrade_events(logs, registry, proxy_set, &extract_stats);
    stats.errors += extract_stats.errors.size();
    if (log != nullptr)
        for (const std::string& e : extract_stats.errors)
            log->push_back("trace: " + e);

    std::map<std::string, std::vector<UpgradeEvent>> by_proxy;
    for (const UpgradeEvent& e : events)
        by_proxy[e.proxy_address].push_back(e);

    std::map<std::string, std::uint64_t> tx_by_impl;
    for (const ContractRecord& r : store.query_records())
        tx_by_impl[r.address] = r.tx_received;

    for (const std::string& proxy : candidates)
    {
        std::vector<UpgradeEvent> mine;
        if (const auto it = by_proxy.find(proxy); it != by_proxy.end())
            mine = it->second;
        if (mine.empty() && !traces.empty())
            mine = extract_delegate_targets(traces, proxy);
        if (mine.empty())
        {
            ++stats.skipped;  // untraceable: no on-chain evidence of versions
            continue;
        }
        std::vector<std::string> conflicts;
        store.put_lineage(build_lineage(proxy, std::move(mine), collection_date, tx_by_impl,
            &conflicts));
        if (log != nullptr)
            for (const std::string& c : conflicts)
                log->push_back("trace: " + c);
        ++stats.outputs;
    }
    return stats;
}

inline StageStats run_rootcause_stage(Store& store, const PipelineConfig& config,
    std::vector<std::string>* log = nullptr)
{
    StageStats stats;
    stats.stage = "rootcause";
    json findings_doc = json::object();
    if (!config.findings_file.empty())
        findings_doc = load_findings_file(config.findings_file);

    struct Pair
    {
        std::string proxy;
        const ContractVersion* from;
        const ContractVersion* to;
    };
    const std::vector<VersionLineage> lineages = store.all_lineages();
    std::vector<Pair> pairs;
    for (const VersionLineage& lineage : lineages)
        for (std::size_t i = 0; i + 1 < lineage.versions.size(); ++i)
            pairs.push_back({lineage.proxy_address, &lineage.versions[i], &lineage.versions[i + 1]});
    stats.inputs = pairs.size();

    const auto analyse = [&](const std::string& impl) {
        struct Side
        {
            NormalizedSource norm;
            std::vector<VulnerabilityFinding> findings;
            GasEstimate gas;
        };
        std::optional<Side> side;
        const auto norm = store.get_normalized(impl);
        if (!norm)
            return side;
        Side s;
        s.norm = *norm;
        s.findings = run_detectors(s.norm);
        std::vector<VulnerabilityFinding> external =
            external_findings_for(findings_doc, impl, s.norm);
        s.findings.insert(s.findings.end(), external.begin(), external.end());
        const auto record = store.get_record(impl);
        ContractRecord fallback;
        s.gas = estimate_deploy_gas_for(record ? *record : fallback, &s.norm);
        side = std::move(s);
        return side;
    };

    for (const Pair& pair : pairs)
    {
        const auto from = analyse(pair.from->implementation_address);
        const auto to = analyse(pair.to->implementation_address);
        if (!from || !to)
        {
            ++stats.skipped;  // implementation source never ingested
            if (log != nullptr)
                log->push_back("rootcause: no source for " + pair.proxy + " v" +
                               std::to_string(pair.from->version_index) + "->v" +
                               std::to_string(pair.to->version_index));
            continue;
        }
        RootCauseReport report = classify_root_causes(from->norm, to->norm, from->findings,
            to->findings, from->gas, to->gas);
        report.proxy_address = pair.proxy;
        report.from_version = pair.from->version_index;
        report.to_version = pair.to->version_index;
        store.put_report(report);
        ++stats.outputs;
    }
    return stats;
}

inline StageStats run_activity_stage(Store& store, const PipelineConfig& config)
{
    StageStats stats;
    stats.stage = "activity";
    const std::vector<VersionLineage> lineages = store.all_lineages();
    for (const VersionLineage& l : lineages)
        stats.inputs += l.versions.size();

    const ImpactReport report = impact_report(lineages, config.log_transform);
    stats.outputs = report.n;
    stats.skipped = report.zero_lifetime_excluded;

    const auto path = config.activity_report_path();
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out{path, std::ios::trunc};
    if (!out)
        throw StageError{"activity", "cannot write report: " + path.string()};
    const json j = report;
    out << j.dump(2) << '\n';
    return stats;
}

inline void write_manifest(const std::filesystem::path& path, const RunManifest& manifest)
{
    std::ofstream out{path, std::ios::trunc};
    if (!out)
        throw StageError{"manifest", "cannot write " + path.string()};
    const json j = manifest;
    out << j.dump(2) << '\n';
}

/// Runs the enabled stages in pipeline order. A failing stage halts the run
/// with the manifest written up to and including the failure; the error is
/// rethrown as StageError for the caller's exit-code mapping.
inline RunManifest run_pipeline(const PipelineConfig& config,
    std::vector<std::string>* log = nullptr)
{
    validate_pipeline_config(config);
    Store store{config.store_dir};
    RunManifest manifest;
    manifest.config = config_snapshot(config);
    const auto manifest_path = std::filesystem::path{config.store_dir} / "manifest.json";

    const auto run_stage = [&](const char* name, bool enabled, auto&& stage) {
        if (!enabled)
            return;
        const auto start = std::chrono::steady_clock::now();
        const auto elapsed_ms = [&start] {
            return std::chrono::duration<double, std::milli>(
                std::chrono::steady_clock::now() - start)
                .count();
        };
        try
        {
            StageStats stats = stage();
            stats.wall_ms = elapsed_ms();
            manifest.stages.push_back(std::move(stats));
            store.save();
        }
        catch (const std::exception& e)
        {
            StageStats failed;
            failed.stage = name;
            failed.wall_ms = elapsed_ms();
            manifest.stages.push_back(std::move(failed));
            manifest.ok = false;
            manifest.failure = std::string{name} + ": " + e.what();
            store.save();
            write_manifest(manifest_path, manifest);
            throw StageError{name, e.what()};
        }
    };

    run_stage("ingest", config.stages.ingest, [&] { return run_ingest_stage(store, config, log); });
    run_stage("normalize", config.stages.normalize,
        [&] { return run_normalize_stage(store, config, log); });
    run_stage("detect", config.stages.detect, [&] { return run_detect_stage(store, config); });
    run_stage("trace", config.stages.trace, [&] { return run_trace_stage(store, config, log); });
    run_stage("rootcause", config.stages.rootcause,
        [&] { return run_rootcause_stage(store, config, log); });
    run_stage("activity", config.stages.activity, [&] { return run_activity_stage(store, config); });

    write_manifest(manifest_path, manifest);
    return manifest;
}

// --- report rendering ---

struct ReportData
{
    PrevalenceSummary prevalence;
    std::optional<UpgradeRate> rate;
    std::map<std::string, std::size_t> root_causes;  // label name -> count
    std::optional<json> activity;                    // contents of activity.json
    bool empty = false;
};

inline ReportData collect_report_data(const Store& store,
    const std::filesystem::path& activity_path)
{
    ReportData data;
    const std::vector<PatternVerdict> verdicts = store.all_verdicts();
    if (verdicts.empty())
    {
        data.empty = true;
        return data;
    }
    data.prevalence = prevalence_summary(verdicts);

    const std::vector<VersionLineage> lineages = store.all_lineages();
    if (!lineages.empty())
        data.rate = upgrade_rate(lineages);

    for (const RootCauseLabel label : {RootCauseLabel::BugFix, RootCauseLabel::NewFeature,
             RootCauseLabel::GasOptimization, RootCauseLabel::Other})
        data.root_causes[to_string(label)] = 0;
    for (const RootCauseReport& report : store.all_reports())
        for (const RootCauseLabel label : report.labels)
            ++data.root_causes[to_string(label)];

    std::ifstream in{activity_path};
    if (in)
        data.activity = json::parse(in);
    return data;
}

inline json render_report_json(const ReportData& data)
{
    if (data.empty)
        return json{{"message", "no data"}};
    json j;
    j["prevalence"] = data.prevalence;
    j["upgrade_rate"] = data.rate ? json(*data.rate) : json(nullptr);
    j["root_causes"] = data.root_causes;
    j["activity"] = data.activity ? *data.activity : json(nullptr);
    return j;
}

inline std::string render_report_table(const ReportData& data)
{
    if (data.empty)
        return "no data\n";
    std::string out;
    char line[160];

    out += "upgrade pattern prevalence\n";
    for (const UpgradeKind kind : kAllUpgradeKinds)
    {
        const auto it = data.prevalence.counts.find(kind);
        const std::size_t count = it == data.prevalence.counts.end() ? 0 : it->second;
        std::snprintf(line, sizeof(line), "  %-28s %6zu\n", to_string(kind).c_str(), count);
        out += line;
    }
    std::snprintf(line, sizeof(line), "  total %zu, upgradeable %zu", data.prevalence.total,
        data.prevalence.upgradeable);
    out += line;
    if (data.prevalence.proportion_upgradeable)
    {
        std::snprintf(line, sizeof(line), " (%.1f%%)",
            *data.prevalence.proportion_upgradeable * 100.0);
        out += line;
    }
    out += "\n\nupgrade rate\n";
    if (data.rate)
    {
        std::snprintf(line, sizeof(line), "  %zu of %zu traced contracts upgraded",
            data.rate->upgraded, data.rate->total);
        out += line;
        if (data.rate->proportion)
        {
            std::snprintf(line, sizeof(line), " (%.1f%%)", *data.rate->proportion * 100.0);
            out += line;
        }
        std::snprintf(line, sizeof(line), ", %zu versions total\n", data.rate->total_versions);
        out += line;
    }
    else
        out += "  not computed\n";

    out += "\nroot causes\n";
    for (const auto& [label, count] : data.root_causes)
    {
        std::snprintf(line, sizeof(line), "  %-16s %6zu\n", label.c_str(), count);
        out += line;
    }

    out += "\nactivity\n";
    if (data.activity)
    {
        const json& a = *data.activity;
        std::snprintf(line, sizeof(line), "  observations %zu, excluded %zu\n",
            a.value("observations", std::size_t{0}), a.value("zero_lifetime_excluded", std::size_t{0}));
        out += line;
        const auto describe = [&](const char* key, const char* title) {
            if (!a.contains(key) || a.at(key).is_null())
                return;
            const json& model = a.at(key);
            out += "  ";
            out += title;
            out += ": coefficients [";
            const auto& coef = model.at("coefficients");
            for (std::size_t i = 0; i < coef.size(); ++i)
            {
                std::snprintf(line, sizeof(line), "%s%.6g", i ? ", " : "",
                    coef.at(i).get<double>());
                out += line;
            }
            std::snprintf(line, sizeof(line), "], r_squared %.4f, n %zu\n",
                model.at("r_squared").get<double>(), model.at("n").get<std::size_t>());
            out += line;
        };
        describe("lifetime_model", "lifetime model");
        describe("upgrade_model", "upgrade model");
        if (a.contains("note"))
            out += "  note: " + a.at("note").get<std::string>() + "\n";
    }
    else
        out += "  not computed\n";
    return out;
}

}  // namespace upscan
