// upscan: upgradeable smart contract analysis toolkit
// Copyright 2026 The upscan Authors.
// SPDX-License-Identifier: Apache-2.0

#include <upscan/pipeline.hpp>

#include <CLI11.hpp>

#include <iostream>

using namespace upscan;

namespace {

void print_log(const std::vector<std::string>& log, bool verbose)
{
    if (!verbose)
        return;
    for (const std::string& entry : log)
        std::cerr << entry << '\n';
}

/// Copies every table into a second store directory. Used when --out names a
/// different store than --in; the common in-place case skips the copy.
void save_store_as(const Store& from, const std::string& out_dir)
{
    Store out{out_dir};
    for (const ContractRecord& r : from.query_records())
        out.put_record(r);
    for (const NormalizedSource& n : from.all_normalized())
        out.put_normalized(n);
    out.replace_groups(from.all_groups());
    for (const PatternVerdict& v : from.all_verdicts())
        out.put_verdict(v);
    for (const VersionLineage& l : from.all_lineages())
        out.put_lineage(l);
    for (const RootCauseReport& r : from.all_reports())
        out.put_report(r);
    out.save();
}

void persist(Store& store, const std::string& in_dir, const std::string& out_dir)
{
    if (out_dir.empty() || out_dir == in_dir)
        store.save();
    else
        save_store_as(store, out_dir);
}

PipelineConfig single_stage(PipelineConfig cfg, const std::string& stage)
{
    cfg.stages = StageToggles{false, false, false, false, false, false};
    *cfg.stages.by_name(stage) = true;
    return cfg;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"upscan: upgradeable smart contract analysis toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    PipelineConfig cli;
    app.add_option("--store", cli.store_dir, "store directory (ndjson tables)");
    app.add_option("--workers", cli.workers, "worker pool size (0 = logical CPUs)");
    app.add_flag("--verbose", cli.verbose, "log per-row warnings and conflicts");

    std::string in_store, out_store;

    auto* ingest = app.add_subcommand("ingest", "read contract metadata and sources");
    ingest->add_option("--contracts", cli.contracts_csv, "ethereum-etl contracts CSV")->required();
    ingest->add_option("--sources-dir", cli.sources_dir,
        "directory of <address>.json explorer payloads (offline mode)");
    ingest->add_option("--api-url", cli.api_url, "explorer API base URL");
    ingest->add_option("--api-key", cli.api_key, "explorer API key")->envname("EXPLORER_API_KEY");

    auto* normalize = app.add_subcommand("normalize", "flatten sources and group duplicates");
    normalize->add_option("--in", in_store, "store to read (default --store)");
    normalize->add_option("--out", out_store, "store to write (default --in)");

    auto* detect = app.add_subcommand("detect", "classify upgrade patterns");
    detect->add_option("--in", in_store, "store to read (default --store)");
    detect->add_option("--out", out_store, "store to write (default --in)");
    detect->add_option("--rules", cli.rules_file, "rules TOML (enable/disable rule ids)");

    auto* trace = app.add_subcommand("trace", "build version lineages from logs and traces");
    trace->add_option("--in", in_store, "store to read (default --store)");
    trace->add_option("--logs", cli.logs_csv, "ethereum-etl logs CSV");
    trace->add_option("--traces", cli.traces_csv, "ethereum-etl traces CSV");
    trace->add_option("--collected-at", cli.collected_at, "data-collection timestamp (ISO 8601)")
        ->required();
    trace->add_option("--events", cli.events_file, "upgrade event registry TOML");
    trace->add_option("--sample", cli.sample, "trace a seeded uniform sample of N contracts");
    trace->add_option("--seed", cli.seed, "sample seed");

    auto* rootcause = app.add_subcommand("rootcause", "label why each upgrade happened");
    rootcause->add_option("--in", in_store, "store to read (default --store)");
    rootcause->add_option("--external-findings", cli.findings_file,
        "findings.json from external detectors");

    auto* activity = app.add_subcommand("activity", "regress transaction activity on lifetimes");
    activity->add_option("--in", in_store, "store to read (default --store)");
    activity->add_option("--out", cli.activity_out, "report JSON path (default <store>/activity.json)");
    activity->add_flag("--log-transform", cli.log_transform, "regress log1p of transaction counts");

    std::string format = "table";
    auto* report = app.add_subcommand("report", "summarize the store");
    report->add_option("--in", in_store, "store to read (default --store)");
    report->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"json", "table"}));

    std::string config_file;
    std::vector<std::string> skips;
    auto* run = app.add_subcommand("run", "run every enabled stage in order");
    run->add_option("--config", config_file, "pipeline TOML config");
    run->add_option("--contracts", cli.contracts_csv, "ethereum-etl contracts CSV");
    run->add_option("--sources-dir", cli.sources_dir, "directory of <address>.json payloads");
    run->add_option("--api-url", cli.api_url, "explorer API base URL");
    run->add_option("--api-key", cli.api_key, "explorer API key")->envname("EXPLORER_API_KEY");
    run->add_option("--logs", cli.logs_csv, "ethereum-etl logs CSV");
    run->add_option("--traces", cli.traces_csv, "ethereum-etl traces CSV");
    run->add_option("--collected-at", cli.collected_at, "data-collection timestamp (ISO 8601)");
    run->add_option("--rules", cli.rules_file, "rules TOML");
    run->add_option("--events", cli.events_file, "upgrade event registry TOML");
    run->add_option("--external-findings", cli.findings_file, "findings.json");
    run->add_option("--activity-out", cli.activity_out, "activity report JSON path");
    run->add_flag("--log-transform", cli.log_transform, "regress log1p of transaction counts");
    run->add_option("--sample", cli.sample, "trace a seeded uniform sample of N contracts");
    run->add_option("--seed", cli.seed, "sample seed");
    run->add_option("--skip", skips, "stage to skip (repeatable)")
        ->check(CLI::IsMember({"ingest", "normalize", "detect", "trace", "rootcause", "activity"}));

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try
    {
        if (!in_store.empty())
            cli.store_dir = in_store;
        std::vector<std::string> log;

        if (app.got_subcommand(ingest))
        {
            const PipelineConfig cfg = single_stage(cli, "ingest");
            validate_pipeline_config(cfg);
            Store store{cfg.store_dir};
            const StageStats stats = run_ingest_stage(store, cfg, &log);
            store.save();
            print_log(log, cfg.verbose);
            std::cout << "contracts=" << stats.outputs << " skipped=" << stats.skipped << '\n';
        }
        else if (app.got_subcommand(normalize))
        {
            const PipelineConfig cfg = single_stage(cli, "normalize");
            validate_pipeline_config(cfg);
            Store store{cfg.store_dir};
            const StageStats stats = run_normalize_stage(store, cfg, &log);
            persist(store, cfg.store_dir, out_store);
            print_log(log, cfg.verbose);
            const std::size_t groups = store.all_groups().size();
            std::cout << "groups=" << groups << " contracts=" << stats.outputs
                      << " duplicates=" << stats.outputs - groups << '\n';
        }
        else if (app.got_subcommand(detect))
        {
            const PipelineConfig cfg = single_stage(cli, "detect");
            validate_pipeline_config(cfg);
            Store store{cfg.store_dir};
            run_detect_stage(store, cfg);
            persist(store, cfg.store_dir, out_store);
            const PrevalenceSummary summary = prevalence_summary(store.all_verdicts());
            std::cout << "total=" << summary.total << " upgradeable=" << summary.upgradeable;
            if (summary.proportion_upgradeable)
            {
                char buf[32];
                std::snprintf(buf, sizeof(buf), " share=%.4f", *summary.proportion_upgradeable);
                std::cout << buf;
            }
            std::cout << '\n';
        }
        else if (app.got_subcommand(trace))
        {
            const PipelineConfig cfg = single_stage(cli, "trace");
            validate_pipeline_config(cfg);
            Store store{cfg.store_dir};
            const StageStats stats = run_trace_stage(store, cfg, &log);
            store.save();
            print_log(log, cfg.verbose);
            std::cout << "lineages=" << stats.outputs << " untraceable=" << stats.skipped << '\n';
        }
        else if (app.got_subcommand(rootcause))
        {
            const PipelineConfig cfg = single_stage(cli, "rootcause");
            validate_pipeline_config(cfg);
            Store store{cfg.store_dir};
            const StageStats stats = run_rootcause_stage(store, cfg, &log);
            store.save();
            print_log(log, cfg.verbose);
            std::cout << "reports=" << stats.outputs << " skipped=" << stats.skipped << '\n';
        }
        else if (app.got_subcommand(activity))
        {
            const PipelineConfig cfg = single_stage(cli, "activity");
            validate_pipeline_config(cfg);
            Store store{cfg.store_dir};
            const StageStats stats = run_activity_stage(store, cfg);
            std::cout << "observations=" << stats.outputs << " excluded=" << stats.skipped
                      << " report=" << cfg.activity_report_path().string() << '\n';
        }
        else if (app.got_subcommand(report))
        {
            Store store{cli.store_dir};
            const ReportData data = collect_report_data(store, cli.activity_report_path());
            if (format == "json")
                std::cout << render_report_json(data).dump(2) << '\n';
            else
                std::cout << render_report_table(data);
        }
        else if (app.got_subcommand(run))
        {
            PipelineConfig cfg;
            if (!config_file.empty())
                cfg = load_pipeline_config(config_file);

            // Command-line flags override the config file field by field.
            const auto overlay = [&](const CLI::App* owner, const std::string& name, auto member) {
                if (owner->count(name) > 0)
                    cfg.*member = cli.*member;
            };
            overlay(&app, "--store", &PipelineConfig::store_dir);
            overlay(&app, "--workers", &PipelineConfig::workers);
            overlay(&app, "--verbose", &PipelineConfig::verbose);
            overlay(run, "--contracts", &PipelineConfig::contracts_csv);
            overlay(run, "--sources-dir", &PipelineConfig::sources_dir);
            overlay(run, "--api-url", &PipelineConfig::api_url);
            overlay(run, "--api-key", &PipelineConfig::api_key);
            overlay(run, "--logs", &PipelineConfig::logs_csv);
            overlay(run, "--traces", &PipelineConfig::traces_csv);
            overlay(run, "--collected-at", &PipelineConfig::collected_at);
            overlay(run, "--rules", &PipelineConfig::rules_file);
            overlay(run, "--events", &PipelineConfig::events_file);
            overlay(run, "--external-findings", &PipelineConfig::findings_file);
            overlay(run, "--activity-out", &PipelineConfig::activity_out);
            overlay(run, "--log-transform", &PipelineConfig::log_transform);
            overlay(run, "--sample", &PipelineConfig::sample);
            overlay(run, "--seed", &PipelineConfig::seed);
            for (const std::string& stage : skips)
                *cfg.stages.by_name(stage) = false;

            const RunManifest manifest = run_pipeline(cfg, &log);
            print_log(log, cfg.verbose);
            for (const StageStats& s : manifest.stages)
                std::cout << s.stage << ": inputs=" << s.inputs << " outputs=" << s.outputs
                          << " skipped=" << s.skipped << " errors=" << s.errors << '\n';
            std::cout << "manifest="
                      << (std::filesystem::path{cfg.store_dir} / "manifest.json").string() << '\n';
        }
        return 0;
    }
    catch (const ConfigError& e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    catch (const StageError& e)
    {
        std::cerr << "stage failure: " << e.what() << '\n';
        return 3;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
