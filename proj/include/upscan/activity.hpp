// upscan: upgradeable smart contract analysis toolkit
// Copyright 2026 The upscan Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <upscan/regression.hpp>
#include <upscan/types.hpp>

#include <json.hpp>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace upscan {

constexpr double kSecondsPerDay = 86400.0;

// One regression data point: a contract version together with how long it was
// live and how much traffic it saw.
struct ActivityObservation
{
    std::string proxy_address;
    std::size_t version_index = 0;  // 1-based, matches ContractVersion
    std::uint64_t tx_received = 0;
    std::int64_t lifetime_seconds = 0;
    double lifetime_days = 0.0;
    double tx_rate = 0.0;  // transactions per day while live

    friend bool operator==(const ActivityObservation&, const ActivityObservation&) = default;
};

struct ObservationSet
{
    std::vector<ActivityObservation> observations;
    std::size_t zero_lifetime_excluded = 0;
};

// Versions with a non-positive lifetime carry no rate information (the version
// was replaced within the same timestamp), so they are dropped and counted.
inline ObservationSet observations_from_lineages(const std::vector<VersionLineage>& lineages)
{
    ObservationSet out;
    for (const auto& lineage : lineages)
    {
        for (const auto& v : lineage.versions)
        {
            if (v.lifetime_seconds <= 0)
            {
                ++out.zero_lifetime_excluded;
                continue;
            }
            ActivityObservation obs;
            obs.proxy_address = lineage.proxy_address;
            obs.version_index = v.version_index;
            obs.tx_received = v.tx_received;
            obs.lifetime_seconds = v.lifetime_seconds;
            obs.lifetime_days = static_cast<double>(v.lifetime_seconds) / kSecondsPerDay;
            obs.tx_rate = static_cast<double>(v.tx_received) / obs.lifetime_days;
            out.observations.push_back(std::move(obs));
        }
    }
    return out;
}

enum class PredictorSet
{
    Lifetime,            // tx ~ 1 + lifetime_days
    LifetimeAndVersion,  // tx ~ 1 + lifetime_days + version_index
};

// Regress the transaction count of each version on its lifetime (and
// optionally its position in the lineage). With log_transform the response is
// log1p(tx_received), which tames the heavy tail of busy contracts.
inline RegressionFit fit_activity_model(const std::vector<ActivityObservation>& observations,
    PredictorSet predictors, bool log_transform = false)
{
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    x.reserve(observations.size());
    y.reserve(observations.size());
    for (const auto& obs : observations)
    {
        std::vector<double> row{obs.lifetime_days};
        if (predictors == PredictorSet::LifetimeAndVersion)
            row.push_back(static_cast<double>(obs.version_index));
        x.push_back(std::move(row));
        const auto tx = static_cast<double>(obs.tx_received);
        y.push_back(log_transform ? std::log1p(tx) : tx);
    }
    return fit_ols_matrix(x, y);
}

// Before/after comparison for one contract: the rate of its first live
// version against the mean rate of every later one.
struct ContractImpact
{
    std::string proxy_address;
    double pre_rate = 0.0;
    double post_rate = 0.0;
    double delta = 0.0;

    friend bool operator==(const ContractImpact&, const ContractImpact&) = default;
};

inline constexpr const char* kNoUpgradeEffectNote = "no upgrade effect estimable";

struct ImpactReport
{
    std::size_t n = 0;
    std::size_t zero_lifetime_excluded = 0;
    bool log_transform = false;
    std::optional<RegressionFit> lifetime_model;
    std::optional<RegressionFit> upgrade_model;
    std::optional<double> version_coefficient;  // upgrade_model's version_index slope
    std::vector<ContractImpact> per_contract;
    std::string note;  // set when the upgrade effect cannot be estimated
};

inline ImpactReport impact_report(const std::vector<VersionLineage>& lineages,
    bool log_transform = false)
{
    const ObservationSet set = observations_from_lineages(lineages);
    ImpactReport report;
    report.n = set.observations.size();
    report.zero_lifetime_excluded = set.zero_lifetime_excluded;
    report.log_transform = log_transform;

    try
    {
        report.lifetime_model =
            fit_activity_model(set.observations, PredictorSet::Lifetime, log_transform);
    }
    catch (const DegenerateDesignError&)
    {
    }

    // The version coefficient is only identified when some contract actually
    // moved past its first version.
    bool version_varies = false;
    for (const auto& obs : set.observations)
        version_varies |= obs.version_index != 1;
    if (version_varies)
    {
        try
        {
            report.upgrade_model =
                fit_activity_model(set.observations, PredictorSet::LifetimeAndVersion,
                    log_transform);
            report.version_coefficient = report.upgrade_model->coefficients[2];
        }
        catch (const DegenerateDesignError&)
        {
        }
    }
    if (!report.version_coefficient)
        report.note = kNoUpgradeEffectNote;

    for (const auto& lineage : lineages)
    {
        std::vector<const ActivityObservation*> mine;
        for (const auto& obs : set.observations)
            if (obs.proxy_address == lineage.proxy_address)
                mine.push_back(&obs);
        if (mine.size() < 2)
            continue;
        ContractImpact impact;
        impact.proxy_address = lineage.proxy_address;
        impact.pre_rate = mine.front()->tx_rate;
        double post = 0.0;
        for (std::size_t i = 1; i < mine.size(); ++i)
            post += mine[i]->tx_rate;
        impact.post_rate = post / static_cast<double>(mine.size() - 1);
        impact.delta = impact.post_rate - impact.pre_rate;
        report.per_contract.push_back(std::move(impact));
    }
    return report;
}

inline void to_json(json& j, const RegressionFit& fit)
{
    j = json{{"coefficients", fit.coefficients}, {"r_squared", fit.r_squared}, {"n", fit.n}};
}

inline void to_json(json& j, const ContractImpact& impact)
{
    j = json{{"proxy_address", impact.proxy_address}, {"pre_rate", impact.pre_rate},
        {"post_rate", impact.post_rate}, {"delta", impact.delta}};
}

inline void to_json(json& j, const ImpactReport& report)
{
    j = json{{"observations", report.n},
        {"zero_lifetime_excluded", report.zero_lifetime_excluded},
        {"log_transform", report.log_transform}, {"per_contract", report.per_contract}};
    j["lifetime_model"] = report.lifetime_model ? json(*report.lifetime_model) : json(nullptr);
    j["upgrade_model"] = report.upgrade_model ? json(*report.upgrade_model) : json(nullptr);
    j["version_coefficient"] =
        report.version_coefficient ? json(*report.version_coefficient) : json(nullptr);
    if (!report.note.empty())
        j["note"] = report.note;
}

}  // namespace upscan
