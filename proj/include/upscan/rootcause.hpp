// upscan: upgradeable smart contract analysis toolkit
// Copyright 2026 The upscan Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <upscan/diff.hpp>
#include <upscan/gas.hpp>
#include <upscan/types.hpp>

#include <set>
#include <string>
#include <vector>

namespace upscan {

namespace rootcause_detail
{
inline bool line_in_spans(std::size_t line, const std::vector<VulnerabilityFinding>& findings)
{
    for (const VulnerabilityFinding& f : findings)
        if (line >= f.line_begin && line <= f.line_end)
            return true;
    return false;
}
}  // namespace rootcause_detail

// Labels one upgrade by comparing consecutive versions:
//   BugFix           a finding present in v1 has no fingerprint match in v2
//   NewFeature       a line was added outside v2's finding spans
//   Other            a line was removed outside v1's finding spans
//   GasOptimization  the static deploy estimate dropped
// Every label appears exactly when its evidence is non-empty, and the
// evidence itself travels with the report.
inline RootCauseReport classify_root_causes(const NormalizedSource& v1, const NormalizedSource& v2,
    const std::vector<VulnerabilityFinding>& findings1,
    const std::vector<VulnerabilityFinding>& findings2, const GasEstimate& gas1,
    const GasEstimate& gas2)
{
    using rootcause_detail::line_in_spans;
    RootCauseReport report;

    std::set<std::string> fingerprints2;
    for (const VulnerabilityFinding& f : findings2)
        fingerprints2.insert(f.fingerprint);
    for (const VulnerabilityFinding& f : findings1)
        if (!fingerprints2.count(f.fingerprint))
            report.bug_fixes.push_back(f);

    const VersionDiff diff = diff_versions(v1, v2);
    for (const DiffLine& added : diff.added_lines)
        if (!line_in_spans(added.line, findings2))
            report.new_features.push_back(added);
    for (const DiffLine& removed : diff.removed_lines)
        if (!line_in_spans(removed.line, findings1))
            report.other.push_back(removed);

    report.gas_notes = std::make_pair(gas1, gas2);

    if (!report.bug_fixes.empty())
        report.labels.push_back(RootCauseLabel::BugFix);
    if (!report.new_features.empty())
        report.labels.push_back(RootCauseLabel::NewFeature);
    if (gas2.deploy_gas < gas1.deploy_gas)
        report.labels.push_back(RootCauseLabel::GasOptimization);
    if (!report.other.empty())
        report.labels.push_back(RootCauseLabel::Other);
    return report;
}

}  // namespace upscan
