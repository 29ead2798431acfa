// upscan: upgradeable smart contract analysis toolkit
// Copyright 2026 The upscan Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <upscan/detect.hpp>
#include <upscan/keccak.hpp>
#include <upscan/types.hpp>

#include <algorithm>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace upscan {

struct DetectorSet
{
    bool reentrancy = true;
    bool tx_origin_auth = true;
    bool unchecked_call = true;
    bool unprotected_selfdestruct = true;
};

inline std::string finding_fingerprint(const std::string& category, const std::string& slice)
{
    return keccak256_hex(category + "\n" + slice);
}

namespace detector_detail
{
inline std::string slice_text(const std::vector<std::string>& lines, std::size_t begin,
    std::size_t end)
{
    std::string out;
    for (std::size_t i = begin; i <= end && i < lines.size(); ++i)
    {
        if (!out.empty())
            out.push_back('\n');
        out += lines[i];
    }
    return out;
}

inline VulnerabilityFinding make_finding(const std::vector<std::string>& lines,
    std::string detector_id, std::string category, std::size_t line_begin, std::size_t line_end)
{
    VulnerabilityFinding f;
    f.detector_id = std::move(detector_id);
    f.category = std::move(category);
    f.line_begin = line_begin;
    f.line_end = line_end;
    f.fingerprint = finding_fingerprint(f.category, slice_text(lines, line_begin, line_end));
    return f;
}

inline bool is_external_call_name(const Token& t)
{
    return t.is_word("call") || t.is_word("send") || t.is_word("delegatecall") ||
           t.is_word("callcode") || t.is_word("staticcall");
}

// True when the call's return value feeds into anything: an assignment, a
// condition, a require/assert, or a return. Scans back to the start of the
// enclosing statement.
inline bool call_result_is_used(const std::vector<Token>& toks, std::size_t call_idx,
    std::size_t body_begin)
{
    for (std::size_t i = call_idx; i > body_begin;)
    {
        --i;
        const Token& t = toks[i];
        if (t.is_punct(";") || t.is_punct("{") || t.is_punct("}"))
            return false;
        if (t.is_punct("=") || t.is_punct(":=") || t.is_word("require") || t.is_word("assert") ||
            t.is_word("if") || t.is_word("while") || t.is_word("return"))
            return true;
    }
    return false;
}

inline bool has_sender_guard(const Structure& s, const FunctionInfo& fn)
{
    if (detect_detail::range_has_sender_identity_check(s, fn.body, nullptr))
        return true;
    for (const std::string& name : fn.modifiers)
    {
        const ModifierInfo* m = s.find_modifier(name);
        if (m && detect_detail::range_has_sender_identity_check(s, m->body, nullptr))
            return true;
    }
    return false;
}
}  // namespace detector_detail

// Lightweight lexical detectors. They trade recall for determinism: each
// looks for one canonical bad shape and reports a single-line span whose
// text anchors the fingerprint.
inline std::vector<VulnerabilityFinding> run_detectors(const NormalizedSource& src,
    const DetectorSet& set = {})
{
    using namespace detector_detail;
    const std::vector<std::string> lines = src.lines();
    const Structure s = analyze_structure(lex(src.canonical_text));
    const std::vector<Token>& toks = s.tokens;
    std::vector<VulnerabilityFinding> findings;

    for (const ContractInfo& c : s.contracts)
    {
        for (const FunctionInfo& fn : c.functions)
        {
            if (fn.body.empty())
                continue;

            // Position of the first external value call in this body, for the
            // write-after-call check.
            std::optional<std::size_t> first_call;
            for (std::size_t i = fn.body.begin; i < fn.body.end; ++i)
            {
                const Token& t = toks[i];
                const bool member_call = i > fn.body.begin && toks[i - 1].is_punct(".") &&
                                         is_external_call_name(t) && i + 1 < fn.body.end &&
                                         (toks[i + 1].is_punct("(") || toks[i + 1].is_punct("{"));

                if (set.unchecked_call && member_call &&
                    !call_result_is_used(toks, i - 1, fn.body.begin))
                    findings.push_back(make_finding(lines, "builtin", "unchecked-call", t.line, t.line));

                if (member_call && !first_call)
                    first_call = i;

                if (set.tx_origin_auth && t.is_word("origin") && i >= 2 &&
                    toks[i - 1].is_punct(".") && toks[i - 2].is_word("tx"))
                {
                    const bool compared = (i + 1 < fn.body.end && (toks[i + 1].is_punct("==") ||
                                                                   toks[i + 1].is_punct("!="))) ||
                                          (i >= 3 && (toks[i - 3].is_punct("==") ||
                                                      toks[i - 3].is_punct("!=")));
                    if (compared)
                        findings.push_back(
                            make_finding(lines, "builtin", "tx-origin-auth", t.line, t.line));
                }

                if (set.unprotected_selfdestruct &&
                    (t.is_word("selfdestruct") || t.is_word("suicide")) &&
                    !has_sender_guard(s, fn))
                    findings.push_back(
                        make_finding(lines, "builtin", "unprotected-selfdestruct", t.line, t.line));
            }

            if (set.reentrancy && first_call)
            {
                std::vector<detect_detail::StateWrite> writes;
                std::vector<detect_detail::SlotWrite> slot_writes;
                detect_detail::collect_writes(s, fn.body, writes, slot_writes);
                for (const detect_detail::StateWrite& w : writes)
                {
                    // Writes lexically after the call line run after it too;
                    // the canonical form holds one statement per source line.
                    if (w.line > toks[*first_call].line)
                        findings.push_back(
                            make_finding(lines, "builtin", "reentrancy", w.line, w.line));
                }
            }
        }
    }

    std::stable_sort(findings.begin(), findings.end(),
        [](const VulnerabilityFinding& a, const VulnerabilityFinding& b) {
            if (a.line_begin != b.line_begin)
                return a.line_begin < b.line_begin;
            return a.category < b.category;
        });
    return findings;
}

// Findings produced by out-of-process tools, keyed by contract address:
// { "<address>": [ {"detector": str, "category": str,
//                   "line_start": int, "line_end": int} ] }
// Imported entries carry detector id "external" so downstream reports can
// distinguish them from the built-ins.
inline std::vector<VulnerabilityFinding> external_findings_for(const json& doc,
    const std::string& address, const NormalizedSource& src)
{
    using namespace detector_detail;
    std::vector<VulnerabilityFinding> out;
    if (!doc.is_object())
        throw FormatError{"findings file must be a JSON object keyed by address"};
    const auto it = doc.find(address);
    if (it == doc.end())
        return out;
    if (!it->is_array())
        throw FormatError{"findings for " + address + " must be an array"};
    const std::vector<std::string> lines = src.lines();
    for (const json& entry : *it)
    {
        if (!entry.is_object() || !entry.contains("category") || !entry.contains("line_start") ||
            !entry.contains("line_end"))
            throw FormatError{"findings entry for " + address +
                              " needs category, line_start, and line_end"};
        const auto line_start = entry.at("line_start").get<std::int64_t>();
        const auto line_end = entry.at("line_end").get<std::int64_t>();
        if (line_start < 0 || line_end < line_start ||
            static_cast<std::size_t>(line_end) >= lines.size())
            throw FormatError{"findings entry for " + address + " has line span " +
                              std::to_string(line_start) + ".." + std::to_string(line_end) +
                              " outside 0.." + std::to_string(lines.size() - 1)};
        out.push_back(make_finding(lines, "external", entry.at("category").get<std::string>(),
            static_cast<std::size_t>(line_start), static_cast<std::size_t>(line_end)));
    }
    return out;
}

inline json load_findings_file(const std::string& path)
{
    std::ifstream in{path};
    if (!in)
        throw FormatError{"cannot open findings file: " + path};
    json doc;
    try
    {
        doc = json::parse(in);
    }
    catch (const json::parse_error& e)
    {
        throw FormatError{"findings file " + path + ": " + e.what()};
    }
    if (!doc.is_object())
        throw FormatError{"findings file " + path + " must be a JSON object keyed by address"};
    return doc;
}

}  // namespace upscan
