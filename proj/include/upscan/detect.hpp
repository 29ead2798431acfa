// upscan: upgradeable smart contract analysis toolkit
// Copyright 2026 The upscan Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <upscan/errors.hpp>
#include <upscan/slots.hpp>
#include <upscan/structure.hpp>
#include <upscan/toml_lite.hpp>
#include <upscan/types.hpp>

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace upscan {

// Rule identifiers recognized by the classifier. Disabling a branch's primary
// rule (the first one listed per group) removes that branch entirely; the
// secondary ids only control whether their evidence is recorded.
inline const std::set<std::string>& known_rule_ids() {
    static const std::set<std::string> ids = {
        "diamond_cut_function",
        "diamond_selector_mapping",
        "uups_proxiable_marker",
        "uups_upgrade_mutator",
        "transparent_impl_mutator",
        "transparent_eip1967_slot",
        "proxy_delegatecall",
        "forward_fixed_target",
        "datasep_authorized_setter",
        "datasep_accessor_shape",
        "strategy_swappable_ref",
        "strategy_direct_call",
        // Reserved for future pattern variants; no detector logic yet.
        "beacon_proxy",
        "metaproxy_3448",
    };
    return ids;
}

struct DetectConfig {
    std::set<std::string> disabled_rules = {"beacon_proxy", "metaproxy_3448"};
    double accessor_ratio_threshold = 0.8;

    bool enabled(const std::string& rule_id) const {
        return disabled_rules.count(rule_id) == 0;
    }

    static DetectConfig from_toml(const toml::Document& doc) {
        DetectConfig cfg;
        if (const toml::Table* rules = doc.table("rules")) {
            auto it = rules->find("disabled");
            if (it != rules->end()) {
                for (const std::string& id : it->second.as_string_array()) {
                    if (!known_rule_ids().count(id))
                        throw ConfigError("unknown rule id in rules.disabled: " + id);
                    cfg.disabled_rules.insert(id);
                }
            }
        }
        if (const toml::Table* th = doc.table("thresholds")) {
            auto it = th->find("data_separation_accessor_ratio");
            if (it != th->end()) {
                cfg.accessor_ratio_threshold = it->second.as_number();
                if (cfg.accessor_ratio_threshold < 0.0 || cfg.accessor_ratio_threshold > 1.0)
                    throw ConfigError("data_separation_accessor_ratio must be in [0, 1]");
            }
        }
        return cfg;
    }

    static DetectConfig from_file(const std::string& path) {
        return from_toml(toml::parse_file(path));
    }
};

// Where a delegatecall forwards to, resolved as far as the token stream
// allows. Exactly one of `var` / `slot` is non-empty for usable receivers.
struct ReceiverRef {
    std::string var;   // state variable read directly
    std::string slot;  // storage slot key: "0x..." literal value or "var:<name>"
    std::size_t line = 0;
};

struct MutatorInfo {
    std::string function_name;
    std::string variable;  // state var name or slot key being rewritten
    std::size_t line = 0;
};

namespace detect_detail {

struct StateWrite {
    std::string var;
    bool via_index = false;
    std::size_t line = 0;
};

struct SlotWrite {
    std::string key;
    std::size_t line = 0;
};

inline bool is_assign_op(const Token& t) {
    if (t.kind != TokenKind::Punct) return false;
    static const std::set<std::string> ops = {"=",  "+=", "-=",  "*=",  "/=", "%=",
                                              "|=", "&=", "^=", "<<=", ">>="};
    return ops.count(t.text) != 0;
}

inline std::string slot_key(const Structure& s, const Token& t) {
    if (t.kind == TokenKind::HexNumber) return to_lower_ascii(t.text);
    if (t.kind == TokenKind::Identifier) {
        if (const StateVarInfo* v = s.find_state_var(t.text); v && !v->const_hex.empty())
            return v->const_hex;
        return "var:" + t.text;
    }
    return {};
}

// Locals bound via `x := sload(slot)` in assembly blocks, so that a later
// `delegatecall(gas(), x, ...)` can be traced back to the slot.
inline std::map<std::string, std::string> sload_locals(const Structure& s) {
    std::map<std::string, std::string> out;
    const auto& toks = s.tokens;
    for (std::size_t i = 0; i + 4 < toks.size(); ++i) {
        if (toks[i].kind != TokenKind::Identifier) continue;
        if (!toks[i + 1].is_punct(":=")) continue;
        if (!toks[i + 2].is_word("sload")) continue;
        if (!toks[i + 3].is_punct("(")) continue;
        std::string key = slot_key(s, toks[i + 4]);
        if (!key.empty()) out[toks[i].text] = key;
    }
    return out;
}

// Splits the argument list opening at `open` (index of '(') into top-level
// comma-separated token ranges. Returns empty on malformed input.
inline std::vector<TokenRange> call_args(const std::vector<Token>& toks, std::size_t open) {
    std::vector<TokenRange> args;
    if (open >= toks.size() || !toks[open].is_punct("(")) return args;
    int depth = 1;
    std::size_t start = open + 1;
    for (std::size_t i = open + 1; i < toks.size(); ++i) {
        const Token& t = toks[i];
        if (t.is_punct("(") || t.is_punct("[") || t.is_punct("{")) {
            ++depth;
        } else if (t.is_punct(")") || t.is_punct("]") || t.is_punct("}")) {
            --depth;
            if (depth == 0) {
                if (i > start) args.push_back({start, i});
                return args;
            }
        } else if (depth == 1 && t.is_punct(",")) {
            args.push_back({start, i});
            start = i + 1;
        }
    }
    return {};  // unbalanced
}

inline void resolve_receiver_token(const Structure& s,
                                   const std::map<std::string, std::string>& locals,
                                   const Token& t, ReceiverRef& ref) {
    if (t.kind != TokenKind::Identifier) return;
    if (s.find_state_var(t.text)) {
        ref.var = t.text;
        return;
    }
    auto it = locals.find(t.text);
    if (it != locals.end()) ref.slot = it->second;
}

inline std::vector<ReceiverRef> find_delegatecall_receivers(const Structure& s) {
    std::vector<ReceiverRef> out;
    const auto& toks = s.tokens;
    auto locals = sload_locals(s);
    for (std::size_t k = 0; k < toks.size(); ++k) {
        if (!toks[k].is_word("delegatecall")) continue;
        ReceiverRef ref;
        ref.line = toks[k].line;
        if (k >= 2 && toks[k - 1].is_punct(".")) {
            // `x.delegatecall(...)` or `address(x).delegatecall(...)`
            const Token& recv = toks[k - 2];
            if (recv.kind == TokenKind::Identifier) {
                resolve_receiver_token(s, locals, recv, ref);
            } else if (recv.is_punct(")") && k >= 4) {
                // Walk back to the matching '(': accept only `( <ident> )`.
                std::size_t close = k - 2;
                int depth = 1;
                std::size_t open = close;
                while (open > 0) {
                    --open;
                    if (toks[open].is_punct(")")) ++depth;
                    else if (toks[open].is_punct("(")) {
                        --depth;
                        if (depth == 0) break;
                    }
                }
                if (close == open + 2 && toks[open + 1].kind == TokenKind::Identifier)
                    resolve_receiver_token(s, locals, toks[open + 1], ref);
            }
        } else if (k + 1 < toks.size() && toks[k + 1].is_punct("(")) {
            // Assembly form: delegatecall(gas, target, in, insize, out, outsize)
            auto args = call_args(toks, k + 1);
            if (args.size() >= 2) {
                TokenRange a = args[1];
                std::size_t n = a.end - a.begin;
                if (n == 1) {
                    resolve_receiver_token(s, locals, toks[a.begin], ref);
                } else if (n >= 3 && toks[a.begin].is_word("sload") &&
                           toks[a.begin + 1].is_punct("(")) {
                    ref.slot = slot_key(s, toks[a.begin + 2]);
                }
            }
        }
        out.push_back(ref);
    }
    return out;
}

inline void collect_writes(const Structure& s, TokenRange body,
                           std::vector<StateWrite>& state_writes,
                           std::vector<SlotWrite>& slot_writes) {
    const auto& toks = s.tokens;
    for (std::size_t j = body.begin; j < body.end && j < toks.size(); ++j) {
        const Token& t = toks[j];
        if (t.is_word("sstore") && j + 2 < body.end && toks[j + 1].is_punct("(")) {
            std::string key = slot_key(s, toks[j + 2]);
            if (!key.empty()) slot_writes.push_back({key, t.line});
            continue;
        }
        // StorageSlot helper: getAddressSlot(SLOT).value = ...
        if (t.is_word("getAddressSlot") && j + 6 < body.end && toks[j + 1].is_punct("(") &&
            toks[j + 3].is_punct(")") && toks[j + 4].is_punct(".") &&
            toks[j + 5].is_word("value") && toks[j + 6].is_punct("=")) {
            std::string key = slot_key(s, toks[j + 2]);
            if (!key.empty()) slot_writes.push_back({key, t.line});
            continue;
        }
        if (t.kind != TokenKind::Identifier) continue;
        if (j > body.begin && toks[j - 1].is_punct(".")) continue;  // member access
        if (!s.find_state_var(t.text)) continue;
        std::size_t k = j + 1;
        bool via_index = false;
        while (k < body.end && toks[k].is_punct("[")) {
            via_index = true;
            int depth = 1;
            ++k;
            while (k < body.end && depth > 0) {
                if (toks[k].is_punct("[")) ++depth;
                else if (toks[k].is_punct("]")) --depth;
                ++k;
            }
        }
        if (k < body.end && is_assign_op(toks[k]))
            state_writes.push_back({t.text, via_index, t.line});
    }
}

struct FunctionWrites {
    const ContractInfo* contract = nullptr;
    const FunctionInfo* fn = nullptr;
    std::vector<StateWrite> state_writes;
    std::vector<SlotWrite> slot_writes;
};

inline std::vector<FunctionWrites> collect_all_writes(const Structure& s) {
    std::vector<FunctionWrites> out;
    for (const ContractInfo& c : s.contracts) {
        for (const FunctionInfo& f : c.functions) {
            if (f.body.empty()) continue;
            FunctionWrites fw;
            fw.contract = &c;
            fw.fn = &f;
            collect_writes(s, f.body, fw.state_writes, fw.slot_writes);
            out.push_back(std::move(fw));
        }
    }
    return out;
}

inline bool slot_keys_match(const std::string& a, const std::string& b) {
    return !a.empty() && a == b;
}

// True when the token range contains an identity test against msg.sender:
// `msg.sender == X`, `X == msg.sender`, or a mapping lookup `X[msg.sender]`
// used as a whole condition (followed by ')', ',', '&&' or '||').
inline bool range_has_sender_identity_check(const Structure& s, TokenRange range,
                                            std::string* guard_var) {
    const auto& toks = s.tokens;
    for (std::size_t j = range.begin; j + 2 < range.end && j + 2 < toks.size(); ++j) {
        if (!toks[j].is_word("msg") || !toks[j + 1].is_punct(".") ||
            !toks[j + 2].is_word("sender"))
            continue;
        // msg.sender == X
        if (j + 4 < range.end && toks[j + 3].is_punct("==") &&
            toks[j + 4].kind == TokenKind::Identifier) {
            if (guard_var) *guard_var = toks[j + 4].text;
            return true;
        }
        // X == msg.sender
        if (j >= 2 && toks[j - 1].is_punct("==") &&
            toks[j - 2].kind == TokenKind::Identifier) {
            if (guard_var) *guard_var = toks[j - 2].text;
            return true;
        }
        // X[msg.sender] as a whole condition
        if (j >= 2 && toks[j - 1].is_punct("[") &&
            toks[j - 2].kind == TokenKind::Identifier && j + 3 < range.end &&
            toks[j + 3].is_punct("]")) {
            if (j + 4 < range.end &&
                (toks[j + 4].is_punct(")") || toks[j + 4].is_punct(",") ||
                 toks[j + 4].is_punct("&&") || toks[j + 4].is_punct("||"))) {
                if (guard_var) *guard_var = toks[j - 2].text;
                return true;
            }
        }
    }
    return false;
}

inline bool is_externally_callable(const FunctionInfo& f) {
    return f.visibility.empty() || f.visibility == "public" || f.visibility == "external";
}

}  // namespace detect_detail

// Every line on which a delegatecall appears, outside comments and strings.
inline std::vector<EvidenceSpan> contains_delegatecall(const NormalizedSource& src) {
    std::vector<EvidenceSpan> spans;
    std::vector<Token> toks = lex(src.canonical_text);
    std::vector<std::string> lines = src.lines();
    std::size_t last_line = SIZE_MAX;
    for (const Token& t : toks) {
        if (!t.is_word("delegatecall")) continue;
        if (t.line == last_line) continue;  // one span per line
        last_line = t.line;
        EvidenceSpan span;
        span.rule_id = "proxy_delegatecall";
        span.line_begin = t.line;
        span.line_end = t.line;
        span.matched = t.line < lines.size() ? lines[t.line] : t.text;
        spans.push_back(std::move(span));
    }
    return spans;
}

// Finds a function outside the constructor that rewrites the storage location
// a delegatecall forwards to. Empty when the source has no delegatecall or no
// such writable link exists.
inline std::optional<MutatorInfo> find_implementation_mutator(const NormalizedSource& src) {
    using namespace detect_detail;
    Structure s = analyze_structure(lex(src.canonical_text));
    auto receivers = find_delegatecall_receivers(s);
    if (receivers.empty()) return std::nullopt;
    auto writes = collect_all_writes(s);
    for (const ReceiverRef& r : receivers) {
        for (const FunctionWrites& fw : writes) {
            if (fw.fn->is_constructor) continue;
            if (!r.var.empty()) {
                for (const StateWrite& w : fw.state_writes)
                    if (w.var == r.var && !w.via_index)
                        return MutatorInfo{fw.fn->name, r.var, w.line};
            }
            if (!r.slot.empty()) {
                for (const SlotWrite& w : fw.slot_writes)
                    if (slot_keys_match(w.key, r.slot))
                        return MutatorInfo{fw.fn->name, r.slot, w.line};
            }
        }
    }
    return std::nullopt;
}

namespace detect_detail {

struct Analysis {
    Structure structure;
    std::vector<std::string> lines;
    std::vector<ReceiverRef> receivers;
    std::vector<FunctionWrites> writes;
};

inline EvidenceSpan make_span(const Analysis& a, std::string rule_id, std::size_t line) {
    EvidenceSpan span;
    span.rule_id = std::move(rule_id);
    if (line >= a.lines.size()) line = a.lines.empty() ? 0 : a.lines.size() - 1;
    span.line_begin = line;
    span.line_end = line;
    span.matched = line < a.lines.size() ? a.lines[line] : std::string();
    return span;
}

// First token matching `word`, or nullptr.
inline const Token* find_word(const Structure& s, const char* word) {
    for (const Token& t : s.tokens)
        if (t.is_word(word)) return &t;
    return nullptr;
}

inline const Token* find_hex_constant(const Structure& s, const std::string& value) {
    for (const Token& t : s.tokens)
        if (t.kind == TokenKind::HexNumber && to_lower_ascii(t.text) == value) return &t;
    return nullptr;
}

inline bool writes_eip1967_impl_slot(const FunctionWrites& fw) {
    for (const SlotWrite& w : fw.slot_writes)
        if (w.key == kEip1967ImplementationSlot || w.key == kEip1822ProxiableSlot) return true;
    return false;
}

inline bool var_is_address_typed(const Structure& s, const std::string& name) {
    const StateVarInfo* v = s.find_state_var(name);
    return v && v->type_text.rfind("address", 0) == 0 && !v->is_constant && !v->is_mapping;
}

}  // namespace detect_detail

inline PatternVerdict classify_pattern(const NormalizedSource& src,
                                       const DetectConfig& cfg = {}) {
    using namespace detect_detail;
    Analysis a;
    a.structure = analyze_structure(lex(src.canonical_text));
    a.lines = src.lines();
    a.receivers = find_delegatecall_receivers(a.structure);
    a.writes = collect_all_writes(a.structure);
    const Structure& s = a.structure;

    PatternVerdict verdict;
    verdict.address = src.address;
    verdict.kind = UpgradeKind::NotUpgradeable;

    std::vector<EvidenceSpan> evidence;
    auto fire = [&](const std::string& rule_id, std::size_t line) {
        if (cfg.enabled(rule_id)) evidence.push_back(make_span(a, rule_id, line));
    };
    auto finish = [&]() -> PatternVerdict& {
        verdict.evidence = std::move(evidence);
        verdict.is_upgradeable = is_upgradeable_kind(verdict.kind);
        return verdict;
    };

    bool has_delegatecall = !a.receivers.empty();
    if (has_delegatecall && cfg.enabled("proxy_delegatecall"))
        for (const EvidenceSpan& span : contains_delegatecall(src)) evidence.push_back(span);

    // Diamond: a diamondCut entry point plus selector-to-facet routing state.
    const Token* cut_tok = nullptr;
    for (std::size_t i = 0; i + 1 < s.tokens.size(); ++i) {
        if (s.tokens[i].is_word("diamondCut") && s.tokens[i + 1].is_punct("(")) {
            cut_tok = &s.tokens[i];
            break;
        }
    }
    const StateVarInfo* selector_map = nullptr;
    for (const ContractInfo& c : s.contracts)
        for (const StateVarInfo& v : c.state_vars)
            if (v.is_mapping && v.type_text.find("bytes4=>") != std::string::npos) {
                selector_map = &v;
                break;
            }
    if (cut_tok && cfg.enabled("diamond_cut_function")) {
        fire("diamond_cut_function", cut_tok->line);
        if (selector_map) fire("diamond_selector_mapping", selector_map->line);
        verdict.kind = UpgradeKind::UpgradeableProxyDiamond;
        return finish();
    }

    // UUPS: upgrade logic lives behind the proxy, marked by the proxiable
    // interface or the 1822/1967 implementation slots, plus a mutator.
    if (cfg.enabled("uups_proxiable_marker")) {
        const Token* marker = find_word(s, "proxiableUUID");
        if (!marker) marker = find_hex_constant(s, kEip1822ProxiableSlot);
        if (!marker) {
            for (const ContractInfo& c : s.contracts)
                for (const StateVarInfo& v : c.state_vars)
                    if (v.const_hex == kEip1822ProxiableSlot && !marker) {
                        marker = &s.tokens[0];  // line fixed below
                        fire("uups_proxiable_marker", v.line);
                    }
        } else {
            fire("uups_proxiable_marker", marker->line);
        }
        if (marker) {
            std::optional<MutatorInfo> mut;
            // Mutator may be a tracked delegatecall receiver write or, in the
            // logic contract itself, a direct slot / address-variable rewrite.
            if (has_delegatecall) mut = find_implementation_mutator(src);
            if (!mut) {
                for (const FunctionWrites& fw : a.writes) {
                    if (fw.fn->is_constructor) continue;
                    if (writes_eip1967_impl_slot(fw)) {
                        mut = MutatorInfo{fw.fn->name, fw.slot_writes.front().key,
                                          fw.slot_writes.front().line};
                        break;
                    }
                    for (const StateWrite& w : fw.state_writes)
                        if (!w.via_index && var_is_address_typed(s, w.var)) {
                            mut = MutatorInfo{fw.fn->name, w.var, w.line};
                            break;
                        }
                    if (mut) break;
                }
            }
            if (mut) {
                if (cfg.enabled("uups_upgrade_mutator")) fire("uups_upgrade_mutator", mut->line);
                verdict.kind = UpgradeKind::UpgradeableProxyUUPS;
                return finish();
            }
        }
    }

    // Transparent proxy: delegatecall whose target is rewritable at runtime.
    if (has_delegatecall && cfg.enabled("transparent_impl_mutator")) {
        std::optional<MutatorInfo> mut = find_implementation_mutator(src);
        if (mut) {
            fire("transparent_impl_mutator", mut->line);
            if (const Token* slot_tok = find_hex_constant(s, kEip1967ImplementationSlot))
                fire("transparent_eip1967_slot", slot_tok->line);
            verdict.kind = UpgradeKind::UpgradeableProxyTransparent;
            return finish();
        }
    }

    // Forwarding proxy: delegatecall with no way to retarget it.
    if (has_delegatecall && cfg.enabled("forward_fixed_target")) {
        fire("forward_fixed_target", a.receivers.front().line);
        verdict.kind = UpgradeKind::ForwardProxy;
        return finish();
    }

    // Data separation: storage kept behind authorized setters so a fresh
    // logic contract can be pointed at it later.
    if (!has_delegatecall && cfg.enabled("datasep_authorized_setter")) {
        const FunctionWrites* auth_setter = nullptr;
        std::string guard_var;
        for (const FunctionWrites& fw : a.writes) {
            if (fw.fn->is_constructor || !is_externally_callable(*fw.fn)) continue;
            if (fw.state_writes.empty()) continue;
            std::string g;
            bool guarded = range_has_sender_identity_check(s, fw.fn->body, &g);
            if (!guarded) {
                for (const std::string& mname : fw.fn->modifiers) {
                    const ModifierInfo* m = s.find_modifier(mname);
                    if (m && range_has_sender_identity_check(s, m->body, &g)) {
                        guarded = true;
                        break;
                    }
                }
            }
            if (!guarded) continue;
            // The guard must compare against state this contract can change
            // after deployment, otherwise the authority is frozen.
            const StateVarInfo* gv = s.find_state_var(g);
            if (!gv || gv->is_constant) continue;
            bool guard_writable = false;
            for (const FunctionWrites& other : a.writes) {
                if (other.fn->is_constructor) continue;
                for (const StateWrite& w : other.state_writes)
                    if (w.var == g) guard_writable = true;
            }
            if (!guard_writable) continue;
            auth_setter = &fw;
            guard_var = g;
            break;
        }
        if (auth_setter) {
            std::size_t public_fns = 0;
            std::size_t accessors = 0;
            std::size_t first_public_line = 0;
            for (const FunctionWrites& fw : a.writes) {
                if (fw.fn->is_constructor || fw.fn->name == "fallback" ||
                    fw.fn->name == "receive")
                    continue;
                if (!is_externally_callable(*fw.fn)) continue;
                if (public_fns == 0) first_public_line = fw.fn->line;
                ++public_fns;
                bool setter = !fw.state_writes.empty() || !fw.slot_writes.empty();
                bool getter = fw.fn->is_view_or_pure;
                if (!getter && !setter) {
                    for (std::size_t j = fw.fn->body.begin; j < fw.fn->body.end; ++j)
                        if (s.tokens[j].is_word("return")) {
                            getter = true;
                            break;
                        }
                }
                if (getter || setter) ++accessors;
            }
            if (public_fns > 0 &&
                static_cast<double>(accessors) / static_cast<double>(public_fns) >=
                    cfg.accessor_ratio_threshold) {
                fire("datasep_authorized_setter", auth_setter->fn->line);
                if (cfg.enabled("datasep_accessor_shape"))
                    fire("datasep_accessor_shape", first_public_line);
                verdict.kind = UpgradeKind::DataSeparation;
                return finish();
            }
        }
    }

    // Strategy: a contract-typed collaborator that can be swapped after
    // deployment and is actually called through.
    if (!has_delegatecall && cfg.enabled("strategy_swappable_ref")) {
        for (const ContractInfo& c : s.contracts) {
            if (c.kind != "contract") continue;
            for (const StateVarInfo& v : c.state_vars) {
                if (v.is_mapping || v.is_constant) continue;
                if (v.type_text.empty()) continue;
                bool user_type = s.has_declared_type(v.type_text) ||
                                 (std::isupper(static_cast<unsigned char>(v.type_text[0])) &&
                                  !lexer_detail::keywords().count(v.type_text));
                if (!user_type) continue;
                const detect_detail::StateWrite* setter = nullptr;
                const FunctionWrites* setter_fn = nullptr;
                for (const FunctionWrites& fw : a.writes) {
                    if (fw.fn->is_constructor) continue;
                    for (const StateWrite& w : fw.state_writes)
                        if (w.var == v.name && !w.via_index) {
                            setter = &w;
                            setter_fn = &fw;
                        }
                }
                if (!setter) continue;
                const Token* call_site = nullptr;
                for (std::size_t j = 0; j + 3 < s.tokens.size(); ++j) {
                    if (s.tokens[j].is_word(v.name) && s.tokens[j + 1].is_punct(".") &&
                        s.tokens[j + 2].kind == TokenKind::Identifier &&
                        s.tokens[j + 3].is_punct("(")) {
                        call_site = &s.tokens[j];
                        break;
                    }
                }
                if (!call_site) continue;
                fire("strategy_swappable_ref", setter->line);
                if (cfg.enabled("strategy_direct_call")) fire("strategy_direct_call", call_site->line);
                verdict.kind = UpgradeKind::Strategy;
                (void)setter_fn;
                return finish();
            }
        }
    }

    return finish();
}

struct PrevalenceSummary {
    std::map<UpgradeKind, std::size_t> counts;  // every kind present, zeros kept
    std::size_t total = 0;
    std::size_t upgradeable = 0;
    std::optional<double> proportion_upgradeable;
};

inline PrevalenceSummary prevalence_summary(const std::vector<PatternVerdict>& verdicts) {
    PrevalenceSummary out;
    for (UpgradeKind k : kAllUpgradeKinds) out.counts[k] = 0;
    for (const PatternVerdict& v : verdicts) {
        ++out.counts[v.kind];
        ++out.total;
        if (is_upgradeable_kind(v.kind)) ++out.upgradeable;
    }
    if (out.total > 0)
        out.proportion_upgradeable =
            static_cast<double>(out.upgradeable) / static_cast<double>(out.total);
    return out;
}

inline void to_json(json& j, const PrevalenceSummary& p) {
    json counts = json::object();
    for (const auto& [kind, n] : p.counts) counts[to_string(kind)] = n;
    j = json{{"counts", counts}, {"total", p.total}, {"upgradeable", p.upgradeable}};
    if (p.proportion_upgradeable) j["proportion_upgradeable"] = *p.proportion_upgradeable;
}

}  // namespace upscan
