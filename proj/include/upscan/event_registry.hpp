// upscan: upgradeable smart contract analysis toolkit
// Copyright 2026 The upscan Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <upscan/errors.hpp>
#include <upscan/etl.hpp>
#include <upscan/hex.hpp>
#include <upscan/keccak.hpp>
#include <upscan/toml_lite.hpp>
#include <upscan/types.hpp>

#include <map>
#include <optional>
#include <string>
#include <utility>

namespace upscan {

// One watched upgrade event: its canonical signature and where the new
// implementation address sits in the emitted log.
struct EventSpec
{
    std::string signature;
    std::string topic0;        // 0x + 64 hex, keccak-256 of the signature
    std::string new_impl_arg;  // "topic1".."topic3" or "data<N>" (32-byte word N)
    EventProvenance provenance = EventProvenance::SignatureTopic;
};

namespace event_detail
{
struct ArgRef
{
    bool from_topic = false;
    std::size_t index = 0;
};

inline ArgRef parse_arg_ref(const std::string& arg)
{
    if (arg.size() == 6 && arg.rfind("topic", 0) == 0 && arg[5] >= '1' && arg[5] <= '3')
        return {true, static_cast<std::size_t>(arg[5] - '0')};
    if (arg.size() > 4 && arg.rfind("data", 0) == 0)
    {
        std::size_t index = 0;
        for (std::size_t i = 4; i < arg.size(); ++i)
        {
            if (arg[i] < '0' || arg[i] > '9')
                throw ConfigError{"bad new_impl_arg '" + arg + "' (expected topic1..topic3 or data<N>)"};
            index = index * 10 + static_cast<std::size_t>(arg[i] - '0');
        }
        return {false, index};
    }
    throw ConfigError{"bad new_impl_arg '" + arg + "' (expected topic1..topic3 or data<N>)"};
}
}  // namespace event_detail

class EventRegistry
{
public:
    // Ships with the single-address upgrade event and the diamond cut; the
    // TOML file extends or overrides these for library-specific formats.
    static EventRegistry defaults()
    {
        EventRegistry reg;
        reg.add({"Upgraded(address)", "", "topic1", EventProvenance::SignatureTopic});
        reg.add({"DiamondCut((address,uint8,bytes4[])[],address,bytes)", "", "data0",
            EventProvenance::DiamondCut});
        return reg;
    }

    void add(EventSpec spec)
    {
        if (spec.signature.empty())
            throw ConfigError{"event signature must not be empty"};
        event_detail::parse_arg_ref(spec.new_impl_arg);
        spec.topic0 = event_topic_hash(spec.signature);
        by_topic0_[spec.topic0] = std::move(spec);
    }

    void merge_toml(const toml::Document& doc)
    {
        const std::vector<toml::Table>* events = doc.table_array("event");
        if (!events)
            return;
        for (const toml::Table& t : *events)
        {
            EventSpec spec;
            const auto sig = t.find("signature");
            const auto arg = t.find("new_impl_arg");
            if (sig == t.end() || arg == t.end())
                throw ConfigError{"[[event]] entries need both signature and new_impl_arg"};
            spec.signature = sig->second.as_string();
            spec.new_impl_arg = arg->second.as_string();
            spec.provenance = spec.signature.rfind("DiamondCut(", 0) == 0 ?
                EventProvenance::DiamondCut :
                EventProvenance::SignatureTopic;
            add(std::move(spec));
        }
    }

    static EventRegistry from_file(const std::string& path)
    {
        EventRegistry reg = defaults();
        reg.merge_toml(toml::parse_file(path));
        return reg;
    }

    const EventSpec* find_by_topic0(const std::string& topic0) const
    {
        const auto it = by_topic0_.find(to_lower_ascii(topic0));
        return it == by_topic0_.end() ? nullptr : &it->second;
    }

    std::size_t size() const noexcept { return by_topic0_.size(); }

private:
    std::map<std::string, EventSpec> by_topic0_;
};

// Decodes the new implementation address from a matching log row. Returns
// nothing when the referenced topic or data word is absent or too short;
// `error` then describes what was missing.
inline std::optional<std::string> extract_new_implementation(const EventSpec& spec,
    const EtlLogRow& log, std::string* error = nullptr)
{
    const event_detail::ArgRef ref = event_detail::parse_arg_ref(spec.new_impl_arg);
    if (ref.from_topic)
    {
        if (log.topics.size() <= ref.index)
        {
            if (error)
                *error = "missing " + spec.new_impl_arg;
            return std::nullopt;
        }
        return address_from_word(log.topics[ref.index]);
    }
    const std::string_view data = strip_hex_prefix(log.data);
    const std::size_t offset = ref.index * 64;
    if (data.size() < offset + 64)
    {
        if (error)
            *error = "data too short for " + spec.new_impl_arg;
        return std::nullopt;
    }
    const std::string_view word = data.substr(offset, 64);
    if (!is_hex_bytes(word, 32))
    {
        if (error)
            *error = "non-hex data word at " + spec.new_impl_arg;
        return std::nullopt;
    }
    return address_from_word(word);
}

}  // namespace upscan
