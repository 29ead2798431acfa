// upscan: upgradeable smart contract analysis toolkit
// Copyright 2026 The upscan Authors.
// SPDX-License-Identifier: Apache-2.0
#include <upscan/detect.hpp>
#include <upscan/normalize.hpp>

#include <catch2/catch_amalgamated.hpp>

using namespace upscan;

namespace {

NormalizedSource norm(const std::string& address, const std::string& text)
{
    return normalize_source(address, "Fixture.sol", text);
}

const std::string kAddr = "0x00000000000000000000000000000000000000aa";

// Minimal mutable proxy: storage variable target, an upgrade entry point,
// and a dispatch function that forwards via delegatecall.
const std::string kMutableProxy = R"sol(
pragma solidity ^0.4.21;

contract UpgradeableProxy {
    address public implementation;

    function UpgradeableProxy(address _implementation) public {
        implementation = _implementation;
    }

    function upgradeTo(address _implementation) public {
        implementation = _implementation;
    }

    function execute(bytes _data) public payable {
        address(implementation).delegatecall(_data);
    }
}
)sol";

// Same dispatch, but the target can only be set at construction.
const std::string kFixedProxy = R"sol(
pragma solidity ^0.4.21;

contract ForwardProxy {
    address public implementation;

    function ForwardProxy(address _implementation) public {
        implementation = _implementation;
    }

    function execute(bytes _data) public payable {
        address(implementation).delegatecall(_data);
    }
}
)sol";

const std::string kErc1967Proxy = R"sol(
pragma solidity ^0.8.10;

contract ERC1967Proxy {
    bytes32 private constant IMPLEMENTATION_SLOT =
        0x360894a13ba1a3210667c828492db98dca3e2076cc3735a920a3ca505d382bbc;

    address private admin;

    constructor(address admin_, address implementation_) {
        admin = admin_;
        assembly {
            sstore(IMPLEMENTATION_SLOT, implementation_)
        }
    }

    function upgradeTo(address newImplementation) external {
        require(msg.sender == admin, "proxy: not admin");
        assembly {
            sstore(IMPLEMENTATION_SLOT, newImplementation)
        }
    }

    fallback() external payable {
        assembly {
            calldatacopy(0, 0, calldatasize())
            let impl := sload(IMPLEMENTATION_SLOT)
            let ok := delegatecall(gas(), impl, 0, calldatasize(), 0, 0)
            returndatacopy(0, 0, returndatasize())
            switch ok
            case 0 { revert(0, returndatasize()) }
            default { return(0, returndatasize()) }
        }
    }
}
)sol";

const std::string kUupsLogic = R"sol(
pragma solidity ^0.8.4;

abstract contract Proxiable {
    function proxiableUUID() external pure returns (bytes32) {
        return 0xc5f16f0fcc639fa48a6947836d9850f504798523bf8c9a3a87d5876cf622bcf7;
    }

    function updateCodeAddress(address newAddress) internal {
        assembly {
            sstore(0xc5f16f0fcc639fa48a6947836d9850f504798523bf8c9a3a87d5876cf622bcf7, newAddress)
        }
    }
}

contract CounterV1 is Proxiable {
    address public owner;
    uint256 public count;

    function increment() external {
        count = count + 1;
    }

    function upgradeTo(address newCode) external {
        require(msg.sender == owner, "only owner");
        updateCodeAddress(newCode);
    }
}
)sol";

// UUPS-style logic that keeps its target in a plain address variable. The
// word delegatecall appears only inside a comment and a string literal, so
// the proxy rules must stay quiet.
const std::string kUupsVarLogic = R"sol(
pragma solidity ^0.6.12;

// Routing happens in the proxy; no delegatecall lives in this contract.
contract LogicBase {
    address public implementation;
    string public note = "not a real delegatecall";

    function proxiableUUID() public pure returns (bytes32) {
        return keccak256("PROXIABLE");
    }

    function upgradeTo(address impl_) public {
        implementation = impl_;
    }
}
)sol";

const std::string kDiamond = R"sol(
pragma solidity ^0.8.0;

contract Diamond {
    mapping(bytes4 => address) internal facets;
    address public contractOwner;

    struct FacetCut {
        address facetAddress;
        uint8 action;
        bytes4[] functionSelectors;
    }

    function diamondCut(FacetCut[] calldata cut, address init, bytes calldata data) external {
        require(msg.sender == contractOwner, "not owner");
        for (uint256 i = 0; i < cut.length; i++) {
            bytes4[] calldata selectors = cut[i].functionSelectors;
            for (uint256 j = 0; j < selectors.length; j++) {
                facets[selectors[j]] = cut[i].facetAddress;
            }
        }
    }

    fallback() external payable {
        address facet = facets[msg.sig];
        assembly {
            calldatacopy(0, 0, calldatasize())
            let ok := delegatecall(gas(), facet, 0, calldatasize(), 0, 0)
            returndatacopy(0, 0, returndatasize())
            switch ok
            case 0 { revert(0, returndatasize()) }
            default { return(0, returndatasize()) }
        }
    }
}
)sol";

const std::string kKvStore = R"sol(
pragma solidity ^0.8.0;

contract KeyValueStorage {
    address public admin;
    mapping(address => bool) public authorized;
    mapping(bytes32 => uint256) internal uintStore;
    mapping(bytes32 => address) internal addressStore;

    constructor() {
        admin = msg.sender;
        authorized[msg.sender] = true;
    }

    function setAuthorized(address caller, bool ok) external {
        require(msg.sender == admin, "not admin");
        authorized[caller] = ok;
    }

    function transferAdmin(address next) external {
        require(msg.sender == admin, "not admin");
        admin = next;
    }

    function setUint(bytes32 key, uint256 value) external {
        require(authorized[msg.sender], "not authorized");
        uintStore[key] = value;
    }

    function getUint(bytes32 key) external view returns (uint256) {
        return uintStore[key];
    }

    function setAddress(bytes32 key, address value) external {
        require(authorized[msg.sender], "not authorized");
        addressStore[key] = value;
    }

    function getAddress(bytes32 key) external view returns (address) {
        return addressStore[key];
    }
}
)sol";

const std::string kStrategyVault = R"sol(
pragma solidity ^0.8.0;

interface IFeePolicy {
    function feeFor(uint256 amount) external view returns (uint256);
}

contract Vault {
    IFeePolicy public feePolicy;
    address public owner;
    mapping(address => uint256) public deposits;

    constructor(IFeePolicy policy) {
        feePolicy = policy;
        owner = msg.sender;
    }

    function setFeePolicy(IFeePolicy policy) external {
        require(msg.sender == owner, "not owner");
        feePolicy = policy;
    }

    function deposit() external payable {
        uint256 fee = feePolicy.feeFor(msg.value);
        deposits[msg.sender] = msg.value - fee;
    }
}
)sol";

const std::string kFixedVault = R"sol(
pragma solidity ^0.8.0;

interface IFeePolicy {
    function feeFor(uint256 amount) external view returns (uint256);
}

contract FixedVault {
    IFeePolicy public feePolicy;
    mapping(address => uint256) public deposits;

    constructor(IFeePolicy policy) {
        feePolicy = policy;
    }

    function deposit() external payable {
        uint256 fee = feePolicy.feeFor(msg.value);
        deposits[msg.sender] = msg.value - fee;
    }
}
)sol";

const std::string kPlainToken = R"sol(
pragma solidity ^0.8.0;

contract MiniToken {
    string public name = "Mini";
    mapping(address => uint256) public balances;
    uint256 public totalSupply;

    constructor(uint256 supply) {
        totalSupply = supply;
        balances[msg.sender] = supply;
    }

    function transfer(address to, uint256 value) external returns (bool) {
        require(balances[msg.sender] >= value, "insufficient");
        balances[msg.sender] = balances[msg.sender] - value;
        balances[to] = balances[to] + value;
        return true;
    }

    function balanceOf(address who) external view returns (uint256) {
        return balances[who];
    }
}
)sol";

const std::string kUnguardedStore = R"sol(
pragma solidity ^0.8.0;

contract OpenStorage {
    mapping(bytes32 => uint256) internal uintStore;

    function setUint(bytes32 key, uint256 value) external {
        uintStore[key] = value;
    }

    function getUint(bytes32 key) external view returns (uint256) {
        return uintStore[key];
    }
}
)sol";

void check_evidence_well_formed(const PatternVerdict& v, const NormalizedSource& src)
{
    const std::vector<std::string> lines = src.lines();
    for (const EvidenceSpan& span : v.evidence) {
        INFO("rule " << span.rule_id);
        CHECK(span.line_begin <= span.line_end);
        REQUIRE(span.line_end < lines.size());
        CHECK(span.matched == lines[span.line_begin]);
        CHECK_FALSE(span.matched.empty());
    }
    if (v.kind != UpgradeKind::NotUpgradeable)
        CHECK_FALSE(v.evidence.empty());
    CHECK(v.is_upgradeable == is_upgradeable_kind(v.kind));
}

bool has_rule(const PatternVerdict& v, const std::string& rule_id)
{
    for (const EvidenceSpan& span : v.evidence)
        if (span.rule_id == rule_id)
            return true;
    return false;
}

}  // namespace

TEST_CASE("delegatecall scan reports one span per source line")
{
    NormalizedSource src = norm(kAddr, kMutableProxy);
    auto spans = contains_delegatecall(src);
    REQUIRE(spans.size() == 1);
    CHECK(spans[0].rule_id == "proxy_delegatecall");
    CHECK(spans[0].line_begin == spans[0].line_end);
    CHECK(spans[0].matched.find("delegatecall") != std::string::npos);
    CHECK(src.lines().at(spans[0].line_begin) == spans[0].matched);
}

TEST_CASE("delegatecall scan ignores comments, strings, and longer identifiers")
{
    NormalizedSource src = norm(kAddr, kUupsVarLogic);
    CHECK(contains_delegatecall(src).empty());

    NormalizedSource other = norm(kAddr, R"sol(
contract C {
    uint256 public delegatecalls;
    function bump() external { delegatecalls = delegatecalls + 1; }
}
)sol");
    CHECK(contains_delegatecall(other).empty());
}

TEST_CASE("mutable proxy target is linked to its upgrade function")
{
    NormalizedSource src = norm(kAddr, kMutableProxy);
    auto mut = find_implementation_mutator(src);
    REQUIRE(mut.has_value());
    CHECK(mut->function_name == "upgradeTo");
    CHECK(mut->variable == "implementation");
}

TEST_CASE("constructor-only target assignment is not a mutator")
{
    CHECK_FALSE(find_implementation_mutator(norm(kAddr, kFixedProxy)).has_value());
    CHECK_FALSE(find_implementation_mutator(norm(kAddr, kPlainToken)).has_value());
}

TEST_CASE("slot-based proxy links sstore writes to sload dispatch")
{
    NormalizedSource src = norm(kAddr, kErc1967Proxy);
    auto mut = find_implementation_mutator(src);
    REQUIRE(mut.has_value());
    CHECK(mut->function_name == "upgradeTo");
    CHECK(mut->variable == kEip1967ImplementationSlot);
}

TEST_CASE("classification: storage-variable proxy with upgrade entry point")
{
    NormalizedSource src = norm(kAddr, kMutableProxy);
    PatternVerdict v = classify_pattern(src);
    CHECK(v.kind == UpgradeKind::UpgradeableProxyTransparent);
    CHECK(v.is_upgradeable);
    CHECK(has_rule(v, "proxy_delegatecall"));
    CHECK(has_rule(v, "transparent_impl_mutator"));
    check_evidence_well_formed(v, src);
}

TEST_CASE("classification: forwarding proxy without upgrade path")
{
    NormalizedSource src = norm(kAddr, kFixedProxy);
    PatternVerdict v = classify_pattern(src);
    CHECK(v.kind == UpgradeKind::ForwardProxy);
    CHECK_FALSE(v.is_upgradeable);
    CHECK(has_rule(v, "proxy_delegatecall"));
    CHECK(has_rule(v, "forward_fixed_target"));
    check_evidence_well_formed(v, src);
}

TEST_CASE("classification: slot-based proxy records the well-known slot")
{
    NormalizedSource src = norm(kAddr, kErc1967Proxy);
    PatternVerdict v = classify_pattern(src);
    CHECK(v.kind == UpgradeKind::UpgradeableProxyTransparent);
    CHECK(has_rule(v, "transparent_impl_mutator"));
    CHECK(has_rule(v, "transparent_eip1967_slot"));
    check_evidence_well_formed(v, src);
}

TEST_CASE("classification: proxiable logic with slot rewrite")
{
    NormalizedSource src = norm(kAddr, kUupsLogic);
    PatternVerdict v = classify_pattern(src);
    CHECK(v.kind == UpgradeKind::UpgradeableProxyUUPS);
    CHECK(has_rule(v, "uups_proxiable_marker"));
    CHECK(has_rule(v, "uups_upgrade_mutator"));
    check_evidence_well_formed(v, src);
}

TEST_CASE("classification: proxiable logic with address-variable rewrite")
{
    NormalizedSource src = norm(kAddr, kUupsVarLogic);
    PatternVerdict v = classify_pattern(src);
    CHECK(v.kind == UpgradeKind::UpgradeableProxyUUPS);
    CHECK(has_rule(v, "uups_proxiable_marker"));
    check_evidence_well_formed(v, src);
}

TEST_CASE("classification: selector-routing diamond")
{
    NormalizedSource src = norm(kAddr, kDiamond);
    PatternVerdict v = classify_pattern(src);
    CHECK(v.kind == UpgradeKind::UpgradeableProxyDiamond);
    CHECK(has_rule(v, "diamond_cut_function"));
    CHECK(has_rule(v, "diamond_selector_mapping"));
    check_evidence_well_formed(v, src);
}

TEST_CASE("classification: guarded key-value store is data separation")
{
    NormalizedSource src = norm(kAddr, kKvStore);
    PatternVerdict v = classify_pattern(src);
    CHECK(v.kind == UpgradeKind::DataSeparation);
    CHECK(has_rule(v, "datasep_authorized_setter"));
    CHECK(has_rule(v, "datasep_accessor_shape"));
    check_evidence_well_formed(v, src);
}

TEST_CASE("classification: swappable collaborator is strategy")
{
    NormalizedSource src = norm(kAddr, kStrategyVault);
    PatternVerdict v = classify_pattern(src);
    CHECK(v.kind == UpgradeKind::Strategy);
    CHECK(has_rule(v, "strategy_swappable_ref"));
    CHECK(has_rule(v, "strategy_direct_call"));
    check_evidence_well_formed(v, src);
}

TEST_CASE("classification: plain contracts stay not-upgradeable")
{
    for (const std::string* text : {&kPlainToken, &kUnguardedStore, &kFixedVault}) {
        NormalizedSource src = norm(kAddr, *text);
        PatternVerdict v = classify_pattern(src);
        INFO(src.canonical_text.substr(0, 60));
        CHECK(v.kind == UpgradeKind::NotUpgradeable);
        CHECK_FALSE(v.is_upgradeable);
        check_evidence_well_formed(v, src);
    }
}

TEST_CASE("classification is deterministic")
{
    NormalizedSource src = norm(kAddr, kKvStore);
    PatternVerdict a = classify_pattern(src);
    PatternVerdict b = classify_pattern(src);
    PatternVerdict c = classify_pattern(src);
    CHECK(a == b);
    CHECK(b == c);
    CHECK(json(a) == json(c));
}

TEST_CASE("rules config: unknown ids are rejected")
{
    auto doc = toml::parse(R"toml(
[rules]
disabled = ["no_such_rule"]
)toml");
    CHECK_THROWS_AS(DetectConfig::from_toml(doc), ConfigError);
}

TEST_CASE("rules config: out-of-range threshold is rejected")
{
    auto doc = toml::parse(R"toml(
[thresholds]
data_separation_accessor_ratio = 1.5
)toml");
    CHECK_THROWS_AS(DetectConfig::from_toml(doc), ConfigError);
}

TEST_CASE("rules config: disabling the primary rule removes the branch")
{
    auto doc = toml::parse(R"toml(
[rules]
disabled = ["datasep_authorized_setter"]
)toml");
    DetectConfig cfg = DetectConfig::from_toml(doc);
    PatternVerdict v = classify_pattern(norm(kAddr, kKvStore), cfg);
    CHECK(v.kind == UpgradeKind::NotUpgradeable);

    auto doc2 = toml::parse(R"toml(
[rules]
disabled = ["transparent_impl_mutator"]
)toml");
    PatternVerdict v2 = classify_pattern(norm(kAddr, kMutableProxy), DetectConfig::from_toml(doc2));
    CHECK(v2.kind == UpgradeKind::ForwardProxy);
}

TEST_CASE("rules config: accessor ratio threshold is honored")
{
    // One externally callable helper that neither reads back state nor
    // writes it dilutes the accessor share below 1.0 but not below 0.8.
    std::string text = kKvStore;
    const std::string helper = R"sol(
contract Prober {
    KeyValueStorage internal store;
    function probe(bytes32 key) external {
        store.setUint(key, 1);
    }
}
)sol";
    std::string combined = text + helper;
    NormalizedSource src = norm(kAddr, combined);

    DetectConfig strict;
    strict.accessor_ratio_threshold = 1.0;
    PatternVerdict v = classify_pattern(src, strict);
    CHECK(v.kind == UpgradeKind::NotUpgradeable);

    DetectConfig lax;
    lax.accessor_ratio_threshold = 0.8;
    CHECK(classify_pattern(src, lax).kind == UpgradeKind::DataSeparation);
}

TEST_CASE("reference rules file parses and keeps defaults")
{
    DetectConfig cfg = DetectConfig::from_file(std::string(UPSCAN_CONFIG_DIR) + "/rules.toml");
    CHECK(cfg.accessor_ratio_threshold == 0.8);
    CHECK_FALSE(cfg.enabled("beacon_proxy"));
    CHECK_FALSE(cfg.enabled("metaproxy_3448"));
    CHECK(cfg.enabled("proxy_delegatecall"));
}

TEST_CASE("prevalence summary covers every kind and tracks the proportion")
{
    std::vector<PatternVerdict> verdicts;
    for (const std::string* text :
         {&kMutableProxy, &kFixedProxy, &kErc1967Proxy, &kUupsLogic, &kDiamond, &kKvStore,
          &kStrategyVault, &kPlainToken, &kUnguardedStore, &kFixedVault})
        verdicts.push_back(classify_pattern(norm(kAddr, *text)));

    PrevalenceSummary p = prevalence_summary(verdicts);
    CHECK(p.total == 10);
    CHECK(p.counts.size() == std::size(kAllUpgradeKinds));
    CHECK(p.counts.at(UpgradeKind::UpgradeableProxyTransparent) == 2);
    CHECK(p.counts.at(UpgradeKind::ForwardProxy) == 1);
    CHECK(p.counts.at(UpgradeKind::UpgradeableProxyUUPS) == 1);
    CHECK(p.counts.at(UpgradeKind::UpgradeableProxyDiamond) == 1);
    CHECK(p.counts.at(UpgradeKind::DataSeparation) == 1);
    CHECK(p.counts.at(UpgradeKind::Strategy) == 1);
    CHECK(p.counts.at(UpgradeKind::NotUpgradeable) == 3);
    CHECK(p.upgradeable == 6);
    REQUIRE(p.proportion_upgradeable.has_value());
    CHECK(*p.proportion_upgradeable == Catch::Approx(0.6));

    PrevalenceSummary empty = prevalence_summary({});
    CHECK(empty.total == 0);
    CHECK_FALSE(empty.proportion_upgradeable.has_value());
    CHECK(empty.counts.at(UpgradeKind::NotUpgradeable) == 0);
}
