// upscan: upgradeable smart contract analysis toolkit
// Copyright 2026 The upscan Authors.
// SPDX-License-Identifier: Apache-2.0
#include <upscan/detectors.hpp>
#include <upscan/diff.hpp>
#include <upscan/gas.hpp>
#include <upscan/normalize.hpp>
#include <upscan/rootcause.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <random>

using namespace upscan;

namespace {

const std::string kAddr = "0x00000000000000000000000000000000000000aa";

NormalizedSource norm(const std::string& text)
{
    return normalize_source(kAddr, "Fixture.sol", text);
}

// Independent LCS length: top-down memoized recursion over suffixes, unlike
// the bottom-up prefix table in the implementation under test.
std::size_t lcs_oracle(const std::vector<std::string>& a, const std::vector<std::string>& b)
{
    std::vector<std::vector<int>> memo(a.size() + 1, std::vector<int>(b.size() + 1, -1));
    std::function<int(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t j) -> int {
        if (i == a.size() || j == b.size())
            return 0;
        int& m = memo[i][j];
        if (m >= 0)
            return m;
        if (a[i] == b[j])
            return m = 1 + rec(i + 1, j + 1);
        return m = std::max(rec(i + 1, j), rec(i, j + 1));
    };
    return static_cast<std::size_t>(rec(0, 0));
}

struct TempFile
{
    std::filesystem::path path;

    explicit TempFile(const std::string& content)
    {
        path = std::filesystem::temp_directory_path() /
               ("upscan_findings_" + std::to_string(::getpid()) + "_" +
                   std::to_string(counter()++) + ".json");
        std::ofstream out{path};
        out << content;
    }
    ~TempFile() { std::filesystem::remove(path); }

    static int& counter()
    {
        static int n = 0;
        return n;
    }
};

std::string make_service_contract(bool vulnerable, bool legacy, bool feature)
{
    std::string s = "pragma solidity ^0.8.0;\n"
                    "contract Service {\n"
                    "    address public owner;\n"
                    "    uint256 public total;\n";
    if (legacy)
        s += "    uint256 public legacyCounter;\n";
    if (feature)
        s += "    uint256 public featureFlag;\n";
    s += "    constructor() { owner = msg.sender; }\n"
         "    function add(uint256 v) public { total = total + v; }\n"
         "    function guard() public view returns (bool) {\n";
    if (vulnerable)
        s += "        require(tx.origin == owner);\n";
    s += "        return true;\n"
         "    }\n"
         "}\n";
    return s;
}

}  // namespace

TEST_CASE("identical texts diff to nothing")
{
    std::vector<std::string> a = {"one", "two", "three"};
    VersionDiff d = diff_lines(a, a);
    CHECK(d.added_lines.empty());
    CHECK(d.removed_lines.empty());
    CHECK(d.unchanged_count == 3);
}

TEST_CASE("appending one line adds exactly one diff entry")
{
    std::vector<std::string> a = {"one", "two"};
    std::vector<std::string> b = {"one", "two", "three"};
    VersionDiff d = diff_lines(a, b);
    REQUIRE(d.added_lines.size() == 1);
    CHECK(d.added_lines[0].line == 2);
    CHECK(d.added_lines[0].text == "three");
    CHECK(d.removed_lines.empty());
    CHECK(d.unchanged_count == 2);
}

TEST_CASE("single-line replacement removes then adds")
{
    VersionDiff d = diff_lines({"x"}, {"y"});
    REQUIRE(d.removed_lines.size() == 1);
    REQUIRE(d.added_lines.size() == 1);
    CHECK(d.removed_lines[0].line == 0);
    CHECK(d.added_lines[0].line == 0);
    CHECK(d.unchanged_count == 0);
}

TEST_CASE("thirty-line fixture with a known four-line replacement")
{
    std::vector<std::string> a;
    for (int i = 0; i < 30; ++i)
        a.push_back("line_" + std::to_string(i));
    std::vector<std::string> b = a;
    for (int i : {4, 11, 19, 27})
        b[static_cast<std::size_t>(i)] = "edited_" + std::to_string(i);

    VersionDiff d = diff_lines(a, b);
    CHECK(d.removed_lines.size() == 4);
    CHECK(d.added_lines.size() == 4);
    CHECK(d.unchanged_count == 26);
    CHECK(d.unchanged_count == lcs_oracle(a, b));
    CHECK(apply_diff(d, a) == b);
}

TEST_CASE("diff matches the LCS oracle and replays exactly on random pairs")
{
    std::mt19937_64 rng(424242);
    const std::vector<std::string> pool = {"alpha", "beta", "gamma", "delta", "epsilon"};
    for (int round = 0; round < 300; ++round)
    {
        std::vector<std::string> a;
        std::vector<std::string> b;
        const std::size_t n = rng() % 13;
        const std::size_t m = rng() % 13;
        for (std::size_t i = 0; i < n; ++i)
            a.push_back(pool[rng() % pool.size()]);
        for (std::size_t j = 0; j < m; ++j)
            b.push_back(pool[rng() % pool.size()]);

        VersionDiff d = diff_lines(a, b);
        const std::size_t lcs = lcs_oracle(a, b);
        CHECK(d.removed_lines.size() == n - lcs);
        CHECK(d.added_lines.size() == m - lcs);
        CHECK(d.unchanged_count == lcs);
        CHECK(apply_diff(d, a) == b);
        CHECK(diff_lines(a, b) == d);
    }
}

TEST_CASE("deploy gas follows the published fee schedule")
{
    // 10 closed-form cases: {deployed code, init code, expected gas}.
    struct Case
    {
        std::string code;
        std::string init;
        std::uint64_t expected;
    };
    const std::string nonzero100(200, 'a');  // 100 bytes of 0xaa
    const std::string zero10(20, '0');       // 10 zero bytes
    const Case cases[] = {
        {"", "", 53000},
        {"0x", "", 53000},
        {nonzero100, "", 74600},                   // 53000 + 20000 + 1600
        {"0x" + nonzero100, "", 74600},
        {zero10, "", 55040},                       // 53000 + 2000 + 40
        {"00ff00ff", "", 53840},                   // 4 bytes: 800 deposit + 40 calldata
        {"abcd", "00", 53404},                     // init shorter than code
        {"abcd", "ffff", 53432},                   // 53000 + 400 + 32
        {"ff", "", 53216},                         // 53000 + 200 + 16
        {"0000", "ffffffff", 53464},               // zero code, 4 nonzero init bytes
    };
    for (const Case& c : cases)
    {
        INFO("code=" << c.code << " init=" << c.init);
        GasEstimate est = estimate_deploy_gas(c.code, c.init);
        CHECK(est.deploy_gas == c.expected);
        CHECK(est.deploy_gas ==
              est.base_tx_cost + est.creation_surcharge + est.code_deposit_cost + est.calldata_cost);
        CHECK_FALSE(est.source_length_based);
    }
}

TEST_CASE("gas estimation rejects malformed bytecode")
{
    CHECK_THROWS_AS(estimate_deploy_gas("0xabc"), ValidationError);
    CHECK_THROWS_AS(estimate_deploy_gas("zz"), ValidationError);
    CHECK_THROWS_AS(estimate_deploy_gas("abcd", "0xa"), ValidationError);
}

TEST_CASE("adding code bytes never lowers the estimate")
{
    std::mt19937_64 rng(7);
    std::string code;
    std::uint64_t last = estimate_deploy_gas(code).deploy_gas;
    for (int i = 0; i < 200; ++i)
    {
        static const char digits[] = "0123456789abcdef";
        code.push_back(digits[rng() % 16]);
        code.push_back(digits[rng() % 16]);
        const std::uint64_t now = estimate_deploy_gas(code).deploy_gas;
        CHECK(now >= last + kGasPerCodeByte);  // deposit alone grows by 200
        last = now;
    }
}

TEST_CASE("source-length fallback is marked and deterministic")
{
    GasEstimate est = estimate_deploy_gas_from_source(100);
    CHECK(est.deploy_gas == 74600);
    CHECK(est.source_length_based);
    CHECK(estimate_deploy_gas_from_source(0).deploy_gas == 53000);

    ContractRecord with_code;
    with_code.bytecode = "0xffff";
    CHECK_FALSE(estimate_deploy_gas_for(with_code, nullptr).source_length_based);

    ContractRecord source_only;
    NormalizedSource src = norm(make_service_contract(false, false, false));
    GasEstimate fallback = estimate_deploy_gas_for(source_only, &src);
    CHECK(fallback.source_length_based);
    CHECK(fallback.deploy_gas == estimate_deploy_gas_from_source(src.canonical_text.size()).deploy_gas);
}

TEST_CASE("tx.origin comparisons are flagged as authorization misuse")
{
    NormalizedSource src = norm(make_service_contract(true, false, false));
    std::vector<VulnerabilityFinding> findings = run_detectors(src);
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].detector_id == "builtin");
    CHECK(findings[0].category == "tx-origin-auth");
    CHECK(findings[0].line_begin == findings[0].line_end);
    CHECK(src.lines().at(findings[0].line_begin).find("tx.origin") != std::string::npos);
    CHECK(findings[0].fingerprint ==
          finding_fingerprint("tx-origin-auth", src.lines().at(findings[0].line_begin)));
}

TEST_CASE("clean contracts produce no findings")
{
    CHECK(run_detectors(norm("contract Empty {}")).empty());
    CHECK(run_detectors(norm(make_service_contract(false, true, true))).empty());
}

TEST_CASE("state writes after an external call look like reentrancy")
{
    NormalizedSource vulnerable = norm(R"sol(
contract Bank {
    mapping(address => uint256) public balances;

    function withdraw() public {
        uint256 amount = balances[msg.sender];
        (bool ok, ) = msg.sender.call{value: amount}("");
        require(ok);
        balances[msg.sender] = 0;
    }
}
)sol");
    std::vector<VulnerabilityFinding> findings = run_detectors(vulnerable);
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].category == "reentrancy");
    CHECK(vulnerable.lines().at(findings[0].line_begin).find("balances") != std::string::npos);

    NormalizedSource fixed = norm(R"sol(
contract Bank {
    mapping(address => uint256) public balances;

    function withdraw() public {
        uint256 amount = balances[msg.sender];
        balances[msg.sender] = 0;
        (bool ok, ) = msg.sender.call{value: amount}("");
        require(ok);
    }
}
)sol");
    CHECK(run_detectors(fixed).empty());
}

TEST_CASE("low-level calls with ignored results are reported")
{
    NormalizedSource src = norm(R"sol(
contract Payouts {
    address payable public beneficiary;

    function payout(uint256 amount) public {
        beneficiary.send(amount);
    }

    function checkedPayout(uint256 amount) public {
        require(beneficiary.send(amount));
    }

    function branchedPayout(uint256 amount) public {
        if (!beneficiary.send(amount)) {
            beneficiary = payable(msg.sender);
        }
    }
}
)sol");
    std::vector<VulnerabilityFinding> findings;
    for (const VulnerabilityFinding& f : run_detectors(src))
        if (f.category == "unchecked-call")
            findings.push_back(f);
    REQUIRE(findings.size() == 1);
    CHECK(src.lines().at(findings[0].line_begin).find("beneficiary.send") != std::string::npos);
}

TEST_CASE("selfdestruct without a sender guard is unprotected")
{
    NormalizedSource open_kill = norm(R"sol(
contract Disposable {
    function kill() public {
        selfdestruct(payable(msg.sender));
    }
}
)sol");
    std::vector<VulnerabilityFinding> findings = run_detectors(open_kill);
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].category == "unprotected-selfdestruct");

    NormalizedSource guarded = norm(R"sol(
contract Disposable {
    address public owner;
    function kill() public {
        require(msg.sender == owner);
        selfdestruct(payable(msg.sender));
    }
}
)sol");
    CHECK(run_detectors(guarded).empty());

    NormalizedSource modifier_guarded = norm(R"sol(
contract Disposable {
    address public owner;
    modifier onlyOwner() {
        require(msg.sender == owner);
        _;
    }
    function kill() public onlyOwner {
        selfdestruct(payable(msg.sender));
    }
}
)sol");
    CHECK(run_detectors(modifier_guarded).empty());
}

TEST_CASE("individual detectors can be switched off")
{
    NormalizedSource src = norm(make_service_contract(true, false, false));
    DetectorSet none;
    none.tx_origin_auth = false;
    CHECK(run_detectors(src, none).empty());
}

TEST_CASE("findings are deterministic and survive line shifts")
{
    NormalizedSource src = norm(make_service_contract(true, false, false));
    CHECK(run_detectors(src) == run_detectors(src));

    // The same vulnerable function further down the file keeps its
    // fingerprint even though the line number moved.
    NormalizedSource shifted = norm(make_service_contract(true, true, true));
    std::vector<VulnerabilityFinding> a = run_detectors(src);
    std::vector<VulnerabilityFinding> b = run_detectors(shifted);
    REQUIRE(a.size() == 1);
    REQUIRE(b.size() == 1);
    CHECK(a[0].line_begin != b[0].line_begin);
    CHECK(a[0].fingerprint == b[0].fingerprint);
}

TEST_CASE("external findings import validates shape and spans")
{
    NormalizedSource src = norm(make_service_contract(false, false, false));
    json doc = json::parse(R"({
        "0x00000000000000000000000000000000000000aa": [
            {"detector": "mythril", "category": "integer-overflow", "line_start": 3, "line_end": 3},
            {"detector": "slither", "category": "shadowing", "line_start": 1, "line_end": 2}
        ],
        "0x00000000000000000000000000000000000000bb": [
            {"detector": "mythril", "category": "other", "line_start": 0, "line_end": 0}
        ]
    })");

    std::vector<VulnerabilityFinding> imported = external_findings_for(doc, kAddr, src);
    REQUIRE(imported.size() == 2);
    CHECK(imported[0].detector_id == "external");
    CHECK(imported[0].category == "integer-overflow");
    CHECK(imported[0].line_begin == 3);
    CHECK(imported[1].category == "shadowing");
    CHECK(imported[1].line_end == 2);
    for (const VulnerabilityFinding& f : imported)
        CHECK_FALSE(f.fingerprint.empty());

    CHECK(external_findings_for(doc, "0x00000000000000000000000000000000000000cc", src).empty());

    json bad_span = json::parse(R"({"0x00000000000000000000000000000000000000aa":
        [{"detector": "x", "category": "y", "line_start": 2, "line_end": 9999}]})");
    CHECK_THROWS_AS(external_findings_for(bad_span, kAddr, src), FormatError);

    json missing_keys = json::parse(R"({"0x00000000000000000000000000000000000000aa":
        [{"detector": "x"}]})");
    CHECK_THROWS_AS(external_findings_for(missing_keys, kAddr, src), FormatError);

    json not_array = json::parse(R"({"0x00000000000000000000000000000000000000aa": 7})");
    CHECK_THROWS_AS(external_findings_for(not_array, kAddr, src), FormatError);

    CHECK_THROWS_AS(external_findings_for(json::array(), kAddr, src), FormatError);
}

TEST_CASE("findings files load strictly")
{
    TempFile good{R"({"0x00000000000000000000000000000000000000aa": []})"};
    CHECK(load_findings_file(good.path.string()).is_object());

    TempFile broken{"{not json"};
    CHECK_THROWS_AS(load_findings_file(broken.path.string()), FormatError);

    TempFile wrong_shape{"[1, 2, 3]"};
    CHECK_THROWS_AS(load_findings_file(wrong_shape.path.string()), FormatError);

    CHECK_THROWS_AS(load_findings_file("/nonexistent/findings.json"), FormatError);
}

TEST_CASE("resolved findings label the upgrade as a bug fix and nothing else")
{
    NormalizedSource v1 = norm(make_service_contract(true, false, false));
    NormalizedSource v2 = norm(make_service_contract(false, false, false));
    std::vector<VulnerabilityFinding> f1 = run_detectors(v1);
    std::vector<VulnerabilityFinding> f2 = run_detectors(v2);
    REQUIRE(f1.size() == 1);
    REQUIRE(f2.empty());

    GasEstimate flat = estimate_deploy_gas(std::string(200, 'a'));
    RootCauseReport r = classify_root_causes(v1, v2, f1, f2, flat, flat);
    CHECK(r.labels == std::vector<RootCauseLabel>{RootCauseLabel::BugFix});
    REQUIRE(r.bug_fixes.size() == 1);
    CHECK(r.bug_fixes[0].category == "tx-origin-auth");
    // The removed vulnerable line is accounted to the fix, not to Other.
    CHECK(r.other.empty());
    CHECK(r.new_features.empty());
    REQUIRE(r.gas_notes.has_value());
    CHECK(r.gas_notes->first == flat);
    CHECK(r.gas_method == "static-deploy-estimate");
}

TEST_CASE("identical versions yield no labels")
{
    NormalizedSource v = norm(make_service_contract(false, false, false));
    std::vector<VulnerabilityFinding> f = run_detectors(v);
    GasEstimate flat = estimate_deploy_gas("abcd");
    RootCauseReport r = classify_root_causes(v, v, f, f, flat, flat);
    CHECK(r.labels.empty());
    CHECK(r.bug_fixes.empty());
    CHECK(r.new_features.empty());
    CHECK(r.other.empty());
}

TEST_CASE("added code plus cheaper deployment reads as feature work and gas savings")
{
    NormalizedSource v1 = norm(make_service_contract(false, false, false));
    NormalizedSource v2 = norm(make_service_contract(false, false, true));
    RootCauseReport r = classify_root_causes(v1, v2, {}, {}, estimate_deploy_gas(std::string(200, 'a')),
        estimate_deploy_gas(std::string(100, 'a')));
    CHECK(r.labels == std::vector<RootCauseLabel>{RootCauseLabel::NewFeature,
                          RootCauseLabel::GasOptimization});
    CHECK_FALSE(r.new_features.empty());
}

TEST_CASE("every label subset is reachable and exact")
{
    const GasEstimate big = estimate_deploy_gas(std::string(200, 'a'));
    const GasEstimate small = estimate_deploy_gas(std::string(100, 'a'));
    for (int mask = 0; mask < 16; ++mask)
    {
        const bool bug = mask & 1;
        const bool feature = mask & 2;
        const bool gas_opt = mask & 4;
        const bool removal = mask & 8;
        INFO("bug=" << bug << " feature=" << feature << " gas=" << gas_opt
                    << " removal=" << removal);

        NormalizedSource v1 = norm(make_service_contract(bug, removal, false));
        NormalizedSource v2 = norm(make_service_contract(false, false, feature));
        std::vector<VulnerabilityFinding> f1 = run_detectors(v1);
        std::vector<VulnerabilityFinding> f2 = run_detectors(v2);

        RootCauseReport r =
            classify_root_causes(v1, v2, f1, f2, big, gas_opt ? small : big);

        CHECK(r.has_label(RootCauseLabel::BugFix) == bug);
        CHECK(r.has_label(RootCauseLabel::NewFeature) == feature);
        CHECK(r.has_label(RootCauseLabel::GasOptimization) == gas_opt);
        CHECK(r.has_label(RootCauseLabel::Other) == removal);

        CHECK(r.bug_fixes.empty() == !bug);
        CHECK(r.new_features.empty() == !feature);
        CHECK(r.other.empty() == !removal);
        CHECK(r.labels.empty() == (mask == 0));
    }
}
