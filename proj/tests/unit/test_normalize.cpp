// upscan: upgradeable smart contract analysis toolkit
// Copyright 2026 The upscan Authors.
// SPDX-License-Identifier: Apache-2.0

#include <upscan/normalize.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace upscan;

namespace
{
std::string addr(unsigned n)
{
    char buf[3];
    std::snprintf(buf, sizeof(buf), "%02x", n);
    return "0x" + std::string(38, '0') + buf;
}

/// Independent grouping oracle: O(n^2) pairwise string equality, no hashing.
std::map<std::string, std::vector<std::string>> brute_force_groups(
    const std::vector<NormalizedSource>& sources)
{
    std::map<std::string, std::vector<std::string>> text_to_members;
    for (const NormalizedSource& s : sources)
    {
        bool placed = false;
        for (auto& [text, members] : text_to_members)
        {
            if (text == s.canonical_text)
            {
                members.push_back(s.address);
                placed = true;
                break;
            }
        }
        if (!placed)
            text_to_members[s.canonical_text].push_back(s.address);
    }
    for (auto& [text, members] : text_to_members)
        std::sort(members.begin(), members.end());
    return text_to_members;
}
}  // namespace

TEST_CASE("line comments are stripped, string contents are not")
{
    CHECK(canonicalize_whitespace(strip_comments("uint a; // set")) == "uint a;");
    CHECK(canonicalize_whitespace(strip_comments("string s = \"http://x\"; /*c*/")) ==
          "string s = \"http://x\";");
    CHECK(strip_comments("a = 1; // trailing") == "a = 1; ");
    CHECK(strip_comments("/// natspec doc\nuint b;") == "\nuint b;");
    CHECK(strip_comments("/** natspec block */ uint c;") == "  uint c;");
    CHECK(strip_comments("string t = \"//not-a-comment\";") == "string t = \"//not-a-comment\";");
    CHECK(strip_comments("string u = \"/* kept */\";") == "string u = \"/* kept */\";");
    CHECK(strip_comments("bytes1 q = '\\''; // char escape") == "bytes1 q = '\\''; ");
}

TEST_CASE("block comments keep their newlines so line numbers survive")
{
    const std::string text = "uint a;\n/* one\ntwo\nthree */\nuint b;";
    const std::string stripped = strip_comments(text);
    CHECK(std::count(stripped.begin(), stripped.end(), '\n') == 4);
    CHECK(canonicalize_whitespace(stripped) == "uint a;\nuint b;");
    CHECK(strip_comments("a/*x*/b") == "a b");  // tokens must not fuse
}

TEST_CASE("unterminated block comments are lexing errors with a line number")
{
    CHECK_THROWS_AS(strip_comments("/* open"), LexError);
    try
    {
        strip_comments("uint a;\nuint b;\n/* dangling");
        FAIL("expected LexError");
    }
    catch (const LexError& e)
    {
        CHECK(e.line == 3);
        CHECK(std::string{e.what()}.find("line 3") != std::string::npos);
    }
}

TEST_CASE("whitespace canonicalization matches the documented rules")
{
    CHECK(canonicalize_whitespace("a\t b") == "a b");
    CHECK(canonicalize_whitespace("x;\r\n\r\n y;") == "x;\ny;");
    CHECK(canonicalize_whitespace("  lead and trail   ") == "lead and trail");
    CHECK(canonicalize_whitespace("a    b\tc") == "a b c");
    CHECK(canonicalize_whitespace("\n\n\n") == "");
    CHECK(canonicalize_whitespace("one\rtwo") == "one\ntwo");  // bare CR acts as newline
    CHECK(canonicalize_whitespace("") == "");
}

TEST_CASE("canonicalization and the composed normalization are idempotent")
{
    std::mt19937 rng{2024};
    const std::string alphabet = "ab; {}()\t\r\n/*_=x";
    for (int trial = 0; trial < 200; ++trial)
    {
        std::string text;
        const std::size_t len = rng() % 120;
        for (std::size_t i = 0; i < len; ++i)
            text.push_back(alphabet[rng() % alphabet.size()]);

        const std::string once = canonicalize_whitespace(text);
        CHECK(canonicalize_whitespace(once) == once);

        // Composed pass: strip then canonicalize, applied twice, same result.
        try
        {
            const std::string composed = canonicalize_whitespace(strip_comments(text));
            CHECK(canonicalize_whitespace(strip_comments(composed)) == composed);
        }
        catch (const LexError&)
        {
            // Random text may open a block comment it never closes; the error
            // itself is correct behavior for that input.
        }
    }
}

TEST_CASE("flattening orders imported files before importers")
{
    SourceBundle bundle;
    bundle.files = {
        {"A.sol", "pragma solidity ^0.8.0;\nimport \"./B.sol\";\ncontract A is B {}"},
        {"B.sol", "pragma solidity ^0.8.0;\ncontract B {}"},
    };
    const std::string flat = flatten_bundle(bundle);
    CHECK(flat == "pragma solidity ^0.8.0;\ncontract B {}\ncontract A is B {}");
    CHECK(flat.find("import") == std::string::npos);

    // B's pragma came first in emission order, so A's duplicate is dropped.
    CHECK(flat.find("pragma") == flat.rfind("pragma"));
}

TEST_CASE("flattening on a single file only drops import lines")
{
    SourceBundle bundle;
    bundle.files = {{"Only.sol", "import \"@pkg/X.sol\";\ncontract Only {}"}};
    CHECK(flatten_bundle(bundle) == "contract Only {}");

    const FlattenResult flat = flatten_bundle_lines(bundle);
    REQUIRE(flat.warnings.size() == 1);
    CHECK(flat.warnings[0].find("@pkg/X.sol") != std::string::npos);
}

TEST_CASE("flattening keeps original order for independent files")
{
    SourceBundle bundle;
    bundle.files = {
        {"Z.sol", "contract Z {}"},
        {"A.sol", "contract A {}"},
    };
    CHECK(flatten_bundle(bundle) == "contract Z {}\ncontract A {}");
}

TEST_CASE("flattening resolves relative and basename imports")
{
    SourceBundle bundle;
    bundle.files = {
        {"contracts/Main.sol", "import \"../lib/Util.sol\";\ncontract Main {}"},
        {"lib/Util.sol", "library Util {}"},
    };
    CHECK(flatten_bundle(bundle) == "library Util {}\ncontract Main {}");

    SourceBundle by_name;
    by_name.files = {
        {"src/App.sol", "import \"Helper.sol\";\ncontract App {}"},
        {"src/deps/Helper.sol", "contract Helper {}"},
    };
    CHECK(flatten_bundle(by_name) == "contract Helper {}\ncontract App {}");
}

TEST_CASE("cyclic imports raise a flatten error naming the cycle")
{
    SourceBundle bundle;
    bundle.files = {
        {"A.sol", "import \"./B.sol\";\ncontract A {}"},
        {"B.sol", "import \"./A.sol\";\ncontract B {}"},
    };
    try
    {
        flatten_bundle(bundle);
        FAIL("expected FlattenError");
    }
    catch (const FlattenError& e)
    {
        const std::string what = e.what();
        CHECK(what.find("A.sol") != std::string::npos);
        CHECK(what.find("B.sol") != std::string::npos);
    }

    SourceBundle self_loop;
    self_loop.files = {{"S.sol", "import \"./S.sol\";\ncontract S {}"}};
    CHECK_THROWS_AS(flatten_bundle(self_loop), FlattenError);
}

TEST_CASE("normalize_source maps canonical lines to their origins")
{
    SourceBundle bundle;
    bundle.files = {
        {"Main.sol",
            "pragma solidity ^0.8.0;\n"
            "import \"./Lib.sol\";\n"
            "// top comment\n"
            "\n"
            "contract Main {\n"
            "    uint256 value;   // state\n"
            "}\n"},
        {"Lib.sol", "library Lib {\n}\n"},
    };
    const NormalizedSource norm = normalize_source(addr(1), bundle);

    // Lib.sol is imported by Main.sol, so it is emitted first.
    const std::vector<std::string> lines = norm.lines();
    REQUIRE(lines.size() == 6);
    CHECK(lines[0] == "library Lib {");
    CHECK(lines[1] == "}");
    CHECK(lines[2] == "pragma solidity ^0.8.0;");
    CHECK(lines[3] == "contract Main {");
    CHECK(lines[4] == "uint256 value;");
    CHECK(lines[5] == "}");

    REQUIRE(norm.line_map.size() == 6);
    CHECK(norm.line_map[0] == LineOrigin{"Lib.sol", 1});
    CHECK(norm.line_map[1] == LineOrigin{"Lib.sol", 2});
    CHECK(norm.line_map[2] == LineOrigin{"Main.sol", 1});
    CHECK(norm.line_map[3] == LineOrigin{"Main.sol", 5});
    CHECK(norm.line_map[4] == LineOrigin{"Main.sol", 6});
    CHECK(norm.line_map[5] == LineOrigin{"Main.sol", 7});

    CHECK(norm.content_hash == keccak256_hex(norm.canonical_text));
    CHECK(norm.content_hash.size() == 64);
}

TEST_CASE("sources differing only in comments and whitespace normalize equal")
{
    const auto a = normalize_source(addr(1), "C.sol",
        "contract C {\n    // adds one\n    function f(uint x) public pure returns (uint) {\n"
        "        return x + 1;\n    }\n}\n");
    const auto b = normalize_source(addr(2), "C.sol",
        "contract C {\r\n\tfunction f(uint x)  public   pure returns (uint) {\r\n"
        "\t\treturn x + 1; /* inline */\r\n\t}\r\n}");
    CHECK(a.canonical_text == b.canonical_text);
    CHECK(a.content_hash == b.content_hash);
}

TEST_CASE("duplicate groups match the brute force oracle")
{
    // Small text pool so duplicates are frequent.
    const std::vector<std::string> pool = {
        "contract A { uint a; }",
        "contract B { uint b; }",
        "contract C { function f() public {} }",
        "contract D {}",
    };
    std::mt19937 rng{99};
    std::vector<NormalizedSource> sources;
    std::map<std::string, std::int64_t> deployed_at;
    for (unsigned i = 0; i < 60; ++i)
    {
        const std::string& text = pool[rng() % pool.size()];
        sources.push_back(normalize_source(addr(i + 1), "F.sol", text));
        deployed_at[addr(i + 1)] = 1600000000 + static_cast<std::int64_t>(rng() % 1000) * 1000;
    }

    const auto groups = group_duplicates(sources, deployed_at);
    const auto oracle = brute_force_groups(sources);

    REQUIRE(groups.size() == oracle.size());
    std::size_t total_members = 0;
    std::set<std::string> seen;
    for (const DuplicateGroup& g : groups)
    {
        // Locate the oracle partition with the same member set.
        bool found = false;
        for (const auto& [text, members] : oracle)
            if (members == g.members)
                found = true;
        CHECK(found);

        // Representative rule: earliest deployment, then lowest address.
        std::string best = g.members[0];
        for (const std::string& m : g.members)
            if (std::make_pair(deployed_at.at(m), m) < std::make_pair(deployed_at.at(best), best))
                best = m;
        CHECK(g.representative == best);
        CHECK(std::find(g.members.begin(), g.members.end(), g.representative) != g.members.end());

        total_members += g.members.size();
        for (const std::string& m : g.members)
            CHECK(seen.insert(m).second);  // partition: no address twice
    }
    CHECK(total_members == sources.size());
}

TEST_CASE("all-distinct sources form singleton groups")
{
    std::vector<NormalizedSource> sources;
    for (unsigned i = 1; i <= 5; ++i)
        sources.push_back(
            normalize_source(addr(i), "F.sol", "contract C" + std::to_string(i) + " {}"));
    const auto groups = group_duplicates(sources, {});
    CHECK(groups.size() == 5);
    for (const auto& g : groups)
    {
        CHECK(g.members.size() == 1);
        CHECK(g.representative == g.members[0]);
    }
}

TEST_CASE("comment-only variants land in one group")
{
    const std::string base = "contract Same {\nuint x;\n}";
    const std::string commented = "// header\ncontract Same {\n  uint x; /* note */\n}\n";
    std::vector<NormalizedSource> sources = {
        normalize_source(addr(1), "A.sol", base),
        normalize_source(addr(2), "A.sol", commented),
    };
    std::map<std::string, std::int64_t> dates{{addr(1), 2000}, {addr(2), 1000}};
    const auto groups = group_duplicates(sources, dates);
    REQUIRE(groups.size() == 1);
    CHECK(groups[0].members == std::vector<std::string>{addr(1), addr(2)});
    CHECK(groups[0].representative == addr(2));  // earlier deployment wins
}
