#include <filesystem>
#include <string>

#include <gtest/gtest.h>

#include "config.hpp"
#include "output.hpp"

using namespace levylab;
using namespace levylab::cli;

TEST(Output, Sha256KnownVectors) {
    EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Output, CsvQuotesOnlyWhenNeeded) {
    EXPECT_EQ(csv_field("plain"), "plain");
    EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
    EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    EXPECT_EQ(csv_field("two\nlines"), "\"two\nlines\"");
}

TEST(Output, CsvTextLayout) {
    Table t;
    t.columns = {"name", "value"};
    t.add({"x,y", 0.1});
    t.add({"z", std::size_t{3}});
    EXPECT_EQ(csv_text(t, "abc"), "# config_digest=abc\nname,value\n\"x,y\",0.1\nz,3\n");
}

TEST(Output, ManifestRoundTripKeepsTheConfigEcho) {
    const auto cfg = parse_config_text("[operator]\nkind = \"fast_diffusion\"\nr = 0.5\n");
    RunManifest m;
    m.config_toml = to_toml(cfg);
    m.config_digest = sha256_hex(m.config_toml);
    m.command = "verify";
    m.args = {"--claim", "A1-2"};
    m.version = "0.1.0";
    m.outputs = {{"summary.csv", "00ff"}, {"a1_2.csv", "abcd"}};
    ClaimSummary c;
    c.claim = "A1-2";
    c.pass = true;
    c.key_statistic = "worst_ratio_mismatch";
    c.key_value = 1.25;
    m.claims = {c};
    const std::string text = m.to_text();
    const auto back = parse_manifest(text, "m.toml");
    EXPECT_EQ(back.config_toml, m.config_toml);
    EXPECT_EQ(back.config_digest, m.config_digest);
    EXPECT_EQ(back.command, "verify");
    EXPECT_EQ(back.args, m.args);
    EXPECT_EQ(back.outputs, m.outputs);
    // The echo on its own is a valid config.
    EXPECT_EQ(to_toml(parse_config_text(back.config_toml)), m.config_toml);
    EXPECT_THROW(parse_manifest("[operator]\nkind = \"p_laplace\"\n", "x"), std::runtime_error);
}

TEST(Output, OutputDirRecordsDigests) {
    const auto dir = std::filesystem::temp_directory_path() / "levylab_output_test";
    std::filesystem::remove_all(dir);
    OutputDir out(dir, "d1");
    Table t;
    t.columns = {"a"};
    t.add({1});
    out.write_csv("t.csv", t);
    out.write_raw("r.txt", "hello");
    EXPECT_EQ(read_file(dir / "t.csv"), "# config_digest=d1\na\n1\n");
    EXPECT_EQ(out.digests().at("t.csv"), sha256_hex(read_file(dir / "t.csv")));
    EXPECT_EQ(out.digests().at("r.txt"), sha256_hex("hello"));
    std::filesystem::remove_all(dir);
}
