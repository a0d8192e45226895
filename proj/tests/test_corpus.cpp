#include "support.hpp"

#include "triage/corpus/corpus.hpp"
#include "triage/corpus/toml.hpp"

#include <gtest/gtest.h>

using namespace triage::corpus;
using testing_support::TempDir;
using testing_support::write_file;

namespace {

const char* kProgram =
    "fn inc(x) {\n"
    "    y = x + 2;\n"
    "    return y;\n"
    "}\n"
    "fn test_inc() {\n"
    "    assert(inc(1) == 2);\n"
    "}\n"
    "fn test_other() {\n"
    "    assert(inc(0) > -5);\n"
    "}\n";

void write_bundle(const fs::path& dir, const std::string& manifest, const std::map<std::string, std::string>& patches,
                  const std::string& program = kProgram) {
    write_file(dir / "main.ml0", program);
    write_file(dir / "bug.toml", manifest);
    for (const auto& [id, text] : patches) write_file(dir / "patches" / (id + ".patch"), text);
}

const char* kManifest =
    "name = \"inc\"\n"
    "files = [\"main.ml0\"]\n"
    "buggy_region = \"main.ml0:2-2\"\n"
    "failing_test = \"test_inc\"\n"
    "passing_tests = [\"test_other\"]\n";

CorpusError::Kind load_error(const fs::path& dir) {
    try {
        load(dir);
    } catch (const CorpusError& e) {
        return e.kind();
    }
    ADD_FAILURE() << "bundle loaded";
    return CorpusError::Kind::Io;
}

}  // namespace

TEST(Toml, Subset) {
    const TomlDocument d = parse_toml(
        "# comment\n"
        "name = \"x\\ty\"\n"
        "lit = 'a\\b'\n"
        "n = -42\n"
        "flag = true\n"
        "list = [\n  \"a\", # first\n  \"b\",\n]\n"
        "[meta]\n"
        "depth = 3\n");
    EXPECT_EQ(d.at("name").as_string(), "x\ty");
    EXPECT_EQ(d.at("lit").as_string(), "a\\b");
    EXPECT_EQ(d.at("n").as_integer(), -42);
    EXPECT_TRUE(d.at("flag").is_bool());
    ASSERT_EQ(d.at("list").as_array().size(), 2u);
    EXPECT_EQ(d.at("list").as_array()[1].as_string(), "b");
    EXPECT_EQ(d.at("meta.depth").as_integer(), 3);
}

TEST(Toml, ErrorsCarryLines) {
    try {
        parse_toml("a = 1\nb = \"open\n");
        FAIL();
    } catch (const TomlError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    EXPECT_THROW(parse_toml("a = 1\na = 2\n"), TomlError);
    EXPECT_THROW(parse_toml("= 1\n"), TomlError);
}

TEST(Load, RanksumHasNineCandidates) {
    const PatchCorpus c = load(testing_support::fixture("ranksum"));
    EXPECT_EQ(c.candidates.size(), 9u);
    EXPECT_EQ(c.failing_test, "test_big");
    EXPECT_EQ(c.buggy_text(), "    n1n2prod = n1 + n2;\n");
    for (std::size_t i = 0; i < c.candidates.size(); ++i) EXPECT_EQ(c.candidates[i].original_rank, int(i) + 1);
}

TEST(Load, AllFixturesLoad) {
    for (const auto& name : testing_support::bundle_names()) {
        EXPECT_NO_THROW(load(testing_support::fixture(name))) << name;
        EXPECT_TRUE(load_truth(testing_support::fixture(name)).has_value()) << name;
    }
}

TEST(Load, DefaultOrderIsLexicographic) {
    TempDir tmp;
    write_bundle(tmp.path(), kManifest, {{"zeta", "    y = x + 1;\n"}, {"alpha", "    y = x + 3;\n"}});
    const PatchCorpus c = load(tmp.path());
    ASSERT_EQ(c.candidates.size(), 2u);
    EXPECT_EQ(c.candidates[0].id, "alpha");
    EXPECT_EQ(c.candidates[1].id, "zeta");
}

TEST(Load, FailingTestThatPassesIsCorrupt) {
    TempDir tmp;
    std::string m = kManifest;
    m.replace(m.find("test_inc"), 8, "test_other");
    m.replace(m.find("[\"test_other\"]"), 14, "[]");
    write_bundle(tmp.path(), m, {{"a", "    y = x + 1;\n"}});
    EXPECT_EQ(load_error(tmp.path()), CorpusError::Kind::Corrupt);
}

TEST(Load, DuplicatePatchIdsAreSchemaErrors) {
    TempDir tmp;
    write_bundle(tmp.path(), std::string(kManifest) + "patch_order = [\"a\", \"a\"]\n", {{"a", "    y = x + 1;\n"}});
    EXPECT_EQ(load_error(tmp.path()), CorpusError::Kind::Schema);
}

TEST(Load, SchemaErrors) {
    {
        TempDir tmp;
        write_bundle(tmp.path(), std::string(kManifest) + "colour = \"red\"\n", {{"a", "    y = x + 1;\n"}});
        EXPECT_EQ(load_error(tmp.path()), CorpusError::Kind::Schema);
    }
    {
        TempDir tmp;
        write_bundle(tmp.path(), std::string(kManifest) + "patch_order = [\"a\", \"b\"]\n", {{"a", "    y = x + 1;\n"}});
        EXPECT_EQ(load_error(tmp.path()), CorpusError::Kind::Schema);
    }
    {
        TempDir tmp;
        std::string m = kManifest;
        m.replace(m.find("main.ml0:2-2"), 12, "main.ml0:two");
        write_bundle(tmp.path(), m, {{"a", "    y = x + 1;\n"}});
        EXPECT_EQ(load_error(tmp.path()), CorpusError::Kind::Schema);
    }
}

TEST(Load, MissingDirectoryIsIo) {
    TempDir tmp;
    EXPECT_EQ(load_error(tmp.path() / "nothing"), CorpusError::Kind::Io);
}

TEST(Load, BrokenProgramIsParseError) {
    TempDir tmp;
    write_bundle(tmp.path(), kManifest, {{"a", "    y = x + 1;\n"}}, "fn inc(x) {\n    y = ;\n}\n");
    EXPECT_EQ(load_error(tmp.path()), CorpusError::Kind::Parse);
}

TEST(Load, ErrorMessageNamesKind) {
    TempDir tmp;
    try {
        load(tmp.path() / "nothing");
        FAIL();
    } catch (const CorpusError& e) {
        EXPECT_EQ(std::string(e.what()).rfind("io error: ", 0), 0u) << e.what();
    }
}

TEST(Validate, Reasons) {
    TempDir tmp;
    write_bundle(tmp.path(), kManifest,
                 {{"a_identity", "    y = x + 2;\n"},
                  {"b_correct", "    y = x + 1;\n"},
                  {"c_breaks", "    if (x == 1) {\n        y = 2;\n    } else {\n        y = -9;\n    }\n"},
                  {"d_spin", "    y = x + 1;\n    while (true) {\n        y = y;\n    }\n"},
                  {"e_syntax", "    y = x + ;\n"},
                  {"f_crash", "    y = x / 0;\n"}});
    ValidateOptions opts;
    opts.run.step_budget = 20'000;
    const ValidationResult r = validate(load(tmp.path()), opts);
    ASSERT_EQ(r.plausible.size(), 1u);
    EXPECT_EQ(r.plausible[0].id, "b_correct");
    std::map<std::string, std::string> reasons;
    for (const auto& x : r.implausible) reasons[x.id] = x.reason;
    ASSERT_EQ(reasons.size(), 5u);
    EXPECT_EQ(reasons["a_identity"].rfind("failing test still fails", 0), 0u) << reasons["a_identity"];
    EXPECT_EQ(reasons["c_breaks"].rfind("breaks passing test test_other", 0), 0u) << reasons["c_breaks"];
    EXPECT_NE(reasons["d_spin"].find("step budget"), std::string::npos) << reasons["d_spin"];
    EXPECT_EQ(reasons["e_syntax"].rfind("parse failure", 0), 0u) << reasons["e_syntax"];
    EXPECT_EQ(reasons["f_crash"].rfind("failing test still fails", 0), 0u) << reasons["f_crash"];
}

TEST(Validate, FixtureCorrectPatchesArePlausible) {
    for (const auto& name : testing_support::bundle_names()) {
        const auto dir = testing_support::fixture(name);
        const PatchCorpus c = load(dir);
        const auto truth = load_truth(dir);
        ASSERT_TRUE(truth);
        const Candidate* correct = c.find(truth->correct);
        ASSERT_NE(correct, nullptr) << name;
        EXPECT_EQ(check_candidate(c, *correct), std::nullopt) << name;
    }
}

TEST(Validate, ThreadCountDoesNotChangeResult) {
    const PatchCorpus c = load(testing_support::fixture("celsius"));
    ValidateOptions one, many;
    one.threads = 1;
    many.threads = 4;
    const auto a = validate(c, one), b = validate(c, many);
    EXPECT_EQ(a.plausible, b.plausible);
    EXPECT_EQ(a.implausible, b.implausible);
    EXPECT_EQ(a.plausible.size(), 2u);
}
