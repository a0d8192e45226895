#include "oracles/oracles.hpp"
#include "support.hpp"

#include "triage/analysis/dataflow.hpp"
#include "triage/tracer/tracer.hpp"

#include <random>

#include <gtest/gtest.h>

using namespace triage::analysis;
using triage::minilang::parse_source;
using triage::minilang::Program;
using triage::minilang::Stmt;

namespace {

SourceLocation at(int line, int col, const std::string& file = "main.ml0") { return SourceLocation{file, line, col}; }

const Stmt& stmt_at(const Program& p, int line, int col) {
    const Stmt* s = p.statement_at(at(line, col));
    if (!s) throw std::runtime_error("no statement at line " + std::to_string(line));
    return *s;
}

oracle::Closure as_closure(const AffectedSet& s) {
    oracle::Closure c;
    c.variables = s.variables;
    for (const auto& d : s.definitions) c.definitions.insert({d.variable, {d.site.line, d.site.col}});
    for (const auto& u : s.uses) c.uses.insert({u.variable, {u.site.line, u.site.col}});
    for (const auto& l : s.locations) c.locations.insert({l.line, l.col});
    return c;
}

void expect_same(const oracle::Closure& got, const oracle::Closure& want, const std::string& context) {
    EXPECT_EQ(got.variables, want.variables) << context;
    EXPECT_EQ(got.definitions, want.definitions) << context;
    EXPECT_EQ(got.uses, want.uses) << context;
    EXPECT_EQ(got.locations, want.locations) << context;
}

}  // namespace

TEST(DefUse, ReturnDefinesNothing) {
    const Program p = parse_source("fn f() {\n    let x = 1;\n    return x;\n}\n");
    const FunctionAnalysis fa = def_use_analysis(*p.find_function("f"));
    EXPECT_EQ(fa.def_use.at(Definition{"x", at(2, 5)}), std::set<SourceLocation>{at(3, 5)});
    const auto ud = fa.use_def.find(at(3, 5));
    EXPECT_TRUE(ud == fa.use_def.end() || ud->second.empty());
}

TEST(DefUse, Chain) {
    const Program p = parse_source("fn f() {\n    let x = 1;\n    let y = x + 1;\n    let z = y * 2;\n}\n");
    const FunctionAnalysis fa = def_use_analysis(*p.find_function("f"));
    EXPECT_EQ(fa.def_use.at(Definition{"x", at(2, 5)}), std::set<SourceLocation>{at(3, 5)});
    EXPECT_EQ(fa.def_use.at(Definition{"y", at(3, 5)}), std::set<SourceLocation>{at(4, 5)});
    EXPECT_EQ(fa.use_def.at(at(3, 5)), std::set<std::string>{"y"});
    EXPECT_EQ(fa.use_def.at(at(4, 5)), std::set<std::string>{"z"});
}

TEST(DefUse, LoopBackEdge) {
    const Program p = parse_source("fn f() {\n    let i = 0;\n    while (i < 3) {\n        i = i + 1;\n    }\n}\n");
    const FunctionAnalysis fa = def_use_analysis(*p.find_function("f"));
    const std::set<SourceLocation> both = {at(3, 5), at(4, 9)};
    EXPECT_EQ(fa.def_use.at(Definition{"i", at(2, 5)}), both);
    EXPECT_EQ(fa.def_use.at(Definition{"i", at(4, 9)}), both);
}

TEST(DefinedVariable, Cases) {
    const Program p = parse_source("fn f(n1, n2, x) {\n    n1n2prod = n1 + n2;\n    print(x);\n    return n1n2prod;\n}\n");
    EXPECT_EQ(defined_variable(stmt_at(p, 2, 5)), "n1n2prod");
    EXPECT_EQ(defined_variable(stmt_at(p, 3, 5)), std::nullopt);
    EXPECT_EQ(defined_variable(stmt_at(p, 4, 5)), std::nullopt);
}

TEST(Affected, WrongOperatorExample) {
    const Program p = parse_source(
        "fn calc(U, n1, n2) {\n"
        "    n1n2prod = n1*n2;\n"
        "    VarU = n1n2prod*(n1+n2+1)/12.0;\n"
        "    z = (U - n1n2prod/2.0)/sqrt(VarU);\n"
        "    return z;\n"
        "}\n");
    const FunctionAnalysis fa = def_use_analysis(*p.find_function("calc"));
    const AffectedSet s = affected_variables(stmt_at(p, 2, 5), fa);
    EXPECT_EQ(s.variables, (std::set<std::string>{"n1n2prod", "VarU", "z"}));
}

TEST(Affected, UnusedDefinition) {
    const Program p = parse_source("fn f(a) {\n    d = a + 1;\n    return a;\n}\n");
    const FunctionAnalysis fa = def_use_analysis(*p.find_function("f"));
    const AffectedSet s = affected_variables(stmt_at(p, 2, 5), fa);
    EXPECT_EQ(s.variables, std::set<std::string>{"d"});
    EXPECT_EQ(s.locations, std::set<SourceLocation>{at(2, 5)});
}

TEST(Affected, ChainOfFour) {
    const Program p = parse_source("fn f(a) {\n    x = a;\n    y = x * 2;\n    z = y - 1;\n    w = z + z;\n    return w;\n}\n");
    const auto& fn = *p.find_function("f");
    const AffectedSet s = affected_variables(stmt_at(p, 2, 5), def_use_analysis(fn));
    EXPECT_EQ(s.variables, (std::set<std::string>{"x", "y", "z", "w"}));
    expect_same(as_closure(s), oracle::affected_closure(fn, {{2, 5}}), "chain");
}

TEST(Affected, SeedWithoutDefinitionIsDiagnosed) {
    const Program p = parse_source("fn f(a) {\n    print(a);\n}\n");
    const AffectedSet s = affected_variables(stmt_at(p, 2, 5), def_use_analysis(*p.find_function("f")));
    EXPECT_TRUE(s.variables.empty());
    EXPECT_FALSE(s.diagnostics.empty());
}

TEST(Affected, MatchesReachabilityOracleOnFixtures) {
    int checked = 0;
    for (const auto& name : testing_support::bundle_names()) {
        const auto corpus = triage::corpus::load(testing_support::fixture(name));
        for (const auto& fn : corpus.program.functions()) {
            const FunctionAnalysis fa = def_use_analysis(*fn);
            triage::minilang::walk_stmts(fn->body, [&](const Stmt& s) {
                if (!defined_variable(s)) return;
                expect_same(as_closure(affected_variables(s, fa)), oracle::affected_closure(*fn, {{s.loc.line, s.loc.col}}),
                            name + " " + s.loc.to_string());
                ++checked;
            });
        }
    }
    EXPECT_GE(checked, 30);
}

TEST(Affected, MatchesReachabilityOracleOnRandomFunctions) {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 200; ++i) {
        const std::string src = oracle::random_straight_line(rng, 20);
        const Program p = parse_source(src);
        const auto& fn = *p.find_function("f");
        const FunctionAnalysis fa = def_use_analysis(fn);
        for (const auto& s : fn.body.stmts) {
            if (!defined_variable(*s)) continue;
            expect_same(as_closure(affected_variables(*s, fa)), oracle::affected_closure(fn, {{s->loc.line, s->loc.col}}),
                        src);
        }
    }
}

TEST(Affected, MultiStatementSeeds) {
    const Program p = parse_source("fn f(xs) {\n    best = 0;\n    i = 0;\n    k = best + i;\n    return k;\n}\n");
    const auto& fn = *p.find_function("f");
    const Stmt* seeds[] = {&stmt_at(p, 2, 5), &stmt_at(p, 3, 5)};
    const AffectedSet s = affected_from(seeds, def_use_analysis(fn));
    EXPECT_EQ(s.variables, (std::set<std::string>{"best", "i", "k"}));
    expect_same(as_closure(s), oracle::affected_closure(fn, {{2, 5}, {3, 5}}), "multi");
}

TEST(Interprocedural, RanksumThreeFrames) {
    const auto corpus = triage::corpus::load(testing_support::fixture("ranksum"));
    const Program& p = corpus.program;
    const CallStackTrace stack = triage::tracer::capture_stack(p, "test_big", at(3, 5));
    const auto sets = interprocedural_affected(stack, p);
    ASSERT_EQ(sets.size(), 3u);

    EXPECT_EQ(sets[0].function, "calcP");
    EXPECT_EQ(sets[0].variables, (std::set<std::string>{"n1n2prod", "VarU", "z"}));
    EXPECT_EQ(sets[0].locations, (std::set<SourceLocation>{at(3, 5), at(4, 5), at(5, 5), at(6, 5)}));
    EXPECT_EQ(sets[0].uses, (std::set<Use>{{"n1n2prod", at(4, 5)}, {"n1n2prod", at(5, 5)}, {"VarU", at(5, 5)},
                                           {"z", at(6, 5)}}));
    EXPECT_TRUE(sets[0].call_sites.empty());

    EXPECT_EQ(sets[1].function, "uTest");
    EXPECT_EQ(sets[1].variables, std::set<std::string>{"p"});
    EXPECT_EQ(sets[1].locations, (std::set<SourceLocation>{at(26, 5), at(27, 5)}));
    EXPECT_EQ(sets[1].call_sites, std::set<SourceLocation>{at(26, 9)});

    EXPECT_EQ(sets[2].function, "test_big");
    EXPECT_EQ(sets[2].variables, (std::set<std::string>{"r", "diff"}));
    EXPECT_EQ(sets[2].locations, (std::set<SourceLocation>{at(31, 5), at(32, 5), at(33, 5)}));
    EXPECT_EQ(sets[2].call_sites, std::set<SourceLocation>{at(31, 9)});

    for (const auto& s : sets) {
        const auto& fn = *p.find_function(s.function);
        std::vector<oracle::Site> seeds;
        for (const auto& d : s.definitions) {
            if (s.call_sites.empty() || p.statement_at(d.site) == statement_with_call(fn, *s.call_sites.begin())) {
                seeds.push_back({d.site.line, d.site.col});
            }
        }
        expect_same(as_closure(s), oracle::affected_closure(fn, seeds), s.function);
    }
}

TEST(Interprocedural, SingleFrameMatchesIntraprocedural) {
    const Program p = parse_source("fn test_a() {\n    x = 1;\n    y = x + 2;\n    assert(y == 3);\n}\n");
    const CallStackTrace stack{{StackFrame{"test_a", at(2, 5)}}, {}};
    const auto sets = interprocedural_affected(stack, p);
    ASSERT_EQ(sets.size(), 1u);
    EXPECT_EQ(sets[0], affected_variables(stmt_at(p, 2, 5), def_use_analysis(*p.find_function("test_a"))));
}

TEST(Interprocedural, CallOnlyInCondition) {
    const Program p = parse_source(
        "fn g(a) {\n    r = a * 2;\n    return r;\n}\n"
        "fn test_c() {\n    if (g(1) > 0.05) {\n        print(1);\n    }\n}\n");
    const CallStackTrace stack = triage::tracer::capture_stack(p, "test_c", at(2, 5));
    ASSERT_EQ(stack.frames.size(), 2u);
    const auto sets = interprocedural_affected(stack, p);
    ASSERT_EQ(sets.size(), 2u);
    EXPECT_TRUE(sets[1].variables.empty());
    EXPECT_EQ(sets[1].locations, std::set<SourceLocation>{at(6, 5)});
    EXPECT_EQ(sets[1].call_sites, std::set<SourceLocation>{at(6, 9)});
}

TEST(Interprocedural, MismatchedFrameThrows) {
    const Program p = parse_source("fn test_a() {\n    x = 1;\n}\n");
    const CallStackTrace stack{{StackFrame{"nope", at(2, 5)}}, {}};
    EXPECT_THROW(interprocedural_affected(stack, p), AnalysisError);
}

TEST(Cfg, GuardsAndBackEdges) {
    const Program p = parse_source("fn f(n) {\n    i = 0;\n    while (i < n) {\n        i = i + 1;\n    }\n    return i;\n}\n");
    const Cfg cfg = Cfg::build(*p.find_function("f"));
    const auto guard = cfg.node_at(at(3, 5));
    const auto body = cfg.node_at(at(4, 9));
    ASSERT_TRUE(guard && body);
    EXPECT_EQ(cfg.nodes[*guard].kind, CfgNode::Kind::Guard);
    EXPECT_EQ(cfg.nodes[*body].succ, std::vector<std::size_t>{*guard});
    EXPECT_EQ(cfg.nodes[Cfg::kEntry].defs.size(), 1u);
}
