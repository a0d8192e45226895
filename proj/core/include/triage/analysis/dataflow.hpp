#pragma once

#include "triage/analysis/cfg.hpp"

#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace triage::analysis {

// (variable, definition site) -> use sites reached without an intervening
// redefinition.
using DefUseChains = std::map<Definition, std::set<SourceLocation>>;
// use site -> variables the statement at that site defines from what it reads.
using UseDefChains = std::map<SourceLocation, std::set<std::string>>;

struct FunctionAnalysis {
    const minilang::FunctionDecl* function = nullptr;
    Cfg cfg;
    DefUseChains def_use;
    UseDefChains use_def;
};

// Reaching definitions by iterative fixpoint over the statement CFG.
FunctionAnalysis def_use_analysis(const minilang::FunctionDecl& fn);

std::optional<std::string> defined_variable(const minilang::Stmt& stmt);

struct Use {
    std::string variable;
    SourceLocation site;
    friend auto operator<=>(const Use&, const Use&) = default;
};

// Variables and locations data-flow reachable from a seed statement.
struct AffectedSet {
    std::string function;
    std::set<std::string> variables;
    std::set<Definition> definitions;
    std::set<Use> uses;
    std::set<SourceLocation> locations;  // definition and use sites
    // Call expressions through which the faulty value reaches this frame
    // (outer frames only).
    std::set<SourceLocation> call_sites;
    std::vector<std::string> diagnostics;
    std::size_t pops = 0;  // worklist iterations

    friend bool operator==(const AffectedSet& a, const AffectedSet& b) {
        return a.function == b.function && a.variables == b.variables && a.definitions == b.definitions &&
               a.uses == b.uses && a.locations == b.locations && a.call_sites == b.call_sites;
    }
};

// Worklist closure from the variable `stmt` defines.
AffectedSet affected_variables(const minilang::Stmt& stmt, const FunctionAnalysis& analysis);
// Same closure seeded by several statements (a multi-statement buggy region).
AffectedSet affected_from(std::span<const minilang::Stmt* const> seeds, const FunctionAnalysis& analysis);

struct StackFrame {
    std::string function;
    SourceLocation location;  // buggy statement (innermost) or call site (outer frames)
    friend bool operator==(const StackFrame&, const StackFrame&) = default;
};

// Innermost frame first.
struct CallStackTrace {
    std::vector<StackFrame> frames;
    std::vector<std::string> diagnostics;
    [[nodiscard]] bool empty() const { return frames.empty(); }
    friend bool operator==(const CallStackTrace& a, const CallStackTrace& b) { return a.frames == b.frames; }
};

class AnalysisError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Runs the closure in every frame: the innermost from the buggy statement
// (or `innermost_seeds` when given), each outer frame from its call site.
// Throws AnalysisError when a frame does not match the program.
std::vector<AffectedSet> interprocedural_affected(const CallStackTrace& stack, const minilang::Program& program,
                                                  std::span<const minilang::Stmt* const> innermost_seeds = {});

// The statement of `fn` that owns the call expression at `call_site`.
const minilang::Stmt* statement_with_call(const minilang::FunctionDecl& fn, const SourceLocation& call_site);

}  // namespace triage::analysis
