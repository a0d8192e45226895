#pragma once

#include "triage/minilang/program.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace triage::analysis {

using minilang::SourceLocation;

struct Definition {
    std::string variable;
    SourceLocation site;  // defining statement, or the parameter token
    friend auto operator<=>(const Definition&, const Definition&) = default;
};

// Statement-level control-flow graph of one function. `if` and `while`
// contribute a guard node at the statement's location; loops close with a
// back edge to their guard.
struct CfgNode {
    enum class Kind { Entry, Exit, Statement, Guard };
    Kind kind = Kind::Statement;
    const minilang::Stmt* stmt = nullptr;
    SourceLocation loc;
    std::vector<Definition> defs;  // parameters on Entry, at most one otherwise
    std::set<std::string> uses;
    std::vector<std::size_t> succ;
};

struct Cfg {
    static constexpr std::size_t kEntry = 0;
    static constexpr std::size_t kExit = 1;

    std::vector<CfgNode> nodes;

    static Cfg build(const minilang::FunctionDecl& fn);

    // Node for a statement (its guard, for if/while).
    [[nodiscard]] std::optional<std::size_t> node_of(const minilang::Stmt& stmt) const;
    [[nodiscard]] std::optional<std::size_t> node_at(const SourceLocation& loc) const;
};

// Variables read by an expression tree.
std::set<std::string> variables_read(const minilang::Expr& expr);

}  // namespace triage::analysis
