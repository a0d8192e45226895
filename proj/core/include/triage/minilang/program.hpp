#pragma once

#include "triage/minilang/ast.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace triage::minilang {

using SourceMap = std::map<std::string, std::string>;

// An immutable parsed program. Copies share the syntax tree.
class Program {
  public:
    Program() = default;
    Program(SourceMap files, std::vector<FunctionPtr> functions, NodeId node_count);

    [[nodiscard]] const SourceMap& files() const { return files_; }
    [[nodiscard]] const std::vector<FunctionPtr>& functions() const { return functions_; }
    [[nodiscard]] NodeId node_count() const { return node_count_; }

    [[nodiscard]] const FunctionDecl* find_function(std::string_view name) const;
    // Test functions in declaration order (files in name order).
    [[nodiscard]] std::vector<std::string> test_names() const;

    [[nodiscard]] const Stmt* stmt_by_id(NodeId id) const;
    [[nodiscard]] const Expr* expr_by_id(NodeId id) const;
    [[nodiscard]] const FunctionDecl* owner_of(NodeId id) const;

    [[nodiscard]] const Stmt* statement_at(const SourceLocation& loc) const;
    [[nodiscard]] const FunctionDecl* function_containing(const SourceLocation& loc) const;
    // Every statement (at any nesting depth) whose first token lies in `span`.
    [[nodiscard]] std::vector<const Stmt*> statements_in(const LineSpan& span) const;
    // The text of lines [first_line, last_line] of a file, newline-terminated.
    [[nodiscard]] std::string line_text(const LineSpan& span) const;

  private:
    void index_block(const Block& block, const FunctionDecl* owner);
    void index_expr(const Expr& expr, const FunctionDecl* owner);

    SourceMap files_;
    std::vector<FunctionPtr> functions_;
    NodeId node_count_ = 0;
    std::vector<const Stmt*> stmts_;
    std::vector<const Expr*> exprs_;
    std::vector<const FunctionDecl*> owners_;
};

// Tree equality ignoring node ids and source locations.
bool structurally_equal(const Program& a, const Program& b);
bool structurally_equal(const Expr& a, const Expr& b);
bool structurally_equal(const Stmt& a, const Stmt& b);

}  // namespace triage::minilang
