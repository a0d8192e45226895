#pragma once

#include "triage/minilang/source_location.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace triage::minilang {

// Identifies a node within one Program. Assigned in parse order.
using NodeId = std::uint32_t;

enum class BinaryOp { Add, Sub, Mul, Div, Mod, Eq, Ne, Lt, Le, Gt, Ge, And, Or };
enum class UnaryOp { Neg, Not };

std::string_view to_string(BinaryOp op);
std::string_view to_string(UnaryOp op);
bool is_arithmetic(BinaryOp op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct IntLiteral {
    std::int64_t value = 0;
};
struct FloatLiteral {
    double value = 0.0;
};
struct StringLiteral {
    std::string value;  // decoded
};
struct BoolLiteral {
    bool value = false;
};
struct VarRef {
    std::string name;
    std::uint32_t slot = 0;  // index into the owning function's frame
};
struct UnaryExpr {
    UnaryOp op;
    ExprPtr operand;
};
struct BinaryExpr {
    BinaryOp op;
    ExprPtr lhs;
    ExprPtr rhs;
};
struct CallExpr {
    std::string callee;
    std::vector<ExprPtr> args;
};
struct IndexExpr {
    ExprPtr target;
    ExprPtr index;
};
struct ListExpr {
    std::vector<ExprPtr> elements;
};

struct Expr {
    using Node = std::variant<IntLiteral, FloatLiteral, StringLiteral, BoolLiteral, VarRef, UnaryExpr, BinaryExpr,
                              CallExpr, IndexExpr, ListExpr>;
    NodeId id = 0;
    SourceLocation loc;  // first token
    Node node;
};

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

struct Block {
    std::vector<StmtPtr> stmts;
};

// `let x = e;` and `x = e;` both bind x in the function scope.
struct AssignStmt {
    bool is_let = false;
    std::string name;
    std::uint32_t slot = 0;
    ExprPtr value;
};
struct IfStmt {
    ExprPtr cond;
    Block then_block;
    std::optional<Block> else_block;
};
struct WhileStmt {
    ExprPtr cond;
    Block body;
};
struct ReturnStmt {
    ExprPtr value;  // may be null
};
struct ExprStmt {
    ExprPtr expr;
};

struct Stmt {
    using Node = std::variant<AssignStmt, IfStmt, WhileStmt, ReturnStmt, ExprStmt>;
    NodeId id = 0;
    SourceLocation loc;  // first token
    int end_line = 1;    // last token of the statement (closing brace for compound ones)
    int end_col = 1;
    Node node;
};

struct Param {
    std::string name;
    SourceLocation loc;
};

struct FunctionDecl {
    std::string name;
    SourceLocation loc;  // the `fn` keyword
    int end_line = 1;
    std::vector<Param> params;
    Block body;
    std::uint32_t slot_count = 0;
    std::vector<std::string> slot_names;  // slot -> variable name

    [[nodiscard]] bool is_test() const { return name.rfind("test_", 0) == 0; }
};

using FunctionPtr = std::shared_ptr<const FunctionDecl>;

// Visits every expression below `expr` (pre-order, including `expr`).
template <typename F>
void walk_expr(const Expr& expr, F&& visit);

// Visits every statement in `block`, recursing into nested blocks (pre-order).
template <typename F>
void walk_stmts(const Block& block, F&& visit);

// Expressions directly owned by a statement (not those of nested blocks).
std::vector<const Expr*> statement_exprs(const Stmt& stmt);

}  // namespace triage::minilang

#include "triage/minilang/ast_walk.inl"
