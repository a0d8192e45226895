#include "triage/minilang/program.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <sstream>

namespace triage::minilang {

std::string_view to_string(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add: return "+";
        case BinaryOp::Sub: return "-";
        case BinaryOp::Mul: return "*";
        case BinaryOp::Div: return "/";
        case BinaryOp::Mod: return "%";
        case BinaryOp::Eq: return "==";
        case BinaryOp::Ne: return "!=";
        case BinaryOp::Lt: return "<";
        case BinaryOp::Le: return "<=";
        case BinaryOp::Gt: return ">";
        case BinaryOp::Ge: return ">=";
        case BinaryOp::And: return "&&";
        case BinaryOp::Or: return "||";
    }
    return "?";
}

std::string_view to_string(UnaryOp op) { return op == UnaryOp::Neg ? "-" : "!"; }

bool is_arithmetic(BinaryOp op) {
    return op == BinaryOp::Add || op == BinaryOp::Sub || op == BinaryOp::Mul || op == BinaryOp::Div ||
           op == BinaryOp::Mod;
}

std::vector<const Expr*> statement_exprs(const Stmt& stmt) {
    std::vector<const Expr*> out;
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, AssignStmt>) {
                out.push_back(n.value.get());
            } else if constexpr (std::is_same_v<T, IfStmt> || std::is_same_v<T, WhileStmt>) {
                out.push_back(n.cond.get());
            } else if constexpr (std::is_same_v<T, ReturnStmt>) {
                if (n.value) out.push_back(n.value.get());
            } else if constexpr (std::is_same_v<T, ExprStmt>) {
                out.push_back(n.expr.get());
            }
        },
        stmt.node);
    return out;
}

LineSpan LineSpan::parse(const std::string& text) {
    const auto colon = text.rfind(':');
    if (colon == std::string::npos || colon == 0) throw std::invalid_argument("line span '" + text + "': expected file:line[-line]");
    LineSpan span;
    span.file = text.substr(0, colon);
    const std::string range = text.substr(colon + 1);
    const auto dash = range.find('-');
    auto to_int = [&](std::string_view s) {
        int v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size() || v < 1) {
            throw std::invalid_argument("line span '" + text + "': bad line number '" + std::string(s) + "'");
        }
        return v;
    };
    if (dash == std::string::npos) {
        span.first_line = span.last_line = to_int(range);
    } else {
        span.first_line = to_int(std::string_view(range).substr(0, dash));
        span.last_line = to_int(std::string_view(range).substr(dash + 1));
    }
    if (span.last_line < span.first_line) throw std::invalid_argument("line span '" + text + "': end before start");
    return span;
}

Program::Program(SourceMap files, std::vector<FunctionPtr> functions, NodeId node_count)
    : files_(std::move(files)), functions_(std::move(functions)), node_count_(node_count) {
    stmts_.assign(node_count_, nullptr);
    exprs_.assign(node_count_, nullptr);
    owners_.assign(node_count_, nullptr);
    for (const auto& fn : functions_) index_block(fn->body, fn.get());
}

void Program::index_block(const Block& block, const FunctionDecl* owner) {
    walk_stmts(block, [&](const Stmt& s) {
        stmts_[s.id] = &s;
        owners_[s.id] = owner;
        for (const Expr* e : statement_exprs(s)) index_expr(*e, owner);
    });
}

void Program::index_expr(const Expr& expr, const FunctionDecl* owner) {
    walk_expr(expr, [&](const Expr& e) {
        exprs_[e.id] = &e;
        owners_[e.id] = owner;
    });
}

const FunctionDecl* Program::find_function(std::string_view name) const {
    for (const auto& fn : functions_) {
        if (fn->name == name) return fn.get();
    }
    return nullptr;
}

std::vector<std::string> Program::test_names() const {
    std::vector<std::string> out;
    for (const auto& fn : functions_) {
        if (fn->is_test()) out.push_back(fn->name);
    }
    return out;
}

const Stmt* Program::stmt_by_id(NodeId id) const { return id < stmts_.size() ? stmts_[id] : nullptr; }
const Expr* Program::expr_by_id(NodeId id) const { return id < exprs_.size() ? exprs_[id] : nullptr; }
const FunctionDecl* Program::owner_of(NodeId id) const { return id < owners_.size() ? owners_[id] : nullptr; }

const Stmt* Program::statement_at(const SourceLocation& loc) const {
    for (const Stmt* s : stmts_) {
        if (s && s->loc == loc) return s;
    }
    return nullptr;
}

const FunctionDecl* Program::function_containing(const SourceLocation& loc) const {
    for (const auto& fn : functions_) {
        if (fn->loc.file == loc.file && loc.line >= fn->loc.line && loc.line <= fn->end_line) return fn.get();
    }
    return nullptr;
}

std::vector<const Stmt*> Program::statements_in(const LineSpan& span) const {
    std::vector<const Stmt*> out;
    for (const Stmt* s : stmts_) {
        if (s && s->loc.file == span.file && span.contains(s->loc.line)) out.push_back(s);
    }
    std::sort(out.begin(), out.end(), [](const Stmt* a, const Stmt* b) { return a->loc < b->loc; });
    return out;
}

std::string Program::line_text(const LineSpan& span) const {
    auto it = files_.find(span.file);
    if (it == files_.end()) throw std::invalid_argument("unknown file '" + span.file + "'");
    std::istringstream in(it->second);
    std::string line;
    std::string out;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (span.contains(n)) out += line + "\n";
        if (n >= span.last_line) break;
    }
    if (n < span.last_line) throw std::invalid_argument("line span " + span.to_string() + " exceeds file length");
    return out;
}

// --- structural equality -------------------------------------------------

namespace {

bool block_equal(const Block& a, const Block& b);

bool expr_ptr_equal(const ExprPtr& a, const ExprPtr& b) {
    if (!a || !b) return !a && !b;
    return structurally_equal(*a, *b);
}

bool exprs_equal(const std::vector<ExprPtr>& a, const std::vector<ExprPtr>& b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), expr_ptr_equal);
}

bool block_equal(const Block& a, const Block& b) {
    return a.stmts.size() == b.stmts.size() &&
           std::equal(a.stmts.begin(), a.stmts.end(), b.stmts.begin(),
                      [](const StmtPtr& x, const StmtPtr& y) { return structurally_equal(*x, *y); });
}

}  // namespace

bool structurally_equal(const Expr& a, const Expr& b) {
    if (a.node.index() != b.node.index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b.node);
            if constexpr (std::is_same_v<T, IntLiteral> || std::is_same_v<T, BoolLiteral> ||
                          std::is_same_v<T, StringLiteral>) {
                return x.value == y.value;
            } else if constexpr (std::is_same_v<T, FloatLiteral>) {
                return std::memcmp(&x.value, &y.value, sizeof(double)) == 0;
            } else if constexpr (std::is_same_v<T, VarRef>) {
                return x.name == y.name;
            } else if constexpr (std::is_same_v<T, UnaryExpr>) {
                return x.op == y.op && expr_ptr_equal(x.operand, y.operand);
            } else if constexpr (std::is_same_v<T, BinaryExpr>) {
                return x.op == y.op && expr_ptr_equal(x.lhs, y.lhs) && expr_ptr_equal(x.rhs, y.rhs);
            } else if constexpr (std::is_same_v<T, CallExpr>) {
                return x.callee == y.callee && exprs_equal(x.args, y.args);
            } else if constexpr (std::is_same_v<T, IndexExpr>) {
                return expr_ptr_equal(x.target, y.target) && expr_ptr_equal(x.index, y.index);
            } else {
                return exprs_equal(x.elements, y.elements);
            }
        },
        a.node);
}

bool structurally_equal(const Stmt& a, const Stmt& b) {
    if (a.node.index() != b.node.index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b.node);
            if constexpr (std::is_same_v<T, AssignStmt>) {
                return x.is_let == y.is_let && x.name == y.name && expr_ptr_equal(x.value, y.value);
            } else if constexpr (std::is_same_v<T, IfStmt>) {
                if (!expr_ptr_equal(x.cond, y.cond) || !block_equal(x.then_block, y.then_block)) return false;
                if (x.else_block.has_value() != y.else_block.has_value()) return false;
                return !x.else_block || block_equal(*x.else_block, *y.else_block);
            } else if constexpr (std::is_same_v<T, WhileStmt>) {
                return expr_ptr_equal(x.cond, y.cond) && block_equal(x.body, y.body);
            } else if constexpr (std::is_same_v<T, ReturnStmt>) {
                return expr_ptr_equal(x.value, y.value);
            } else {
                return expr_ptr_equal(x.expr, y.expr);
            }
        },
        a.node);
}

bool structurally_equal(const Program& a, const Program& b) {
    const auto& fa = a.functions();
    const auto& fb = b.functions();
    if (fa.size() != fb.size()) return false;
    for (std::size_t i = 0; i < fa.size(); ++i) {
        const auto& x = *fa[i];
        const auto& y = *fb[i];
        if (x.name != y.name || x.params.size() != y.params.size()) return false;
        for (std::size_t p = 0; p < x.params.size(); ++p) {
            if (x.params[p].name != y.params[p].name) return false;
        }
        if (!block_equal(x.body, y.body)) return false;
    }
    return true;
}

}  // namespace triage::minilang
