#pragma once

namespace triage::minilang {

template <typename F>
void walk_expr(const Expr& expr, F&& visit) {
    visit(expr);
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, UnaryExpr>) {
                walk_expr(*n.operand, visit);
            } else if constexpr (std::is_same_v<T, BinaryExpr>) {
                walk_expr(*n.lhs, visit);
                walk_expr(*n.rhs, visit);
            } else if constexpr (std::is_same_v<T, CallExpr>) {
                for (const auto& a : n.args) walk_expr(*a, visit);
            } else if constexpr (std::is_same_v<T, IndexExpr>) {
                walk_expr(*n.target, visit);
                walk_expr(*n.index, visit);
            } else if constexpr (std::is_same_v<T, ListExpr>) {
                for (const auto& e : n.elements) walk_expr(*e, visit);
            }
        },
        expr.node);
}

template <typename F>
void walk_stmts(const Block& block, F&& visit) {
    for (const auto& s : block.stmts) {
        visit(*s);
        if (const auto* i = std::get_if<IfStmt>(&s->node)) {
            walk_stmts(i->then_block, visit);
            if (i->else_block) walk_stmts(*i->else_block, visit);
        } else if (const auto* w = std::get_if<WhileStmt>(&s->node)) {
            walk_stmts(w->body, visit);
        }
    }
}

}  // namespace triage::minilang
