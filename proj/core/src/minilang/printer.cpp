#include "triage/minilang/printer.hpp"

#include <charconv>
#include <cmath>

namespace triage::minilang {

namespace {

int precedence(BinaryOp op) {
    switch (op) {
        case BinaryOp::Or: return 1;
        case BinaryOp::And: return 2;
        case BinaryOp::Eq:
        case BinaryOp::Ne: return 3;
        case BinaryOp::Lt:
        case BinaryOp::Le:
        case BinaryOp::Gt:
        case BinaryOp::Ge: return 4;
        case BinaryOp::Add:
        case BinaryOp::Sub: return 5;
        case BinaryOp::Mul:
        case BinaryOp::Div:
        case BinaryOp::Mod: return 6;
    }
    return 0;
}

constexpr int kUnaryPrec = 7;
constexpr int kPostfixPrec = 8;
constexpr int kAtomPrec = 9;

int precedence(const Expr& e) {
    if (const auto* b = std::get_if<BinaryExpr>(&e.node)) return precedence(b->op);
    if (std::holds_alternative<UnaryExpr>(e.node)) return kUnaryPrec;
    if (std::holds_alternative<IndexExpr>(e.node)) return kPostfixPrec;
    return kAtomPrec;
}

void print_into(std::string& out, const Expr& e, int min_prec);

void print_list(std::string& out, const std::vector<ExprPtr>& items) {
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        print_into(out, *items[i], 0);
    }
}

void print_into(std::string& out, const Expr& e, int min_prec) {
    const bool parens = precedence(e) < min_prec;
    if (parens) out += '(';
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, IntLiteral>) {
                out += std::to_string(n.value);
            } else if constexpr (std::is_same_v<T, FloatLiteral>) {
                out += format_float_literal(n.value);
            } else if constexpr (std::is_same_v<T, StringLiteral>) {
                out += quote_string(n.value);
            } else if constexpr (std::is_same_v<T, BoolLiteral>) {
                out += n.value ? "true" : "false";
            } else if constexpr (std::is_same_v<T, VarRef>) {
                out += n.name;
            } else if constexpr (std::is_same_v<T, UnaryExpr>) {
                out += to_string(n.op);
                print_into(out, *n.operand, kUnaryPrec);
            } else if constexpr (std::is_same_v<T, BinaryExpr>) {
                const int p = precedence(n.op);
                print_into(out, *n.lhs, p);
                out += ' ';
                out += to_string(n.op);
                out += ' ';
                print_into(out, *n.rhs, p + 1);
            } else if constexpr (std::is_same_v<T, CallExpr>) {
                out += n.callee;
                out += '(';
                print_list(out, n.args);
                out += ')';
            } else if constexpr (std::is_same_v<T, IndexExpr>) {
                print_into(out, *n.target, kPostfixPrec);
                out += '[';
                print_into(out, *n.index, 0);
                out += ']';
            } else if constexpr (std::is_same_v<T, ListExpr>) {
                out += '[';
                print_list(out, n.elements);
                out += ']';
            }
        },
        e.node);
    if (parens) out += ')';
}

void print_block(std::string& out, const Block& block, int indent);

void print_stmt_into(std::string& out, const Stmt& s, int indent) {
    const std::string pad(static_cast<std::size_t>(indent) * 4, ' ');
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, AssignStmt>) {
                out += pad + (n.is_let ? "let " : "") + n.name + " = " + print_expr(*n.value) + ";\n";
            } else if constexpr (std::is_same_v<T, IfStmt>) {
                out += pad + "if (" + print_expr(*n.cond) + ") ";
                print_block(out, n.then_block, indent);
                const IfStmt* cur = &n;
                while (cur->else_block) {
                    const Block& eb = *cur->else_block;
                    if (eb.stmts.size() == 1 && std::holds_alternative<IfStmt>(eb.stmts[0]->node)) {
                        cur = &std::get<IfStmt>(eb.stmts[0]->node);
                        out.pop_back();  // newline after '}'
                        out += " else if (" + print_expr(*cur->cond) + ") ";
                        print_block(out, cur->then_block, indent);
                    } else {
                        out.pop_back();
                        out += " else ";
                        print_block(out, eb, indent);
                        break;
                    }
                }
            } else if constexpr (std::is_same_v<T, WhileStmt>) {
                out += pad + "while (" + print_expr(*n.cond) + ") ";
                print_block(out, n.body, indent);
            } else if constexpr (std::is_same_v<T, ReturnStmt>) {
                out += pad + "return" + (n.value ? " " + print_expr(*n.value) : std::string()) + ";\n";
            } else if constexpr (std::is_same_v<T, ExprStmt>) {
                out += pad + print_expr(*n.expr) + ";\n";
            }
        },
        s.node);
}

void print_block(std::string& out, const Block& block, int indent) {
    out += "{\n";
    for (const auto& s : block.stmts) print_stmt_into(out, *s, indent + 1);
    out += std::string(static_cast<std::size_t>(indent) * 4, ' ') + "}\n";
}

}  // namespace

std::string format_float_literal(double value) {
    char buf[512];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed);
    std::string s(buf, ptr);
    if (s.find('.') == std::string::npos) s += ".0";
    return s;
}

std::string quote_string(std::string_view raw) {
    std::string out = "\"";
    for (char c : raw) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out.push_back(c);
        }
    }
    out += '"';
    return out;
}

std::string print_expr(const Expr& expr) {
    std::string out;
    print_into(out, expr, 0);
    return out;
}

std::string print_stmt(const Stmt& stmt, int indent) {
    std::string out;
    print_stmt_into(out, stmt, indent);
    return out;
}

std::string print_function(const FunctionDecl& fn) {
    std::string out = "fn " + fn.name + "(";
    for (std::size_t i = 0; i < fn.params.size(); ++i) {
        if (i) out += ", ";
        out += fn.params[i].name;
    }
    out += ") ";
    print_block(out, fn.body, 0);
    return out;
}

SourceMap print_program(const Program& program) {
    SourceMap out;
    for (const auto& [file, text] : program.files()) out[file];
    for (const auto& fn : program.functions()) {
        std::string& text = out[fn->loc.file];
        if (!text.empty()) text += "\n";
        text += print_function(*fn);
    }
    return out;
}

}  // namespace triage::minilang
