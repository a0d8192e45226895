#include "triage/minilang/parser.hpp"

#include "triage/minilang/lexer.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <unordered_map>

namespace triage::minilang {

bool is_builtin(std::string_view name) {
    return std::find(std::begin(kBuiltins), std::end(kBuiltins), name) != std::end(kBuiltins);
}

namespace {

class Parser {
  public:
    Parser(std::vector<Token> tokens, std::string file, NodeId& next_id)
        : tokens_(std::move(tokens)), file_(std::move(file)), next_id_(next_id) {}

    std::vector<std::shared_ptr<FunctionDecl>> parse_file() {
        std::vector<std::shared_ptr<FunctionDecl>> out;
        while (!at_end()) out.push_back(parse_function());
        return out;
    }

    Block parse_statement_list() {
        Block block;
        while (!at_end()) block.stmts.push_back(parse_statement());
        return block;
    }

  private:
    // --- token helpers ---------------------------------------------------
    [[nodiscard]] const Token& peek(std::size_t ahead = 0) const {
        return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
    }
    [[nodiscard]] bool at_end() const { return peek().kind == TokenKind::End; }
    const Token& advance() {
        const Token& t = tokens_[pos_];
        if (t.kind != TokenKind::End) ++pos_;
        last_ = &t;
        return t;
    }
    [[nodiscard]] bool check(std::string_view lexeme) const {
        const Token& t = peek();
        return t.kind != TokenKind::String && t.kind != TokenKind::End && t.lexeme == lexeme;
    }
    bool match(std::string_view lexeme) {
        if (!check(lexeme)) return false;
        advance();
        return true;
    }
    const Token& expect(std::string_view lexeme) {
        if (!check(lexeme)) fail(peek(), "expected '" + std::string(lexeme) + "'");
        return advance();
    }
    const Token& expect_identifier(const char* what) {
        if (peek().kind != TokenKind::Identifier) fail(peek(), std::string("expected ") + what);
        return advance();
    }
    [[noreturn]] void fail(const Token& at, const std::string& message) const {
        std::string found = at.kind == TokenKind::End ? "end of input" : "'" + at.lexeme + "'";
        throw SyntaxError(loc_of(at), message + ", found " + found);
    }
    [[nodiscard]] SourceLocation loc_of(const Token& t) const { return SourceLocation{file_, t.line, t.col}; }

    NodeId fresh_id() { return next_id_++; }

    std::uint32_t slot_for(const std::string& name) {
        auto [it, inserted] = slots_.try_emplace(name, static_cast<std::uint32_t>(slot_names_.size()));
        if (inserted) slot_names_.push_back(name);
        return it->second;
    }

    // --- declarations ----------------------------------------------------
    std::shared_ptr<FunctionDecl> parse_function() {
        auto fn = std::make_shared<FunctionDecl>();
        const Token& kw = expect("fn");
        fn->loc = loc_of(kw);
        const Token& name = expect_identifier("function name");
        fn->name = name.lexeme;
        if (is_builtin(fn->name)) throw SyntaxError(loc_of(name), "'" + fn->name + "' is a reserved built-in name");

        slots_.clear();
        slot_names_.clear();

        expect("(");
        std::set<std::string> seen;
        if (!check(")")) {
            do {
                const Token& p = expect_identifier("parameter name");
                if (!seen.insert(p.lexeme).second) throw SyntaxError(loc_of(p), "duplicate parameter '" + p.lexeme + "'");
                slot_for(p.lexeme);
                fn->params.push_back(Param{p.lexeme, loc_of(p)});
            } while (match(","));
        }
        expect(")");
        fn->body = parse_block();
        fn->end_line = last_->end_line;
        fn->slot_count = static_cast<std::uint32_t>(slot_names_.size());
        fn->slot_names = slot_names_;
        return fn;
    }

    Block parse_block() {
        expect("{");
        Block block;
        while (!check("}")) {
            if (at_end()) fail(peek(), "expected '}'");
            block.stmts.push_back(parse_statement());
        }
        expect("}");
        return block;
    }

    // --- statements ------------------------------------------------------
    StmtPtr finish(std::shared_ptr<Stmt> stmt) {
        stmt->end_line = last_->end_line;
        stmt->end_col = last_->end_col;
        return stmt;
    }

    StmtPtr parse_statement() {
        auto stmt = std::make_shared<Stmt>();
        stmt->id = fresh_id();
        const Token& first = peek();
        stmt->loc = loc_of(first);

        if (match("let")) {
            const Token& name = expect_identifier("variable name");
            expect("=");
            AssignStmt a;
            a.is_let = true;
            a.name = name.lexeme;
            a.slot = slot_for(a.name);
            a.value = parse_expr();
            expect(";");
            stmt->node = std::move(a);
            return finish(stmt);
        }
        if (peek().kind == TokenKind::Identifier && peek(1).kind == TokenKind::Operator && peek(1).lexeme == "=") {
            AssignStmt a;
            a.name = advance().lexeme;
            a.slot = slot_for(a.name);
            advance();
            a.value = parse_expr();
            expect(";");
            stmt->node = std::move(a);
            return finish(stmt);
        }
        if (match("if")) {
            stmt->node = parse_if_tail();
            return finish(stmt);
        }
        if (match("while")) {
            WhileStmt w;
            expect("(");
            w.cond = parse_expr();
            expect(")");
            w.body = parse_block();
            stmt->node = std::move(w);
            return finish(stmt);
        }
        if (match("return")) {
            ReturnStmt r;
            if (!check(";")) r.value = parse_expr();
            expect(";");
            stmt->node = std::move(r);
            return finish(stmt);
        }
        if (check("fn")) fail(peek(), "function declarations are only allowed at top level");
        ExprStmt e;
        e.expr = parse_expr();
        expect(";");
        stmt->node = std::move(e);
        return finish(stmt);
    }

    // After the `if` keyword.
    IfStmt parse_if_tail() {
        IfStmt i;
        expect("(");
        i.cond = parse_expr();
        expect(")");
        i.then_block = parse_block();
        if (match("else")) {
            if (check("if")) {
                // else-if chains nest as an else block with a single if.
                auto nested = std::make_shared<Stmt>();
                nested->id = fresh_id();
                nested->loc = loc_of(peek());
                advance();
                nested->node = parse_if_tail();
                Block b;
                b.stmts.push_back(finish(nested));
                i.else_block = std::move(b);
            } else {
                i.else_block = parse_block();
            }
        }
        return i;
    }

    // --- expressions -----------------------------------------------------
    ExprPtr make(const SourceLocation& loc, Expr::Node node) {
        auto e = std::make_shared<Expr>();
        e->id = fresh_id();
        e->loc = loc;
        e->node = std::move(node);
        return e;
    }

    ExprPtr parse_expr() { return parse_or(); }

    ExprPtr parse_or() {
        ExprPtr lhs = parse_and();
        while (match("||")) lhs = make(lhs->loc, BinaryExpr{BinaryOp::Or, lhs, parse_and()});
        return lhs;
    }
    ExprPtr parse_and() {
        ExprPtr lhs = parse_equality();
        while (match("&&")) lhs = make(lhs->loc, BinaryExpr{BinaryOp::And, lhs, parse_equality()});
        return lhs;
    }
    ExprPtr parse_equality() {
        ExprPtr lhs = parse_comparison();
        while (true) {
            if (match("==")) {
                lhs = make(lhs->loc, BinaryExpr{BinaryOp::Eq, lhs, parse_comparison()});
            } else if (match("!=")) {
                lhs = make(lhs->loc, BinaryExpr{BinaryOp::Ne, lhs, parse_comparison()});
            } else {
                return lhs;
            }
        }
    }
    ExprPtr parse_comparison() {
        ExprPtr lhs = parse_additive();
        while (true) {
            BinaryOp op;
            if (match("<=")) {
                op = BinaryOp::Le;
            } else if (match(">=")) {
                op = BinaryOp::Ge;
            } else if (match("<")) {
                op = BinaryOp::Lt;
            } else if (match(">")) {
                op = BinaryOp::Gt;
            } else {
                return lhs;
            }
            lhs = make(lhs->loc, BinaryExpr{op, lhs, parse_additive()});
        }
    }
    ExprPtr parse_additive() {
        ExprPtr lhs = parse_multiplicative();
        while (true) {
            BinaryOp op;
            if (match("+")) {
                op = BinaryOp::Add;
            } else if (match("-")) {
                op = BinaryOp::Sub;
            } else {
                return lhs;
            }
            lhs = make(lhs->loc, BinaryExpr{op, lhs, parse_multiplicative()});
        }
    }
    ExprPtr parse_multiplicative() {
        ExprPtr lhs = parse_unary();
        while (true) {
            BinaryOp op;
            if (match("*")) {
                op = BinaryOp::Mul;
            } else if (match("/")) {
                op = BinaryOp::Div;
            } else if (match("%")) {
                op = BinaryOp::Mod;
            } else {
                return lhs;
            }
            lhs = make(lhs->loc, BinaryExpr{op, lhs, parse_unary()});
        }
    }
    ExprPtr parse_unary() {
        const Token& t = peek();
        if (match("-")) return make(loc_of(t), UnaryExpr{UnaryOp::Neg, parse_unary()});
        if (match("!")) return make(loc_of(t), UnaryExpr{UnaryOp::Not, parse_unary()});
        return parse_postfix();
    }
    ExprPtr parse_postfix() {
        ExprPtr e = parse_primary();
        while (check("[")) {
            advance();
            ExprPtr index = parse_expr();
            expect("]");
            e = make(e->loc, IndexExpr{e, index});
        }
        return e;
    }
    ExprPtr parse_primary() {
        const Token& t = peek();
        const SourceLocation loc = loc_of(t);
        switch (t.kind) {
            case TokenKind::Integer: {
                advance();
                std::int64_t v = 0;
                auto [ptr, ec] = std::from_chars(t.lexeme.data(), t.lexeme.data() + t.lexeme.size(), v);
                if (ec != std::errc{}) throw SyntaxError(loc, "integer literal out of range");
                return make(loc, IntLiteral{v});
            }
            case TokenKind::Float: {
                advance();
                double v = 0;
                std::from_chars(t.lexeme.data(), t.lexeme.data() + t.lexeme.size(), v);
                return make(loc, FloatLiteral{v});
            }
            case TokenKind::String: {
                advance();
                return make(loc, StringLiteral{decode_string(t)});
            }
            case TokenKind::Keyword:
                if (t.lexeme == "true" || t.lexeme == "false") {
                    advance();
                    return make(loc, BoolLiteral{t.lexeme == "true"});
                }
                break;
            case TokenKind::Identifier: {
                advance();
                if (match("(")) {
                    CallExpr call;
                    call.callee = t.lexeme;
                    if (!check(")")) {
                        do {
                            call.args.push_back(parse_expr());
                        } while (match(","));
                    }
                    expect(")");
                    return make(loc, std::move(call));
                }
                return make(loc, VarRef{t.lexeme, slot_for(t.lexeme)});
            }
            case TokenKind::Punct:
                if (t.lexeme == "(") {
                    advance();
                    ExprPtr inner = parse_expr();
                    expect(")");
                    return inner;
                }
                if (t.lexeme == "[") {
                    advance();
                    ListExpr list;
                    if (!check("]")) {
                        do {
                            list.elements.push_back(parse_expr());
                        } while (match(","));
                    }
                    expect("]");
                    return make(loc, std::move(list));
                }
                break;
            default:
                break;
        }
        fail(t, "expected expression");
    }

    std::string decode_string(const Token& t) const {
        std::string out;
        const std::string& s = t.lexeme;
        for (std::size_t i = 1; i + 1 < s.size(); ++i) {
            if (s[i] != '\\') {
                out.push_back(s[i]);
                continue;
            }
            char e = s[++i];
            switch (e) {
                case 'n': out.push_back('\n'); break;
                case 't': out.push_back('\t'); break;
                case '\\': out.push_back('\\'); break;
                case '"': out.push_back('"'); break;
                default:
                    throw SyntaxError(SourceLocation{file_, t.line, t.col + static_cast<int>(i) - 1},
                                      std::string("unknown escape '\\") + e + "'");
            }
        }
        return out;
    }

    std::vector<Token> tokens_;
    std::string file_;
    NodeId& next_id_;
    std::size_t pos_ = 0;
    const Token* last_ = nullptr;
    std::unordered_map<std::string, std::uint32_t> slots_;
    std::vector<std::string> slot_names_;
};

}  // namespace

Program parse(const SourceMap& sources) {
    if (sources.empty()) throw std::invalid_argument("parse: no source files");
    SourceMap normalized;
    for (const auto& [name, text] : sources) normalized.emplace(name, normalize_newlines(text));

    NodeId next_id = 0;
    std::vector<FunctionPtr> functions;
    std::unordered_map<std::string, SourceLocation> seen;
    for (const auto& [name, text] : normalized) {
        Parser parser(lex(text), name, next_id);
        for (auto& fn : parser.parse_file()) {
            auto [it, inserted] = seen.emplace(fn->name, fn->loc);
            if (!inserted) {
                throw SyntaxError(fn->loc, "duplicate function '" + fn->name + "' (first declared at " +
                                               it->second.to_string() + ")");
            }
            functions.push_back(std::move(fn));
        }
    }
    return Program(std::move(normalized), std::move(functions), next_id);
}

Program parse_source(std::string_view text, std::string file) {
    return parse(SourceMap{{std::move(file), std::string(text)}});
}

void check_statement_list(std::string_view text, const std::string& file) {
    NodeId scratch = 0;
    Parser parser(lex(normalize_newlines(text)), file, scratch);
    parser.parse_statement_list();
}

}  // namespace triage::minilang
