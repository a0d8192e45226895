#include "triage/minilang/patch.hpp"

#include "triage/minilang/lexer.hpp"
#include "triage/minilang/parser.hpp"

#include <algorithm>
#include <sstream>

namespace triage::minilang {

namespace {

struct Extent {
    int line, col, end_line, end_col;
    [[nodiscard]] bool covers(int l, int c) const {
        return std::pair(l, c) >= std::pair(line, col) && std::pair(l, c) <= std::pair(end_line, end_col);
    }
};

Extent extent_of(const Stmt& s) { return Extent{s.loc.line, s.loc.col, s.end_line, s.end_col}; }

// Finds the block that directly holds `target`.
const Block* parent_block(const Block& block, const Stmt* target) {
    for (const auto& s : block.stmts) {
        if (s.get() == target) return &block;
        const Block* found = nullptr;
        if (const auto* i = std::get_if<IfStmt>(&s->node)) {
            found = parent_block(i->then_block, target);
            if (!found && i->else_block) found = parent_block(*i->else_block, target);
        } else if (const auto* w = std::get_if<WhileStmt>(&s->node)) {
            found = parent_block(w->body, target);
        }
        if (found) return found;
    }
    return nullptr;
}

}  // namespace

void check_region(const Program& program, const LineSpan& span) {
    auto fail = [&](const std::string& why) {
        throw PatchError(PatchError::Kind::Misaligned, "region " + span.to_string() + " " + why);
    };
    if (!program.files().contains(span.file)) fail("names an unknown file");

    const FunctionDecl* fn = nullptr;
    for (const auto& f : program.functions()) {
        if (f->loc.file == span.file && span.first_line > f->loc.line && span.last_line < f->end_line) fn = f.get();
    }
    if (!fn) fail("is not inside a function body");

    // Maximal statements fully inside the span.
    std::vector<const Stmt*> top;
    walk_stmts(fn->body, [&](const Stmt& s) {
        const bool inside = span.contains(s.loc.line) && span.contains(s.end_line);
        const bool overlaps = s.loc.line <= span.last_line && s.end_line >= span.first_line;
        if (overlaps && !inside) {
            const bool encloses = s.loc.line < span.first_line && s.end_line > span.last_line;
            if (!encloses) fail("cuts through the statement at " + s.loc.to_string());
        }
        if (inside) {
            const bool nested = std::any_of(top.begin(), top.end(), [&](const Stmt* t) {
                return extent_of(*t).covers(s.loc.line, s.loc.col);
            });
            if (!nested) top.push_back(&s);
        }
    });
    if (top.empty()) fail("contains no statement");

    const Block* parent = parent_block(fn->body, top.front());
    for (const Stmt* s : top) {
        if (parent_block(fn->body, s) != parent) fail("spans statements of different blocks");
    }

    // No stray tokens (braces of an enclosing block, another statement's tail).
    const auto tokens = lex(program.files().at(span.file));
    for (const auto& t : tokens) {
        if (t.kind == TokenKind::End || !span.contains(t.line)) continue;
        const bool owned = std::any_of(top.begin(), top.end(), [&](const Stmt* s) { return extent_of(*s).covers(t.line, t.col); });
        if (!owned) fail("includes '" + t.lexeme + "' at line " + std::to_string(t.line) + " outside whole statements");
    }
}

int replacement_line_count(const std::string& replacement) {
    if (replacement.empty()) return 0;
    int n = static_cast<int>(std::count(replacement.begin(), replacement.end(), '\n'));
    if (replacement.back() != '\n') ++n;
    return n;
}

Program apply_patch(const Program& program, const LineSpan& span, const std::string& replacement) {
    check_region(program, span);
    const std::string normalized = normalize_newlines(replacement);
    try {
        check_statement_list(normalized);
    } catch (const SyntaxError& e) {
        throw PatchError(PatchError::Kind::ParseFailure, std::string("replacement does not parse: ") + e.what());
    }

    SourceMap files = program.files();
    std::istringstream in(files.at(span.file));
    std::string out;
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (n == span.first_line) {
            out += normalized;
            if (!normalized.empty() && normalized.back() != '\n') out += '\n';
        }
        if (!span.contains(n)) out += line + '\n';
    }
    files[span.file] = std::move(out);
    try {
        return parse(files);
    } catch (const SyntaxError& e) {
        throw PatchError(PatchError::Kind::ParseFailure, std::string("patched program does not parse: ") + e.what());
    }
}

}  // namespace triage::minilang
