#include "triage/minilang/lexer.hpp"

#include <array>
#include <cctype>

namespace triage::minilang {

namespace {

constexpr std::array<std::string_view, 8> kKeywords = {"fn", "let", "if", "else", "while", "return", "true", "false"};

// Longest operators first so that "<=" wins over "<".
constexpr std::array<std::string_view, 6> kTwoCharOps = {"==", "!=", "<=", ">=", "&&", "||"};
constexpr std::string_view kOneCharOps = "+-*/%<>=!";
constexpr std::string_view kPunct = "(){}[],;";

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

class Cursor {
  public:
    explicit Cursor(std::string_view text) : text_(text) {}

    [[nodiscard]] bool done() const { return pos_ >= text_.size(); }
    [[nodiscard]] char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
    }
    char advance() {
        char c = text_[pos_++];
        last_line_ = line_;
        last_col_ = col_;
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }
    [[nodiscard]] int line() const { return line_; }
    [[nodiscard]] int col() const { return col_; }
    [[nodiscard]] int last_line() const { return last_line_; }
    [[nodiscard]] int last_col() const { return last_col_; }
    [[nodiscard]] std::size_t pos() const { return pos_; }
    [[nodiscard]] std::string_view slice(std::size_t from) const { return text_.substr(from, pos_ - from); }

  private:
    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    int last_line_ = 1;
    int last_col_ = 1;
};

}  // namespace

bool is_keyword(std::string_view word) {
    for (auto kw : kKeywords) {
        if (kw == word) return true;
    }
    return false;
}

std::string normalize_newlines(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '\r') {
            out.push_back('\n');
            if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        } else {
            out.push_back(text[i]);
        }
    }
    return out;
}

std::vector<Token> lex(std::string_view text) {
    std::vector<Token> tokens;
    Cursor cur(text);

    while (!cur.done()) {
        char c = cur.peek();
        if (std::isspace(static_cast<unsigned char>(c))) {
            cur.advance();
            continue;
        }
        if (c == '/' && cur.peek(1) == '/') {
            while (!cur.done() && cur.peek() != '\n') cur.advance();
            continue;
        }

        Token tok;
        tok.line = cur.line();
        tok.col = cur.col();
        const std::size_t start = cur.pos();

        if (ident_start(c)) {
            while (!cur.done() && ident_char(cur.peek())) cur.advance();
            tok.lexeme = std::string(cur.slice(start));
            tok.kind = is_keyword(tok.lexeme) ? TokenKind::Keyword : TokenKind::Identifier;
        } else if (digit(c)) {
            while (!cur.done() && digit(cur.peek())) cur.advance();
            tok.kind = TokenKind::Integer;
            if (cur.peek() == '.' && digit(cur.peek(1))) {
                cur.advance();
                while (!cur.done() && digit(cur.peek())) cur.advance();
                tok.kind = TokenKind::Float;
            }
            tok.lexeme = std::string(cur.slice(start));
        } else if (c == '"') {
            // A string runs to the closing quote on the same line. Without one,
            // the quote alone becomes an Unknown token.
            std::size_t probe = 1;
            bool closed = false;
            while (true) {
                char p = cur.peek(probe);
                if (p == '\0' || p == '\n') break;
                if (p == '\\' && cur.peek(probe + 1) != '\0' && cur.peek(probe + 1) != '\n') {
                    probe += 2;
                    continue;
                }
                if (p == '"') {
                    closed = true;
                    break;
                }
                ++probe;
            }
            if (closed) {
                for (std::size_t i = 0; i <= probe; ++i) cur.advance();
                tok.kind = TokenKind::String;
            } else {
                cur.advance();
                tok.kind = TokenKind::Unknown;
            }
            tok.lexeme = std::string(cur.slice(start));
        } else {
            bool matched = false;
            for (auto op : kTwoCharOps) {
                if (c == op[0] && cur.peek(1) == op[1]) {
                    cur.advance();
                    cur.advance();
                    tok.kind = TokenKind::Operator;
                    matched = true;
                    break;
                }
            }
            if (!matched) {
                cur.advance();
                if (kOneCharOps.find(c) != std::string_view::npos) {
                    tok.kind = TokenKind::Operator;
                } else if (kPunct.find(c) != std::string_view::npos) {
                    tok.kind = TokenKind::Punct;
                } else {
                    // Swallow the continuation bytes of a UTF-8 sequence so
                    // that a multi-byte character stays one token.
                    if (static_cast<unsigned char>(c) >= 0xC0) {
                        while (!cur.done() && (static_cast<unsigned char>(cur.peek()) & 0xC0) == 0x80) cur.advance();
                    }
                    tok.kind = TokenKind::Unknown;
                }
            }
            tok.lexeme = std::string(cur.slice(start));
        }
        tok.end_line = cur.last_line();
        tok.end_col = cur.last_col();
        tokens.push_back(std::move(tok));
    }

    Token end;
    end.kind = TokenKind::End;
    end.line = cur.line();
    end.col = cur.col();
    end.end_line = cur.line();
    end.end_col = cur.col();
    tokens.push_back(end);
    return tokens;
}

}  // namespace triage::minilang
