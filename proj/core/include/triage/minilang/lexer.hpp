#pragma once

#include "triage/minilang/source_location.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace triage::minilang {

enum class TokenKind {
    Identifier,
    Keyword,
    Integer,
    Float,
    String,
    Operator,
    Punct,
    Unknown,  // any character the grammar has no use for; always one char
    End,
};

struct Token {
    TokenKind kind = TokenKind::End;
    std::string lexeme;  // exact source text
    int line = 1;
    int col = 1;
    int end_line = 1;  // position of the last character
    int end_col = 1;
};

// Lexes best-effort: never throws. Comments ("// ...") and whitespace are
// dropped. The returned vector always ends with a single End token.
std::vector<Token> lex(std::string_view text);

bool is_keyword(std::string_view word);

// Normalizes CRLF and lone CR to LF.
std::string normalize_newlines(std::string_view text);

}  // namespace triage::minilang
