#pragma once

#include "triage/minilang/program.hpp"

#include <string>
#include <string_view>

namespace triage::minilang {

// Parses a set of source files into one program. Newlines are normalized to
// LF before locations are assigned. Throws SyntaxError.
Program parse(const SourceMap& sources);

// Convenience for single-file programs.
Program parse_source(std::string_view text, std::string file = "main.ml0");

// Checks that `text` is a (possibly empty) sequence of statements. Throws
// SyntaxError with locations relative to `text`.
void check_statement_list(std::string_view text, const std::string& file = "<patch>");

constexpr std::string_view kBuiltins[] = {"sqrt", "abs", "len", "floor", "print", "assert"};
bool is_builtin(std::string_view name);

}  // namespace triage::minilang
