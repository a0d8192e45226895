#pragma once

#include "triage/minilang/program.hpp"

#include <string>

namespace triage::minilang {

// Canonical source text. Binary expressions are parenthesized only where
// precedence requires it, so printed labels read like hand-written code.
std::string print_expr(const Expr& expr);
std::string print_stmt(const Stmt& stmt, int indent = 0);
std::string print_function(const FunctionDecl& fn);
// One canonical text per file of the program.
SourceMap print_program(const Program& program);

std::string format_float_literal(double value);
std::string quote_string(std::string_view raw);

}  // namespace triage::minilang
