#pragma once

#include "triage/minilang/program.hpp"

#include <stdexcept>
#include <string>

namespace triage::minilang {

class PatchError : public std::runtime_error {
  public:
    enum class Kind { Misaligned, ParseFailure };
    PatchError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
    [[nodiscard]] Kind kind() const { return kind_; }

  private:
    Kind kind_;
};

// Checks that `span` covers whole sibling statements of one function body and
// nothing else. Throws PatchError(Misaligned).
void check_region(const Program& program, const LineSpan& span);

// Replaces the lines of `span` with `replacement` and re-parses. The input
// program is not modified.
Program apply_patch(const Program& program, const LineSpan& span, const std::string& replacement);

// Number of lines `replacement` occupies once spliced in.
int replacement_line_count(const std::string& replacement);

}  // namespace triage::minilang
