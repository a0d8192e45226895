#pragma once

#include <compare>
#include <ostream>
#include <stdexcept>
#include <string>

namespace triage::minilang {

struct SourceLocation {
    std::string file;
    int line = 1;  // 1-based
    int col = 1;   // 1-based

    friend auto operator<=>(const SourceLocation&, const SourceLocation&) = default;

    [[nodiscard]] std::string to_string() const {
        return file + ":" + std::to_string(line) + ":" + std::to_string(col);
    }
};

inline std::ostream& operator<<(std::ostream& os, const SourceLocation& loc) { return os << loc.to_string(); }

// Inclusive range of whole lines inside one file.
struct LineSpan {
    std::string file;
    int first_line = 1;
    int last_line = 1;

    friend auto operator<=>(const LineSpan&, const LineSpan&) = default;

    [[nodiscard]] bool contains(int line) const { return line >= first_line && line <= last_line; }
    [[nodiscard]] int line_count() const { return last_line - first_line + 1; }
    [[nodiscard]] std::string to_string() const {
        return file + ":" + std::to_string(first_line) + "-" + std::to_string(last_line);
    }

    // Parses "file:12-14" or "file:12".
    static LineSpan parse(const std::string& text);
};

class SyntaxError : public std::runtime_error {
  public:
    SyntaxError(SourceLocation loc, const std::string& message)
        : std::runtime_error(loc.to_string() + ": " + message), loc_(std::move(loc)), message_(message) {}

    [[nodiscard]] const SourceLocation& location() const { return loc_; }
    [[nodiscard]] const std::string& message() const { return message_; }

  private:
    SourceLocation loc_;
    std::string message_;
};

}  // namespace triage::minilang
