#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace triage::corpus {

// The part of TOML the bundle manifests use: comments, [table] headers,
// key = value with basic or literal strings, integers, booleans and
// (possibly multi-line) arrays of those.
struct TomlValue;
using TomlArray = std::vector<TomlValue>;

struct TomlValue {
    std::variant<std::string, std::int64_t, bool, TomlArray> data;

    [[nodiscard]] bool is_string() const { return std::holds_alternative<std::string>(data); }
    [[nodiscard]] bool is_integer() const { return std::holds_alternative<std::int64_t>(data); }
    [[nodiscard]] bool is_bool() const { return std::holds_alternative<bool>(data); }
    [[nodiscard]] bool is_array() const { return std::holds_alternative<TomlArray>(data); }
    [[nodiscard]] const std::string& as_string() const { return std::get<std::string>(data); }
    [[nodiscard]] std::int64_t as_integer() const { return std::get<std::int64_t>(data); }
    [[nodiscard]] const TomlArray& as_array() const { return std::get<TomlArray>(data); }
};

// Keys are dotted with their table header: "[meta] name = 1" is "meta.name".
using TomlDocument = std::map<std::string, TomlValue>;

class TomlError : public std::runtime_error {
  public:
    TomlError(std::size_t line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
    [[nodiscard]] std::size_t line() const { return line_; }

  private:
    std::size_t line_;
};

TomlDocument parse_toml(std::string_view text);

}  // namespace triage::corpus
