#include "triage/corpus/toml.hpp"

#include <cctype>
#include <charconv>

namespace triage::corpus {

namespace {

class TomlParser {
  public:
    explicit TomlParser(std::string_view text) : text_(text) {}

    TomlDocument parse() {
        TomlDocument doc;
        std::string table;
        while (true) {
            skip_blank_lines();
            if (at_end()) break;
            if (peek() == '[') {
                ++pos_;
                skip_spaces();
                table = parse_key();
                skip_spaces();
                expect(']');
                end_of_line();
                continue;
            }
            std::string key = parse_key();
            skip_spaces();
            expect('=');
            skip_spaces();
            const std::size_t key_line = line_;
            TomlValue value = parse_value();
            end_of_line();
            std::string full = table.empty() ? key : table + "." + key;
            if (!doc.emplace(full, std::move(value)).second) throw TomlError(key_line, "duplicate key '" + full + "'");
        }
        return doc;
    }

  private:
    [[nodiscard]] bool at_end() const { return pos_ >= text_.size(); }
    [[nodiscard]] char peek() const { return at_end() ? '\0' : text_[pos_]; }

    void expect(char c) {
        if (peek() != c) throw TomlError(line_, std::string("expected '") + c + "'");
        ++pos_;
    }

    void skip_spaces() {
        while (!at_end() && (peek() == ' ' || peek() == '\t')) ++pos_;
    }

    void skip_comment() {
        if (peek() == '#') {
            while (!at_end() && peek() != '\n') ++pos_;
        }
    }

    void newline() {
        if (peek() == '\r') ++pos_;
        if (peek() == '\n') {
            ++pos_;
            ++line_;
        }
    }

    void skip_blank_lines() {
        while (!at_end()) {
            skip_spaces();
            skip_comment();
            if (peek() == '\n' || peek() == '\r') {
                newline();
            } else {
                break;
            }
        }
    }

    // Blank lines and comments inside arrays.
    void skip_whitespace() {
        while (!at_end()) {
            skip_spaces();
            skip_comment();
            if (peek() == '\n' || peek() == '\r') {
                newline();
            } else {
                return;
            }
        }
    }

    void end_of_line() {
        skip_spaces();
        skip_comment();
        if (at_end()) return;
        if (peek() != '\n' && peek() != '\r') throw TomlError(line_, "unexpected text after value");
        newline();
    }

    std::string parse_key() {
        std::string key;
        while (true) {
            if (peek() == '"') {
                key += parse_basic_string();
            } else {
                const std::size_t start = pos_;
                while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) {
                    ++pos_;
                }
                if (pos_ == start) throw TomlError(line_, "expected a key");
                key += text_.substr(start, pos_ - start);
            }
            skip_spaces();
            if (peek() != '.') return key;
            ++pos_;
            skip_spaces();
            key += '.';
        }
    }

    std::string parse_basic_string() {
        expect('"');
        std::string out;
        while (true) {
            if (at_end() || peek() == '\n') throw TomlError(line_, "unterminated string");
            const char c = text_[pos_++];
            if (c == '"') return out;
            if (c != '\\') {
                out += c;
                continue;
            }
            if (at_end()) throw TomlError(line_, "unterminated string");
            const char e = text_[pos_++];
            switch (e) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case 'r': out += '\r'; break;
                case '\\': out += '\\'; break;
                case '"': out += '"'; break;
                default: throw TomlError(line_, std::string("unsupported escape \\") + e);
            }
        }
    }

    std::string parse_literal_string() {
        expect('\'');
        const std::size_t start = pos_;
        while (!at_end() && peek() != '\'' && peek() != '\n') ++pos_;
        if (peek() != '\'') throw TomlError(line_, "unterminated string");
        std::string out(text_.substr(start, pos_ - start));
        ++pos_;
        return out;
    }

    TomlValue parse_value() {
        const char c = peek();
        if (c == '"') return TomlValue{parse_basic_string()};
        if (c == '\'') return TomlValue{parse_literal_string()};
        if (c == '[') {
            ++pos_;
            TomlArray items;
            while (true) {
                skip_whitespace();
                if (peek() == ']') {
                    ++pos_;
                    return TomlValue{std::move(items)};
                }
                items.push_back(parse_value());
                skip_whitespace();
                if (peek() == ',') {
                    ++pos_;
                } else if (peek() != ']') {
                    throw TomlError(line_, "expected ',' or ']' in array");
                }
            }
        }
        if (text_.substr(pos_, 4) == "true") {
            pos_ += 4;
            return TomlValue{true};
        }
        if (text_.substr(pos_, 5) == "false") {
            pos_ += 5;
            return TomlValue{false};
        }
        if (c == '-' || c == '+' || std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            if (c == '+') start = ++pos_;
            else if (c == '-') ++pos_;
            while (!at_end() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '_')) ++pos_;
            std::string digits;
            for (char d : text_.substr(start, pos_ - start)) {
                if (d != '_') digits += d;
            }
            std::int64_t v = 0;
            auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
            if (ec != std::errc{} || ptr != digits.data() + digits.size()) throw TomlError(line_, "bad integer");
            return TomlValue{v};
        }
        throw TomlError(line_, "unsupported value");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
};

}  // namespace

TomlDocument parse_toml(std::string_view text) { return TomlParser(text).parse(); }

}  // namespace triage::corpus
