#include "triage/minilang/value.hpp"

#include "triage/minilang/printer.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace triage::minilang {

std::string_view Value::kind_name(Kind k) {
    switch (k) {
        case Kind::Unit: return "unit";
        case Kind::Int: return "int";
        case Kind::Float: return "float";
        case Kind::Bool: return "bool";
        case Kind::String: return "string";
        case Kind::List: return "list";
    }
    return "?";
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    std::string s(buf, ptr);
    if (s.find_first_of(".e") == std::string::npos) s += ".0";
    return s;
}

double parse_double(std::string_view text) {
    if (text == "nan") return std::nan("");
    if (text == "inf") return HUGE_VAL;
    if (text == "-inf") return -HUGE_VAL;
    double v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw std::invalid_argument("malformed float '" + std::string(text) + "'");
    }
    return v;
}

std::string Value::serialize() const {
    switch (kind()) {
        case Kind::Unit: return "()";
        case Kind::Int: return std::to_string(as_int());
        case Kind::Float: return format_double(as_float());
        case Kind::Bool: return as_bool() ? "true" : "false";
        case Kind::String: return as_string();
        case Kind::List: {
            std::string out = "[";
            const auto& items = as_list();
            for (std::size_t i = 0; i < items.size(); ++i) {
                if (i) out += ", ";
                out += items[i].repr();
            }
            return out + "]";
        }
    }
    return {};
}

std::string Value::repr() const { return is(Kind::String) ? quote_string(as_string()) : serialize(); }

bool operator==(const Value& a, const Value& b) {
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
        case Value::Kind::Unit: return true;
        case Value::Kind::Int: return a.as_int() == b.as_int();
        case Value::Kind::Float: {
            double x = a.as_float();
            double y = b.as_float();
            return std::memcmp(&x, &y, sizeof(double)) == 0;
        }
        case Value::Kind::Bool: return a.as_bool() == b.as_bool();
        case Value::Kind::String: return a.as_string() == b.as_string();
        case Value::Kind::List: return a.as_list() == b.as_list();
    }
    return false;
}

}  // namespace triage::minilang
