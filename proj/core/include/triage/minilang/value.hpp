#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace triage::minilang {

class Value;
using ValueList = std::vector<Value>;

struct Unit {
    friend bool operator==(Unit, Unit) { return true; }
};

// A runtime value. Lists are immutable and shared, giving value semantics
// without copying on every read.
class Value {
  public:
    enum class Kind { Unit, Int, Float, Bool, String, List };

    Value() = default;

    static Value unit() { return Value(); }
    static Value integer(std::int64_t v) { return Value(Data(v)); }
    static Value floating(double v) { return Value(Data(v)); }
    static Value boolean(bool v) { return Value(Data(v)); }
    static Value string(std::string v) { return Value(Data(std::move(v))); }
    static Value list(ValueList items) { return Value(Data(std::make_shared<const ValueList>(std::move(items)))); }

    [[nodiscard]] Kind kind() const { return static_cast<Kind>(data_.index()); }
    [[nodiscard]] bool is(Kind k) const { return kind() == k; }
    [[nodiscard]] bool is_numeric() const { return is(Kind::Int) || is(Kind::Float); }

    [[nodiscard]] std::int64_t as_int() const { return std::get<std::int64_t>(data_); }
    [[nodiscard]] double as_float() const { return std::get<double>(data_); }
    [[nodiscard]] double as_number() const { return is(Kind::Int) ? static_cast<double>(as_int()) : as_float(); }
    [[nodiscard]] bool as_bool() const { return std::get<bool>(data_); }
    [[nodiscard]] const std::string& as_string() const { return std::get<std::string>(data_); }
    [[nodiscard]] const ValueList& as_list() const { return *std::get<std::shared_ptr<const ValueList>>(data_); }

    [[nodiscard]] std::string_view type_name() const { return kind_name(kind()); }
    static std::string_view kind_name(Kind k);

    // Canonical text form used for traces and divergence checks. Floats use
    // the shortest decimal that round-trips to the same 64-bit value.
    [[nodiscard]] std::string serialize() const;
    // Like serialize(), but strings are quoted (used inside lists).
    [[nodiscard]] std::string repr() const;

    // Structural; floats compare bit-exactly.
    friend bool operator==(const Value& a, const Value& b);

  private:
    using Data = std::variant<Unit, std::int64_t, double, bool, std::string, std::shared_ptr<const ValueList>>;
    explicit Value(Data d) : data_(std::move(d)) {}
    Data data_;
};

std::string format_double(double v);
// Inverse of format_double; throws std::invalid_argument on malformed text.
double parse_double(std::string_view text);

}  // namespace triage::minilang
