#pragma once

#include "triage/analysis/dataflow.hpp"
#include "triage/minilang/interpreter.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace triage::tracer {

using minilang::LineSpan;
using minilang::SourceLocation;

enum class HookKind { Def, Use, Subexpr, Call };

std::string_view to_string(HookKind kind);
HookKind parse_hook_kind(std::string_view text);

// Runs `test` until the first statement located at one of `targets` is about
// to execute and records the interpreter stack, innermost frame first. If no
// target executes the trace is empty and carries a diagnostic.
// Throws std::invalid_argument for an unknown test or a target that is not a
// statement.
analysis::CallStackTrace capture_stack(const minilang::Program& program, std::string_view test,
                                       std::span<const SourceLocation> targets,
                                       const minilang::RunOptions& options = {});
analysis::CallStackTrace capture_stack(const minilang::Program& program, std::string_view test,
                                       const SourceLocation& target, const minilang::RunOptions& options = {});

struct HookPoint {
    SourceLocation location;
    std::string label;  // variable name, or the printed expression
    HookKind kind = HookKind::Def;
    friend auto operator<=>(const HookPoint&, const HookPoint&) = default;
};

struct TraceHooks {
    std::set<HookPoint> points;
    [[nodiscard]] bool empty() const { return points.empty(); }
    [[nodiscard]] bool contains(const HookPoint& p) const { return points.contains(p); }
};

class PlanError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Instrumentation plan for the affected sets of each frame. Statements inside
// `region` get definition hooks only, since their text differs between the
// buggy program and each patch. Throws PlanError when a set names a function,
// definition or use site the program does not have.
TraceHooks plan_hooks(std::span<const analysis::AffectedSet> affected, const minilang::Program& program,
                      const std::optional<LineSpan>& region = std::nullopt);

inline constexpr std::size_t kMaxValueChars = 256;

struct TraceEvent {
    std::string variant;  // "buggy" or a patch id
    SourceLocation location;
    std::string label;
    HookKind kind = HookKind::Def;
    std::uint32_t occurrence = 1;
    std::string type;   // Value type name
    std::string value;  // serialized, truncated to kMaxValueChars
    std::optional<std::size_t> full_length;  // set when `value` was truncated

    friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

struct TraceResult {
    std::vector<TraceEvent> events;
    minilang::TestOutcome outcome;
    std::vector<std::string> output;
    bool truncated = false;  // the step budget ran out
};

class TraceError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Runs a test with the planned hooks installed. Throws TraceError when a hook
// point does not resolve in `program`.
TraceResult trace_run(const minilang::Program& program, std::string_view test, const TraceHooks& hooks,
                      const std::string& variant, const minilang::RunOptions& options = {});

// Maps locations of a patched program onto the buggy program's coordinates.
// Lines after the replaced region shift back by the change in line count;
// events inside the region collapse onto `anchor`.
struct LocationMap {
    LineSpan region;                 // in buggy coordinates
    int replacement_lines = 0;
    SourceLocation anchor;           // first statement of the buggy region

    [[nodiscard]] SourceLocation map(const SourceLocation& loc) const;
    [[nodiscard]] bool in_patched_region(const SourceLocation& loc) const;
};

// Rewrites event locations and renumbers occurrences in emission order.
std::vector<TraceEvent> normalize_locations(std::vector<TraceEvent> events, const LocationMap& map);

class TraceFormatError : public std::runtime_error {
  public:
    TraceFormatError(std::size_t line, const std::string& message);
    [[nodiscard]] std::size_t line() const { return line_; }

  private:
    std::size_t line_;
};

// One JSON array per line:
// [variant, file, line, col, kind, label, occ, type, value(, full_len)]
std::string serialize_trace(std::span<const TraceEvent> events);
std::vector<TraceEvent> deserialize_trace(std::string_view bytes);

}  // namespace triage::tracer
