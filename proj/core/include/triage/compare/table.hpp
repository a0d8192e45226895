#pragma once

#include "triage/tracer/tracer.hpp"

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace triage::compare {

using minilang::SourceLocation;
using tracer::HookKind;
using tracer::TraceEvent;

// A (location, label, kind) series; loop iterations are its occurrences.
struct GroupKey {
    SourceLocation location;
    std::string label;
    HookKind kind = HookKind::Def;
    friend auto operator<=>(const GroupKey&, const GroupKey&) = default;
};

struct RowKey {
    SourceLocation location;
    std::string label;
    HookKind kind = HookKind::Def;
    std::uint32_t occurrence = 1;

    [[nodiscard]] GroupKey group() const { return GroupKey{location, label, kind}; }
    [[nodiscard]] std::string to_string() const;
    friend auto operator<=>(const RowKey&, const RowKey&) = default;
};

struct Cell {
    std::string type;
    std::string value;
    friend bool operator==(const Cell&, const Cell&) = default;
};

struct DataRow {
    RowKey key;
    std::vector<std::optional<Cell>> cells;  // one per column; nullopt = absent
    friend bool operator==(const DataRow&, const DataRow&) = default;
};

// Stands in for consecutive dropped occurrences of one group.
struct ElisionRow {
    GroupKey group;
    std::uint32_t first_occurrence = 0;
    std::uint32_t last_occurrence = 0;
    std::size_t count = 0;
    friend bool operator==(const ElisionRow&, const ElisionRow&) = default;
};

using TableRow = std::variant<DataRow, ElisionRow>;

struct VariantTrace {
    std::string variant;
    std::vector<TraceEvent> events;
};

class MalformedTraceError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class ComparisonTable {
  public:
    static constexpr const char* kBuggy = "buggy";

    ComparisonTable() = default;

    // Column 0 is "buggy"; the remaining columns are patch ids.
    [[nodiscard]] const std::vector<std::string>& columns() const { return columns_; }
    [[nodiscard]] std::vector<std::string> patch_columns() const;
    [[nodiscard]] const std::vector<TableRow>& rows() const { return rows_; }
    [[nodiscard]] std::size_t column_index(const std::string& variant) const;

    // Earliest row whose cell for `patch` differs from the buggy cell.
    // Throws std::out_of_range for a column the table does not have.
    [[nodiscard]] std::optional<RowKey> first_divergence(const std::string& patch) const;
    [[nodiscard]] bool diverges(const DataRow& row, std::size_t column) const;
    // Groups holding at least one divergent row for `patch`.
    [[nodiscard]] std::set<GroupKey> divergent_groups(const std::string& patch) const;
    [[nodiscard]] const DataRow* find(const RowKey& key) const;
    [[nodiscard]] std::size_t cell_count() const;
    [[nodiscard]] std::size_t elided_count() const;

    friend bool operator==(const ComparisonTable&, const ComparisonTable&) = default;

  private:
    friend ComparisonTable align(const std::vector<VariantTrace>& traces);
    friend ComparisonTable summarize(const ComparisonTable& table, std::size_t budget);
    friend ComparisonTable table_from_json(const nlohmann::json& j);

    std::vector<std::string> columns_;
    std::vector<TableRow> rows_;
    std::map<std::string, std::optional<RowKey>> first_divergence_;
};

// Joins traces on (location, label, kind, occurrence). Rows follow the buggy
// trace's order, then rows only the patches produced, in column order.
// Throws std::invalid_argument without a "buggy" trace and
// MalformedTraceError for a repeated key within one trace.
ComparisonTable align(const std::vector<VariantTrace>& traces);

// Caps each group at `budget` rows, always keeping its first and last
// occurrence and every patch's first divergence. Throws std::invalid_argument
// for a zero budget.
ComparisonTable summarize(const ComparisonTable& table, std::size_t budget);

nlohmann::json table_to_json(const ComparisonTable& table);
ComparisonTable table_from_json(const nlohmann::json& j);

std::string render_text(const ComparisonTable& table);

}  // namespace triage::compare
