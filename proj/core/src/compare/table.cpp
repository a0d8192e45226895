#include "triage/compare/table.hpp"

#include <algorithm>
#include <sstream>

#include <nlohmann/json.hpp>

namespace triage::compare {

using json = nlohmann::json;

std::string RowKey::to_string() const {
    return location.to_string() + " " + std::string(tracer::to_string(kind)) + " " + label + " #" +
           std::to_string(occurrence);
}

std::vector<std::string> ComparisonTable::patch_columns() const {
    return columns_.empty() ? std::vector<std::string>{} : std::vector<std::string>(columns_.begin() + 1, columns_.end());
}

std::size_t ComparisonTable::column_index(const std::string& variant) const {
    auto it = std::find(columns_.begin(), columns_.end(), variant);
    if (it == columns_.end()) throw std::out_of_range("no column '" + variant + "' in comparison table");
    return static_cast<std::size_t>(it - columns_.begin());
}

std::optional<RowKey> ComparisonTable::first_divergence(const std::string& patch) const {
    auto it = first_divergence_.find(patch);
    if (it == first_divergence_.end()) throw std::out_of_range("no patch column '" + patch + "'");
    return it->second;
}

bool ComparisonTable::diverges(const DataRow& row, std::size_t column) const {
    return column != 0 && row.cells.at(column) != row.cells.at(0);
}

std::set<GroupKey> ComparisonTable::divergent_groups(const std::string& patch) const {
    const std::size_t col = column_index(patch);
    std::set<GroupKey> out;
    for (const auto& row : rows_) {
        if (const auto* d = std::get_if<DataRow>(&row); d && diverges(*d, col)) out.insert(d->key.group());
    }
    return out;
}

const DataRow* ComparisonTable::find(const RowKey& key) const {
    for (const auto& row : rows_) {
        if (const auto* d = std::get_if<DataRow>(&row); d && d->key == key) return d;
    }
    return nullptr;
}

std::size_t ComparisonTable::cell_count() const {
    std::size_t n = 0;
    for (const auto& row : rows_) {
        if (const auto* d = std::get_if<DataRow>(&row)) {
            n += static_cast<std::size_t>(std::count_if(d->cells.begin(), d->cells.end(),
                                                        [](const auto& c) { return c.has_value(); }));
        }
    }
    return n;
}

std::size_t ComparisonTable::elided_count() const {
    std::size_t n = 0;
    for (const auto& row : rows_) {
        if (const auto* e = std::get_if<ElisionRow>(&row)) n += e->count;
    }
    return n;
}

ComparisonTable align(const std::vector<VariantTrace>& traces) {
    auto buggy = std::find_if(traces.begin(), traces.end(),
                              [](const VariantTrace& t) { return t.variant == ComparisonTable::kBuggy; });
    if (buggy == traces.end()) throw std::invalid_argument("align: no buggy trace");

    ComparisonTable table;
    std::vector<const VariantTrace*> ordered{&*buggy};
    table.columns_.push_back(ComparisonTable::kBuggy);
    for (const auto& t : traces) {
        if (&t == &*buggy) continue;
        if (std::find(table.columns_.begin(), table.columns_.end(), t.variant) != table.columns_.end()) {
            throw std::invalid_argument("align: duplicate variant '" + t.variant + "'");
        }
        table.columns_.push_back(t.variant);
        ordered.push_back(&t);
    }

    const std::size_t ncols = table.columns_.size();
    std::map<RowKey, std::size_t> row_of;
    std::vector<DataRow> rows;
    for (std::size_t c = 0; c < ncols; ++c) {
        for (const auto& ev : ordered[c]->events) {
            RowKey key{ev.location, ev.label, ev.kind, ev.occurrence};
            auto [it, inserted] = row_of.emplace(key, rows.size());
            if (inserted) rows.push_back(DataRow{key, std::vector<std::optional<Cell>>(ncols)});
            auto& cell = rows[it->second].cells[c];
            if (cell) {
                throw MalformedTraceError("trace '" + table.columns_[c] + "' repeats " + key.to_string());
            }
            cell = Cell{ev.type, ev.value};
        }
    }

    for (std::size_t c = 1; c < ncols; ++c) {
        std::optional<RowKey> first;
        for (const auto& row : rows) {
            if (row.cells[c] != row.cells[0]) {
                first = row.key;
                break;
            }
        }
        table.first_divergence_[table.columns_[c]] = first;
    }
    table.rows_.reserve(rows.size());
    for (auto& r : rows) table.rows_.emplace_back(std::move(r));
    return table;
}

ComparisonTable summarize(const ComparisonTable& table, std::size_t budget) {
    if (budget == 0) throw std::invalid_argument("summarize: budget must be at least 1");

    struct GroupStats {
        std::size_t rows = 0;
        std::uint32_t first = 0;
        std::uint32_t last = 0;
    };
    std::map<GroupKey, GroupStats> stats;
    for (const auto& row : table.rows_) {
        if (const auto* d = std::get_if<DataRow>(&row)) {
            auto& s = stats[d->key.group()];
            s.first = s.rows == 0 ? d->key.occurrence : std::min(s.first, d->key.occurrence);
            s.last = std::max(s.last, d->key.occurrence);
            ++s.rows;
        }
    }
    std::set<RowKey> pinned;
    for (const auto& [patch, key] : table.first_divergence_) {
        if (key) pinned.insert(*key);
    }

    ComparisonTable out;
    out.columns_ = table.columns_;
    out.first_divergence_ = table.first_divergence_;
    // Index of the open elision marker for each group, if the previous entry
    // of that group was dropped.
    std::map<GroupKey, std::size_t> open_marker;
    for (const auto& row : table.rows_) {
        const auto* d = std::get_if<DataRow>(&row);
        if (!d) {
            out.rows_.push_back(row);
            continue;
        }
        const GroupKey group = d->key.group();
        const GroupStats& s = stats[group];
        const bool keep = s.rows <= budget || d->key.occurrence == s.first || d->key.occurrence == s.last ||
                          pinned.contains(d->key);
        if (keep) {
            open_marker.erase(group);
            out.rows_.push_back(row);
            continue;
        }
        auto it = open_marker.find(group);
        if (it != open_marker.end()) {
            auto& marker = std::get<ElisionRow>(out.rows_[it->second]);
            marker.first_occurrence = std::min(marker.first_occurrence, d->key.occurrence);
            marker.last_occurrence = std::max(marker.last_occurrence, d->key.occurrence);
            ++marker.count;
        } else {
            open_marker[group] = out.rows_.size();
            out.rows_.emplace_back(ElisionRow{group, d->key.occurrence, d->key.occurrence, 1});
        }
    }
    return out;
}

namespace {

json location_json(const SourceLocation& loc) { return json{{"file", loc.file}, {"line", loc.line}, {"col", loc.col}}; }

SourceLocation location_from(const json& j) {
    return SourceLocation{j.at("file").get<std::string>(), j.at("line").get<int>(), j.at("col").get<int>()};
}

json key_json(const RowKey& k) {
    return json{{"location", location_json(k.location)},
                {"label", k.label},
                {"kind", std::string(tracer::to_string(k.kind))},
                {"occurrence", k.occurrence}};
}

RowKey key_from(const json& j) {
    return RowKey{location_from(j.at("location")), j.at("label").get<std::string>(),
                  tracer::parse_hook_kind(j.at("kind").get<std::string>()), j.at("occurrence").get<std::uint32_t>()};
}

}  // namespace

json table_to_json(const ComparisonTable& table) {
    json rows = json::array();
    for (const auto& row : table.rows()) {
        if (const auto* d = std::get_if<DataRow>(&row)) {
            json cells = json::array();
            json divergent = json::array();
            for (std::size_t c = 0; c < d->cells.size(); ++c) {
                const auto& cell = d->cells[c];
                cells.push_back(cell ? json{{"type", cell->type}, {"value", cell->value}} : json(nullptr));
                if (c > 0) divergent.push_back(table.diverges(*d, c));
            }
            json r = key_json(d->key);
            r["row"] = "data";
            r["cells"] = std::move(cells);
            r["divergent"] = std::move(divergent);
            rows.push_back(std::move(r));
        } else {
            const auto& e = std::get<ElisionRow>(row);
            rows.push_back(json{{"row", "elided"},
                                {"location", location_json(e.group.location)},
                                {"label", e.group.label},
                                {"kind", std::string(tracer::to_string(e.group.kind))},
                                {"first_occurrence", e.first_occurrence},
                                {"last_occurrence", e.last_occurrence},
                                {"count", e.count}});
        }
    }
    json first = json::object();
    for (const auto& patch : table.patch_columns()) {
        auto k = table.first_divergence(patch);
        first[patch] = k ? key_json(*k) : json(nullptr);
    }
    return json{{"columns", table.columns()}, {"rows", std::move(rows)}, {"first_divergence", std::move(first)}};
}

ComparisonTable table_from_json(const json& j) {
    ComparisonTable t;
    t.columns_ = j.at("columns").get<std::vector<std::string>>();
    for (const auto& r : j.at("rows")) {
        if (r.at("row") == "data") {
            DataRow d;
            d.key = key_from(r);
            for (const auto& c : r.at("cells")) {
                d.cells.push_back(c.is_null() ? std::nullopt
                                              : std::optional<Cell>(Cell{c.at("type").get<std::string>(),
                                                                         c.at("value").get<std::string>()}));
            }
            if (d.cells.size() != t.columns_.size()) throw std::invalid_argument("table row has wrong cell count");
            t.rows_.emplace_back(std::move(d));
        } else {
            ElisionRow e;
            e.group = GroupKey{location_from(r.at("location")), r.at("label").get<std::string>(),
                               tracer::parse_hook_kind(r.at("kind").get<std::string>())};
            e.first_occurrence = r.at("first_occurrence").get<std::uint32_t>();
            e.last_occurrence = r.at("last_occurrence").get<std::uint32_t>();
            e.count = r.at("count").get<std::size_t>();
            t.rows_.emplace_back(std::move(e));
        }
    }
    for (const auto& [patch, k] : j.at("first_divergence").items()) {
        t.first_divergence_[patch] = k.is_null() ? std::nullopt : std::optional<RowKey>(key_from(k));
    }
    return t;
}

std::string render_text(const ComparisonTable& table) {
    std::vector<std::vector<std::string>> grid;
    std::vector<std::string> header{"location", "kind", "label", "occ"};
    for (const auto& c : table.columns()) header.push_back(c);
    grid.push_back(header);

    std::vector<bool> is_elision;
    for (std::size_t i = 0; i < table.rows().size(); ++i) {
        const auto& row = table.rows()[i];
        if (const auto* d = std::get_if<DataRow>(&row)) {
            std::vector<std::string> line{d->key.location.to_string(), std::string(tracer::to_string(d->key.kind)),
                                          d->key.label, std::to_string(d->key.occurrence)};
            for (std::size_t c = 0; c < d->cells.size(); ++c) {
                std::string text = d->cells[c] ? d->cells[c]->value : "-";
                if (table.diverges(*d, c)) text = "*" + text;
                line.push_back(std::move(text));
            }
            grid.push_back(std::move(line));
            is_elision.push_back(false);
        } else {
            const auto& e = std::get<ElisionRow>(row);
            std::ostringstream s;
            s << "... " << e.count << " rows of " << e.group.label << " @ " << e.group.location.to_string()
              << " elided (occ " << e.first_occurrence << "-" << e.last_occurrence << ")";
            grid.push_back({s.str()});
            is_elision.push_back(true);
        }
    }

    std::vector<std::size_t> width(header.size(), 0);
    for (std::size_t r = 0; r < grid.size(); ++r) {
        if (r > 0 && is_elision[r - 1]) continue;
        for (std::size_t c = 0; c < grid[r].size(); ++c) width[c] = std::max(width[c], grid[r][c].size());
    }
    std::ostringstream out;
    for (std::size_t r = 0; r < grid.size(); ++r) {
        if (r > 0 && is_elision[r - 1]) {
            out << grid[r][0] << '\n';
            continue;
        }
        for (std::size_t c = 0; c < grid[r].size(); ++c) {
            out << grid[r][c];
            if (c + 1 < grid[r].size()) out << std::string(width[c] - grid[r][c].size() + 2, ' ');
        }
        out << '\n';
    }
    for (const auto& patch : table.patch_columns()) {
        auto k = table.first_divergence(patch);
        out << "first divergence " << patch << ": " << (k ? k->to_string() : std::string("none")) << '\n';
    }
    return out.str();
}

}  // namespace triage::compare
