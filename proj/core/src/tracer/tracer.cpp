#include "triage/tracer/tracer.hpp"

#include "triage/minilang/printer.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include <nlohmann/json.hpp>

namespace triage::tracer {

using namespace minilang;
using json = nlohmann::json;

std::string_view to_string(HookKind kind) {
    switch (kind) {
        case HookKind::Def: return "def";
        case HookKind::Use: return "use";
        case HookKind::Subexpr: return "subexpr";
        case HookKind::Call: return "call";
    }
    return "def";
}

HookKind parse_hook_kind(std::string_view text) {
    if (text == "def") return HookKind::Def;
    if (text == "use") return HookKind::Use;
    if (text == "subexpr") return HookKind::Subexpr;
    if (text == "call") return HookKind::Call;
    throw std::invalid_argument("unknown hook kind '" + std::string(text) + "'");
}

namespace {

class StackCapture : public ExecutionObserver {
  public:
    explicit StackCapture(std::span<const SourceLocation> targets) : targets_(targets) {}

    Flow on_statement(const Stmt& stmt, std::span<const CallFrame> stack) override {
        if (std::find(targets_.begin(), targets_.end(), stmt.loc) == targets_.end()) return Flow::Continue;
        for (std::size_t k = stack.size(); k-- > 0;) {
            analysis::StackFrame frame;
            frame.function = stack[k].function->name;
            frame.location = (k + 1 == stack.size()) ? stmt.loc : *stack[k + 1].call_site;
            trace.frames.push_back(std::move(frame));
        }
        return Flow::Halt;
    }

    analysis::CallStackTrace trace;

  private:
    std::span<const SourceLocation> targets_;
};

bool is_hookable(const Expr& e) {
    if (const auto* b = std::get_if<BinaryExpr>(&e.node)) return is_arithmetic(b->op);
    if (const auto* u = std::get_if<UnaryExpr>(&e.node)) return u->op == UnaryOp::Neg;
    if (const auto* c = std::get_if<CallExpr>(&e.node)) return c->callee != "print" && c->callee != "assert";
    return false;
}

bool mentions_any(const Expr& e, const std::set<std::string>& vars) {
    bool found = false;
    walk_expr(e, [&](const Expr& sub) {
        if (const auto* v = std::get_if<VarRef>(&sub.node)) found = found || vars.contains(v->name);
    });
    return found;
}

bool in_region(const std::optional<LineSpan>& region, const SourceLocation& loc) {
    return region && region->file == loc.file && region->contains(loc.line);
}

}  // namespace

analysis::CallStackTrace capture_stack(const Program& program, std::string_view test,
                                       std::span<const SourceLocation> targets, const RunOptions& options) {
    for (const auto& t : targets) {
        if (!program.statement_at(t)) throw std::invalid_argument("no statement at " + t.to_string());
    }
    StackCapture observer(targets);
    const RunResult run = execute(program, test, &observer, options);
    if (!run.halted) {
        std::string where = targets.empty() ? std::string("<none>") : targets.front().to_string();
        std::string message = "target " + where + " never executed in " + std::string(test);
        if (!run.outcome.passed()) message += " (" + run.outcome.message + ")";
        observer.trace.diagnostics.push_back(std::move(message));
    }
    return std::move(observer.trace);
}

analysis::CallStackTrace capture_stack(const Program& program, std::string_view test, const SourceLocation& target,
                                       const RunOptions& options) {
    const SourceLocation targets[] = {target};
    return capture_stack(program, test, targets, options);
}

TraceHooks plan_hooks(std::span<const analysis::AffectedSet> affected, const Program& program,
                      const std::optional<LineSpan>& region) {
    TraceHooks hooks;
    for (const auto& set : affected) {
        const FunctionDecl* fn = program.find_function(set.function);
        if (!fn && (!set.definitions.empty() || !set.uses.empty() || !set.call_sites.empty())) {
            throw PlanError("no function '" + set.function + "'");
        }
        auto owned_statement = [&](const SourceLocation& loc) {
            const Stmt* s = program.statement_at(loc);
            if (!s || program.owner_of(s->id) != fn) {
                throw PlanError("no statement of '" + set.function + "' at " + loc.to_string());
            }
            return s;
        };

        for (const auto& d : set.definitions) {
            const Stmt* s = owned_statement(d.site);
            const auto* a = std::get_if<AssignStmt>(&s->node);
            if (!a || a->name != d.variable) {
                throw PlanError("statement at " + d.site.to_string() + " does not define '" + d.variable + "'");
            }
            hooks.points.insert(HookPoint{d.site, d.variable, HookKind::Def});
        }

        std::set<SourceLocation> use_sites;
        for (const auto& u : set.uses) use_sites.insert(u.site);
        for (const auto& site : use_sites) {
            const Stmt* s = owned_statement(site);
            if (in_region(region, s->loc)) continue;
            for (const Expr* root : statement_exprs(*s)) {
                walk_expr(*root, [&](const Expr& e) {
                    if (const auto* v = std::get_if<VarRef>(&e.node)) {
                        if (set.uses.contains(analysis::Use{v->name, site})) {
                            hooks.points.insert(HookPoint{e.loc, v->name, HookKind::Use});
                        }
                    } else if (is_hookable(e) && mentions_any(e, set.variables)) {
                        const HookKind kind = std::holds_alternative<CallExpr>(e.node) ? HookKind::Call : HookKind::Subexpr;
                        hooks.points.insert(HookPoint{e.loc, print_expr(e), kind});
                    }
                });
            }
        }

        for (const auto& site : set.call_sites) {
            const Expr* call = nullptr;
            if (fn) {
                walk_stmts(fn->body, [&](const Stmt& s) {
                    for (const Expr* root : statement_exprs(s)) {
                        walk_expr(*root, [&](const Expr& e) {
                            if (!call && e.loc == site && std::holds_alternative<CallExpr>(e.node)) call = &e;
                        });
                    }
                });
            }
            if (!call) throw PlanError("no call in '" + set.function + "' at " + site.to_string());
            hooks.points.insert(HookPoint{site, print_expr(*call), HookKind::Call});
        }
    }
    return hooks;
}

namespace {

struct CounterKey {
    SourceLocation location;
    std::string label;
    friend auto operator<=>(const CounterKey&, const CounterKey&) = default;
};

class TraceObserver : public ExecutionObserver {
  public:
    TraceObserver(const Program& program, const TraceHooks& hooks, std::string variant)
        : variant_(std::move(variant)) {
        std::multimap<SourceLocation, const Expr*> exprs_at;
        for (NodeId id = 0; id < program.node_count(); ++id) {
            if (const Expr* e = program.expr_by_id(id)) exprs_at.emplace(e->loc, e);
        }
        for (const auto& hook : hooks.points) {
            if (hook.kind == HookKind::Def) {
                const Stmt* s = program.statement_at(hook.location);
                const auto* a = s ? std::get_if<AssignStmt>(&s->node) : nullptr;
                if (!a || a->name != hook.label) {
                    throw TraceError("def hook '" + hook.label + "' does not resolve at " + hook.location.to_string());
                }
                stmt_hooks_[s->id] = &hook;
                continue;
            }
            const Expr* match = nullptr;
            auto [lo, hi] = exprs_at.equal_range(hook.location);
            for (auto it = lo; it != hi && !match; ++it) {
                const Expr& e = *it->second;
                if (hook.kind == HookKind::Use) {
                    const auto* v = std::get_if<VarRef>(&e.node);
                    if (v && v->name == hook.label) match = &e;
                } else if ((hook.kind == HookKind::Call) == std::holds_alternative<CallExpr>(e.node) &&
                           print_expr(e) == hook.label) {
                    match = &e;
                }
            }
            if (!match) {
                throw TraceError(std::string(to_string(hook.kind)) + " hook '" + hook.label + "' does not resolve at " +
                                 hook.location.to_string());
            }
            expr_hooks_[match->id] = &hook;
        }
    }

    void on_assign(const Stmt& stmt, const Value& value) override {
        auto it = stmt_hooks_.find(stmt.id);
        if (it != stmt_hooks_.end()) emit(*it->second, value);
    }

    void on_value(const Expr& expr, const Value& value) override {
        auto it = expr_hooks_.find(expr.id);
        if (it != expr_hooks_.end()) emit(*it->second, value);
    }

    std::vector<TraceEvent> events;

  private:
    void emit(const HookPoint& hook, const Value& value) {
        TraceEvent ev;
        ev.variant = variant_;
        ev.location = hook.location;
        ev.label = hook.label;
        ev.kind = hook.kind;
        ev.occurrence = ++counters_[CounterKey{hook.location, hook.label}];
        ev.type = std::string(value.type_name());
        ev.value = value.serialize();
        if (ev.value.size() > kMaxValueChars) {
            ev.full_length = ev.value.size();
            std::size_t cut = kMaxValueChars;
            // Do not split a UTF-8 sequence.
            while (cut > 0 && (static_cast<unsigned char>(ev.value[cut]) & 0xC0) == 0x80) --cut;
            ev.value.resize(cut);
        }
        events.push_back(std::move(ev));
    }

    std::string variant_;
    std::unordered_map<NodeId, const HookPoint*> stmt_hooks_;
    std::unordered_map<NodeId, const HookPoint*> expr_hooks_;
    std::map<CounterKey, std::uint32_t> counters_;
};

}  // namespace

TraceResult trace_run(const Program& program, std::string_view test, const TraceHooks& hooks,
                      const std::string& variant, const RunOptions& options) {
    TraceObserver observer(program, hooks, variant);
    RunResult run = execute(program, test, hooks.empty() ? nullptr : &observer, options);
    TraceResult out;
    out.events = std::move(observer.events);
    out.outcome = std::move(run.outcome);
    out.output = std::move(run.output);
    out.truncated = run.budget_exhausted;
    return out;
}

bool LocationMap::in_patched_region(const SourceLocation& loc) const {
    return loc.file == region.file && loc.line >= region.first_line &&
           loc.line < region.first_line + replacement_lines;
}

SourceLocation LocationMap::map(const SourceLocation& loc) const {
    if (loc.file != region.file || loc.line < region.first_line) return loc;
    if (in_patched_region(loc)) return anchor;
    SourceLocation out = loc;
    out.line = loc.line - replacement_lines + region.line_count();
    return out;
}

std::vector<TraceEvent> normalize_locations(std::vector<TraceEvent> events, const LocationMap& map) {
    std::map<CounterKey, std::uint32_t> counters;
    for (auto& ev : events) {
        ev.location = map.map(ev.location);
        ev.occurrence = ++counters[CounterKey{ev.location, ev.label}];
    }
    return events;
}

TraceFormatError::TraceFormatError(std::size_t line, const std::string& message)
    : std::runtime_error("trace line " + std::to_string(line) + ": " + message), line_(line) {}

std::string serialize_trace(std::span<const TraceEvent> events) {
    std::string out;
    for (const auto& ev : events) {
        json rec = json::array({ev.variant, ev.location.file, ev.location.line, ev.location.col,
                                std::string(to_string(ev.kind)), ev.label, ev.occurrence, ev.type, ev.value});
        if (ev.full_length) rec.push_back(*ev.full_length);
        out += rec.dump(-1, ' ', false, json::error_handler_t::replace);
        out += '\n';
    }
    return out;
}

std::vector<TraceEvent> deserialize_trace(std::string_view bytes) {
    std::vector<TraceEvent> events;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < bytes.size()) {
        ++line_no;
        std::size_t end = bytes.find('\n', pos);
        if (end == std::string_view::npos) end = bytes.size();
        std::string_view line = bytes.substr(pos, end - pos);
        pos = end + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;

        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::parse_error& e) {
            throw TraceFormatError(line_no, e.what());
        }
        if (!rec.is_array() || (rec.size() != 9 && rec.size() != 10)) {
            throw TraceFormatError(line_no, "expected an array of 9 or 10 fields");
        }
        auto str = [&](std::size_t i, const char* name) {
            if (!rec[i].is_string()) throw TraceFormatError(line_no, std::string(name) + " must be a string");
            return rec[i].get<std::string>();
        };
        auto pos_int = [&](std::size_t i, const char* name) {
            if (!rec[i].is_number_unsigned() || rec[i].get<std::uint64_t>() < 1) {
                throw TraceFormatError(line_no, std::string(name) + " must be a positive integer");
            }
            return rec[i].get<std::uint64_t>();
        };
        TraceEvent ev;
        ev.variant = str(0, "variant");
        ev.location.file = str(1, "file");
        ev.location.line = static_cast<decltype(ev.location.line)>(pos_int(2, "line"));
        ev.location.col = static_cast<decltype(ev.location.col)>(pos_int(3, "col"));
        try {
            ev.kind = parse_hook_kind(str(4, "kind"));
        } catch (const std::invalid_argument& e) {
            throw TraceFormatError(line_no, e.what());
        }
        ev.label = str(5, "label");
        ev.occurrence = static_cast<std::uint32_t>(pos_int(6, "occ"));
        ev.type = str(7, "type");
        ev.value = str(8, "value");
        if (rec.size() == 10) ev.full_length = pos_int(9, "full_len");
        events.push_back(std::move(ev));
    }
    return events;
}

}  // namespace triage::tracer
