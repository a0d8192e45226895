#include "triage/analysis/dataflow.hpp"

#include <deque>

namespace triage::analysis {

using namespace minilang;

std::optional<std::string> defined_variable(const Stmt& stmt) {
    if (const auto* a = std::get_if<AssignStmt>(&stmt.node)) return a->name;
    return std::nullopt;
}

FunctionAnalysis def_use_analysis(const FunctionDecl& fn) {
    FunctionAnalysis out;
    out.function = &fn;
    out.cfg = Cfg::build(fn);
    const auto& nodes = out.cfg.nodes;

    // Number every definition; gen/kill are then bitsets over that numbering.
    std::vector<Definition> defs;
    std::vector<std::size_t> def_node;
    for (std::size_t n = 0; n < nodes.size(); ++n) {
        for (const auto& d : nodes[n].defs) {
            defs.push_back(d);
            def_node.push_back(n);
        }
    }
    const std::size_t D = defs.size();
    using Bits = std::vector<bool>;

    std::vector<std::vector<std::size_t>> preds(nodes.size());
    for (std::size_t n = 0; n < nodes.size(); ++n) {
        for (std::size_t s : nodes[n].succ) preds[s].push_back(n);
    }

    std::vector<Bits> in(nodes.size(), Bits(D, false));
    std::vector<Bits> outs(nodes.size(), Bits(D, false));
    auto transfer = [&](std::size_t n, const Bits& input) {
        Bits result = input;
        for (const auto& d : nodes[n].defs) {
            for (std::size_t k = 0; k < D; ++k) {
                if (defs[k].variable == d.variable) result[k] = false;
            }
        }
        for (std::size_t k = 0; k < D; ++k) {
            if (def_node[k] == n) result[k] = true;
        }
        return result;
    };

    std::deque<std::size_t> work;
    std::vector<bool> queued(nodes.size(), true);
    for (std::size_t n = 0; n < nodes.size(); ++n) work.push_back(n);
    while (!work.empty()) {
        const std::size_t n = work.front();
        work.pop_front();
        queued[n] = false;
        Bits merged(D, false);
        for (std::size_t p : preds[n]) {
            for (std::size_t k = 0; k < D; ++k) merged[k] = merged[k] || outs[p][k];
        }
        in[n] = merged;
        Bits next = transfer(n, merged);
        if (next != outs[n]) {
            outs[n] = std::move(next);
            for (std::size_t s : nodes[n].succ) {
                if (!queued[s]) {
                    queued[s] = true;
                    work.push_back(s);
                }
            }
        }
    }

    for (std::size_t k = 0; k < D; ++k) out.def_use[defs[k]];
    for (std::size_t n = 0; n < nodes.size(); ++n) {
        const auto& node = nodes[n];
        if (node.uses.empty()) continue;
        for (std::size_t k = 0; k < D; ++k) {
            if (in[n][k] && node.uses.contains(defs[k].variable)) out.def_use[defs[k]].insert(node.loc);
        }
        auto& defined_here = out.use_def[node.loc];
        if (node.kind == CfgNode::Kind::Statement) {
            for (const auto& d : node.defs) defined_here.insert(d.variable);
        }
    }
    return out;
}

AffectedSet affected_from(std::span<const Stmt* const> seeds, const FunctionAnalysis& analysis) {
    AffectedSet out;
    out.function = analysis.function ? analysis.function->name : std::string();

    std::deque<Definition> work;
    std::set<Definition> seen;
    for (const Stmt* s : seeds) {
        auto var = defined_variable(*s);
        if (!var) {
            out.diagnostics.push_back("statement at " + s->loc.to_string() + " defines no variable");
            continue;
        }
        Definition d{*var, s->loc};
        if (seen.insert(d).second) work.push_back(std::move(d));
    }

    while (!work.empty()) {
        Definition v = std::move(work.front());
        work.pop_front();
        ++out.pops;
        out.variables.insert(v.variable);
        out.locations.insert(v.site);
        out.definitions.insert(v);

        auto chain = analysis.def_use.find(v);
        if (chain == analysis.def_use.end()) continue;
        for (const auto& use_site : chain->second) {
            out.uses.insert(Use{v.variable, use_site});
            out.locations.insert(use_site);
            auto ud = analysis.use_def.find(use_site);
            if (ud == analysis.use_def.end()) continue;
            for (const auto& w : ud->second) {
                Definition next{w, use_site};
                if (seen.insert(next).second) work.push_back(std::move(next));
            }
        }
    }
    return out;
}

AffectedSet affected_variables(const Stmt& stmt, const FunctionAnalysis& analysis) {
    const Stmt* seeds[] = {&stmt};
    return affected_from(seeds, analysis);
}

const Stmt* statement_with_call(const FunctionDecl& fn, const SourceLocation& call_site) {
    const Stmt* found = nullptr;
    walk_stmts(fn.body, [&](const Stmt& s) {
        if (found) return;
        for (const Expr* root : statement_exprs(s)) {
            walk_expr(*root, [&](const Expr& e) {
                if (!found && e.loc == call_site && std::holds_alternative<CallExpr>(e.node)) found = &s;
            });
        }
    });
    return found;
}

std::vector<AffectedSet> interprocedural_affected(const CallStackTrace& stack, const Program& program,
                                                  std::span<const Stmt* const> innermost_seeds) {
    std::vector<AffectedSet> out;
    for (std::size_t i = 0; i < stack.frames.size(); ++i) {
        const StackFrame& frame = stack.frames[i];
        const FunctionDecl* fn = program.find_function(frame.function);
        if (!fn) throw AnalysisError("frame " + std::to_string(i) + ": no function '" + frame.function + "'");
        if (program.function_containing(frame.location) != fn) {
            throw AnalysisError("frame " + std::to_string(i) + ": " + frame.location.to_string() + " is not inside '" +
                                frame.function + "'");
        }
        const FunctionAnalysis analysis = def_use_analysis(*fn);

        std::vector<const Stmt*> seeds;
        if (i == 0 && !innermost_seeds.empty()) {
            seeds.assign(innermost_seeds.begin(), innermost_seeds.end());
        } else if (i == 0) {
            const Stmt* s = program.statement_at(frame.location);
            if (!s || program.owner_of(s->id) != fn) {
                throw AnalysisError("frame 0: no statement at " + frame.location.to_string());
            }
            seeds.push_back(s);
        } else {
            const Stmt* s = statement_with_call(*fn, frame.location);
            if (!s) throw AnalysisError("frame " + std::to_string(i) + ": no call at " + frame.location.to_string());
            seeds.push_back(s);
        }

        AffectedSet set = affected_from(seeds, analysis);
        if (i > 0) set.call_sites.insert(frame.location);
        // A call site whose result is discarded still marks where the faulty
        // value crosses into this frame.
        if (i > 0 && set.definitions.empty()) {
            set.locations.insert(seeds.front()->loc);
        }
        out.push_back(std::move(set));
    }
    return out;
}

}  // namespace triage::analysis
